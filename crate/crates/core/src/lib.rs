//! Path spaces, essential paths and Temperley–Lieb checks on SU(3) ADE graphs.

pub mod cells;
pub mod cli;
pub mod error;
pub mod essential;
pub mod fusion;
pub mod graphs;
pub mod linalg;
pub mod operators;
pub mod paths;
pub mod reference;

pub use error::{Error, Result};
