use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid graph: {0}")]
    InvalidGraph(String),

    #[error("unknown graph `{0}`")]
    UnknownGraph(String),

    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),

    #[error("invalid word `{0}`: use `s` for sigma and `b` for sigma-bar")]
    InvalidWord(String),

    #[error("invalid path: {0}")]
    InvalidPath(String),

    #[error("power iteration did not converge after {iterations} iterations (residual {residual:e})")]
    SpectralNonConvergence { iterations: usize, residual: f64 },

    #[error("path space {grading} has more than {cap} basis paths")]
    SpaceTooLarge { grading: String, cap: usize },

    #[error("grading mismatch: {0} vs {1}")]
    GradingMismatch(String, String),

    #[error("position {position} out of range 1..={max} for {op}")]
    PositionOutOfRange {
        op: &'static str,
        position: usize,
        max: usize,
    },

    #[error("`{0}` and `{1}` are not neighbours")]
    NotNeighbours(String, String),

    #[error("type ({0},{1}) exceeds level {2}")]
    TypeBeyondLevel(u32, u32, u32),

    #[error("graph has no triangles")]
    NoTriangles,

    #[error("cell solver did not converge; best residuals: {0}")]
    SolverNonConvergence(String),

    #[error("cell file: {0}")]
    CellFile(String),

    #[error("missing cells for `{0}`")]
    MissingCells(String),

    #[error("decomposition rank deficiency: {0}")]
    RankDeficiency(String),

    #[error("{0}")]
    Unsupported(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
