//! Oriented SU(3) ADE graphs and their spectral data.
//!
//! A graph is a set of vertices joined by σ-arrows. Vertex order is fixed at
//! construction and every matrix downstream is indexed in that order:
//! A-type graphs are ordered lexicographically on their triangular
//! coordinates `(λ1, λ2)`, the E5 graph lists `1_0..1_5` then `2_0..2_5`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::f64::consts::PI;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Names of the graphs that ship with the crate.
pub const BUILTIN_GRAPHS: [&str; 5] = ["a2", "a3", "a4", "a5", "e5"];

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vertex {
    /// Stable identifier used on the command line and in files.
    pub id: String,
    /// Display label (may contain non-ASCII, e.g. `3̄`).
    pub label: String,
    /// Triangular coordinates `(λ1, λ2)`, A-type graphs only.
    pub tri: Option<(u32, u32)>,
}

/// An oriented, simply laced SU(3) graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphSpec {
    name: String,
    vertices: Vec<Vertex>,
    sigma_edges: Vec<(usize, usize)>,
    kappa: u32,
    successors: Vec<Vec<usize>>,
    predecessors: Vec<Vec<usize>>,
    arrows: HashSet<(usize, usize)>,
}

impl GraphSpec {
    pub fn new(
        name: impl Into<String>,
        vertices: Vec<Vertex>,
        sigma_edges: Vec<(usize, usize)>,
        kappa: u32,
    ) -> Result<Self> {
        let name = name.into();
        let n = vertices.len();
        if n == 0 {
            return Err(Error::InvalidGraph("no vertices".into()));
        }
        if kappa < 3 {
            return Err(Error::InvalidGraph(format!("kappa {kappa} < 3")));
        }
        let level = kappa - 3;

        let mut ids = HashSet::new();
        for v in &vertices {
            if !ids.insert(v.id.as_str()) {
                return Err(Error::InvalidGraph(format!("duplicate vertex id `{}`", v.id)));
            }
            if let Some((l1, l2)) = v.tri {
                if l1 + l2 > level {
                    return Err(Error::InvalidGraph(format!(
                        "vertex `{}` has λ1+λ2 = {} > level {level}",
                        v.id,
                        l1 + l2
                    )));
                }
            }
        }

        let mut arrows = HashSet::new();
        let mut successors = vec![Vec::new(); n];
        let mut predecessors = vec![Vec::new(); n];
        for &(u, v) in &sigma_edges {
            if u >= n || v >= n {
                return Err(Error::InvalidGraph(format!("arrow ({u},{v}) out of range")));
            }
            if u == v {
                return Err(Error::InvalidGraph(format!(
                    "self-loop at `{}`",
                    vertices[u].id
                )));
            }
            if !arrows.insert((u, v)) {
                return Err(Error::InvalidGraph(format!(
                    "duplicate arrow {} -> {}",
                    vertices[u].id, vertices[v].id
                )));
            }
            successors[u].push(v);
            predecessors[v].push(u);
        }
        for list in successors.iter_mut().chain(predecessors.iter_mut()) {
            list.sort_unstable();
        }

        let graph = Self {
            name,
            vertices,
            sigma_edges,
            kappa,
            successors,
            predecessors,
            arrows,
        };
        if !graph.is_strongly_connected() {
            return Err(Error::InvalidGraph(format!(
                "adjacency of `{}` is reducible",
                graph.name
            )));
        }
        Ok(graph)
    }

    fn is_strongly_connected(&self) -> bool {
        let n = self.vertices.len();
        let reach = |next: &Vec<Vec<usize>>| {
            let mut seen = vec![false; n];
            let mut queue = VecDeque::from([0usize]);
            seen[0] = true;
            while let Some(u) = queue.pop_front() {
                for &v in &next[u] {
                    if !seen[v] {
                        seen[v] = true;
                        queue.push_back(v);
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach(&self.successors) && reach(&self.predecessors)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &Vertex {
        &self.vertices[v]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn sigma_edges(&self) -> &[(usize, usize)] {
        &self.sigma_edges
    }

    pub fn kappa(&self) -> u32 {
        self.kappa
    }

    pub fn level(&self) -> u32 {
        self.kappa - 3
    }

    pub fn has_arrow(&self, from: usize, to: usize) -> bool {
        self.arrows.contains(&(from, to))
    }

    /// σ-successors of `v`, ascending.
    pub fn successors(&self, v: usize) -> &[usize] {
        &self.successors[v]
    }

    /// σ-predecessors of `v`, ascending.
    pub fn predecessors(&self, v: usize) -> &[usize] {
        &self.predecessors[v]
    }

    pub fn are_neighbours(&self, a: usize, b: usize) -> bool {
        self.has_arrow(a, b) || self.has_arrow(b, a)
    }

    /// Resolves a vertex by id, then label, then `λ1.λ2` triangular notation.
    pub fn find_vertex(&self, key: &str) -> Result<usize> {
        let key = key.trim();
        if let Some(i) = self.vertices.iter().position(|v| v.id == key) {
            return Ok(i);
        }
        if let Some(i) = self.vertices.iter().position(|v| v.label == key) {
            return Ok(i);
        }
        if let Some((a, b)) = key.split_once('.') {
            if let (Ok(a), Ok(b)) = (a.parse::<u32>(), b.parse::<u32>()) {
                if let Some(i) = self.vertices.iter().position(|v| v.tri == Some((a, b))) {
                    return Ok(i);
                }
            }
        }
        Err(Error::UnknownVertex(key.to_string()))
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        let n = self.len();
        let mut a = DMatrix::zeros(n, n);
        for &(u, v) in &self.sigma_edges {
            a[(u, v)] = 1.0;
        }
        a
    }

    pub fn is_a_type(&self) -> bool {
        self.vertices.iter().all(|v| v.tri.is_some())
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            name: self.name.clone(),
            kappa: self.kappa,
            vertices: self
                .vertices
                .iter()
                .map(|v| GraphFileVertex {
                    id: v.id.clone(),
                    label: (v.label != v.id).then(|| v.label.clone()),
                    tri: v.tri.map(|(a, b)| [a, b]),
                })
                .collect(),
            sigma_edges: self
                .sigma_edges
                .iter()
                .map(|&(u, v)| [self.vertices[u].id.clone(), self.vertices[v].id.clone()])
                .collect(),
        }
    }

    pub fn from_file(file: GraphFile) -> Result<Self> {
        let vertices: Vec<Vertex> = file
            .vertices
            .iter()
            .map(|v| Vertex {
                id: v.id.clone(),
                label: v.label.clone().unwrap_or_else(|| v.id.clone()),
                tri: v.tri.map(|[a, b]| (a, b)),
            })
            .collect();
        let index: HashMap<&str, usize> = vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id.as_str(), i))
            .collect();
        let mut edges = Vec::with_capacity(file.sigma_edges.len());
        for [from, to] in &file.sigma_edges {
            let u = *index
                .get(from.as_str())
                .ok_or_else(|| Error::UnknownVertex(from.clone()))?;
            let v = *index
                .get(to.as_str())
                .ok_or_else(|| Error::UnknownVertex(to.clone()))?;
            edges.push((u, v));
        }
        Self::new(file.name, vertices, edges, file.kappa)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: GraphFile = serde_json::from_str(&text)?;
        Self::from_file(file)
    }
}

/// On-disk graph description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFile {
    pub name: String,
    pub kappa: u32,
    pub vertices: Vec<GraphFileVertex>,
    pub sigma_edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphFileVertex {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    pub tri: Option<[u32; 2]>,
}

fn a2_names(tri: (u32, u32)) -> (&'static str, &'static str) {
    match tri {
        (0, 0) => ("1", "1"),
        (1, 0) => ("3", "3"),
        (0, 1) => ("3b", "3̄"),
        (2, 0) => ("6", "6"),
        (0, 2) => ("6b", "6̄"),
        _ => ("8", "8"),
    }
}

/// The A-type graph at `level`: the Weyl alcove `λ1 + λ2 ≤ level` with
/// σ-arrows along `(1,0)`, `(-1,1)` and `(0,-1)`.
///
/// Level 2 vertices carry the irreducible representation names
/// (`1`, `3`, `3b`, `6`, `6b`, `8`); other levels use `λ1.λ2`.
pub fn build_a_graph(level: u32) -> GraphSpec {
    let mut coords = Vec::new();
    for l1 in 0..=level {
        for l2 in 0..=(level - l1) {
            coords.push((l1, l2));
        }
    }
    let index: HashMap<(u32, u32), usize> =
        coords.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let vertices = coords
        .iter()
        .map(|&(l1, l2)| {
            let (id, label) = if level == 2 {
                let (id, label) = a2_names((l1, l2));
                (id.to_string(), label.to_string())
            } else {
                let s = format!("{l1}.{l2}");
                (s.clone(), s)
            };
            Vertex {
                id,
                label,
                tri: Some((l1, l2)),
            }
        })
        .collect();
    let mut edges = Vec::new();
    for (u, &(l1, l2)) in coords.iter().enumerate() {
        let (l1, l2) = (l1 as i64, l2 as i64);
        for (d1, d2) in [(1, 0), (-1, 1), (0, -1)] {
            let t = (l1 + d1, l2 + d2);
            if t.0 < 0 || t.1 < 0 {
                continue;
            }
            if let Some(&v) = index.get(&(t.0 as u32, t.1 as u32)) {
                edges.push((u, v));
            }
        }
    }
    GraphSpec::new(format!("a{level}"), vertices, edges, level + 3)
        .expect("A-type graphs are valid by construction")
}

/// The E5 graph: `1_i -> 2_{i+1}`, `2_i -> 2_{i+1}`, `2_i -> 2_{i+4}`,
/// `2_i -> 1_{i+4}`, indices mod 6, κ = 8.
pub fn build_e5_graph() -> GraphSpec {
    let mut vertices = Vec::with_capacity(12);
    for family in 1..=2 {
        for i in 0..6 {
            let id = format!("{family}_{i}");
            vertices.push(Vertex {
                label: id.clone(),
                id,
                tri: None,
            });
        }
    }
    let one = |i: usize| i % 6;
    let two = |i: usize| 6 + i % 6;
    let mut edges = Vec::with_capacity(24);
    for i in 0..6 {
        edges.push((one(i), two(i + 1)));
        edges.push((two(i), two(i + 1)));
        edges.push((two(i), two(i + 4)));
        edges.push((two(i), one(i + 4)));
    }
    GraphSpec::new("e5", vertices, edges, 8).expect("E5 is valid by construction")
}

/// Reverses every σ-arrow. Applying it twice gives back the original graph.
pub fn conjugate_graph(g: &GraphSpec) -> GraphSpec {
    let name = match g
        .name
        .strip_prefix("conj(")
        .and_then(|s| s.strip_suffix(')'))
    {
        Some(inner) => inner.to_string(),
        None => format!("conj({})", g.name),
    };
    let edges = g.sigma_edges.iter().map(|&(u, v)| (v, u)).collect();
    GraphSpec::new(name, g.vertices.clone(), edges, g.kappa)
        .expect("reversal preserves validity")
}

/// Looks up a shipped graph by case-insensitive name.
pub fn builtin_graph(name: &str) -> Result<GraphSpec> {
    let key = name.trim().to_ascii_lowercase();
    match key.as_str() {
        "e5" => Ok(build_e5_graph()),
        "a2" | "a3" | "a4" | "a5" => Ok(build_a_graph(key[1..].parse().unwrap())),
        _ => Err(Error::UnknownGraph(name.to_string())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectralData {
    /// Perron–Frobenius eigenvalue of the σ-adjacency.
    pub beta: f64,
    /// Quantum dimensions, normalised so the smallest is exactly 1.
    pub mu: Vec<f64>,
    /// `exp(iπ/κ)`.
    pub q: Complex64,
    pub kappa: u32,
}

impl SpectralData {
    /// `[2]_q`, the Hecke parameter of the path representation.
    pub fn hecke(&self) -> f64 {
        q_number(2, self.kappa)
    }
}

const POWER_ITERATION_CAP: usize = 200_000;

/// Perron–Frobenius data by power iteration on `A + I`.
///
/// The shift matters: SU(3) graphs are 3-periodic (every arrow raises the
/// triality by one), so `A` itself has three eigenvalues of modulus β.
pub fn spectral_data(g: &GraphSpec) -> Result<SpectralData> {
    let n = g.len();
    let a = g.adjacency();
    let shifted = &a + DMatrix::<f64>::identity(n, n);
    let mut x = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut residual = f64::INFINITY;
    let mut converged = false;
    for _ in 0..POWER_ITERATION_CAP {
        let mut y = &shifted * &x;
        let norm = y.norm();
        if norm == 0.0 {
            break;
        }
        y /= norm;
        let ax = &a * &y;
        let beta = ax.dot(&y) / y.dot(&y);
        residual = (&ax - &y * beta).amax();
        x = y;
        if residual < 1e-14 {
            converged = true;
            break;
        }
    }
    if n == 1 {
        converged = true;
        residual = 0.0;
    }
    if !converged {
        return Err(Error::SpectralNonConvergence {
            iterations: POWER_ITERATION_CAP,
            residual,
        });
    }
    let min = x.iter().cloned().fold(f64::INFINITY, f64::min);
    let mu: Vec<f64> = x.iter().map(|v| v / min).collect();
    let mu_vec = DVector::from_vec(mu.clone());
    let beta = (&a * &mu_vec).sum() / mu_vec.sum();
    Ok(SpectralData {
        beta,
        mu,
        q: Complex64::from_polar(1.0, PI / g.kappa() as f64),
        kappa: g.kappa(),
    })
}

/// `[n]_q = sin(nπ/κ) / sin(π/κ)`.
pub fn q_number(n: i64, kappa: u32) -> f64 {
    let k = kappa as f64;
    (n as f64 * PI / k).sin() / (PI / k).sin()
}

/// Quantum dimension of the weight `(λ1, λ2)`:
/// `[λ1+1] [λ2+1] [λ1+λ2+2] / [2]`.
pub fn q_dim_triangular(lambda: (u32, u32), kappa: u32) -> f64 {
    let (l1, l2) = (lambda.0 as i64, lambda.1 as i64);
    q_number(l1 + 1, kappa) * q_number(l2 + 1, kappa) * q_number(l1 + l2 + 2, kappa)
        / q_number(2, kappa)
}
