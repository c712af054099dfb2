//! Triangular cell systems: enumeration, the solver, gauge fixing and files.
//!
//! A cell is a complex number on an oriented 3-cycle `x -> y -> z -> x` of
//! σ-arrows. Collapsed cells on back-and-forth pairs are never stored; they
//! are `√(μ_a μ_m)` by construction.
//!
//! The solver fits the cells so that, with `δ = [2]_q`,
//! * `Σ_m |T(a,m,c)|² = δ μ_a μ_c` for every arrow `c -> a` (bigon rule),
//! * `F_1 = F_2` on every length-3 word with a single tag,
//! * `(C_2 C†_1)² = 1 + ∩_1 ∪_1` on every length-2 return word.
//!
//! `δ` coincides with β only when κ = 5. For other graphs no cell system
//! satisfies `U² = βU` together with the braid relation.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::graphs::{spectral_data, GraphSpec, SpectralData};
use crate::linalg::{max_abs, CMatrix};
use crate::operators::{annihilation_stencil, annihilation_word, creation_word, Stencil};
use crate::paths::{EdgeTag, PathGrading, PathSpace, Word};

/// Default residual tolerance for solving and for the load-time check.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Environment variable naming a directory of `<graph>.json` cell files
/// that replace the shipped ones.
pub const CELLS_DIR_ENV: &str = "SU3PATHS_CELLS_DIR";

/// A 3-cycle of σ-arrows, stored with its smallest vertex first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrientedTriangle(pub [usize; 3]);

impl OrientedTriangle {
    /// The rotation of `(x, y, z)` starting at its smallest vertex.
    pub fn canonical(x: usize, y: usize, z: usize) -> Self {
        let r = [[x, y, z], [y, z, x], [z, x, y]];
        OrientedTriangle(*r.iter().min().unwrap())
    }

    pub fn arrows(&self) -> [(usize, usize); 3] {
        let [x, y, z] = self.0;
        [(x, y), (y, z), (z, x)]
    }

    pub fn display(&self, g: &GraphSpec) -> String {
        let [x, y, z] = self.0;
        format!("({} {} {})", g.vertex(x).id, g.vertex(y).id, g.vertex(z).id)
    }
}

/// Every oriented triangle of `g`, sorted.
pub fn enumerate_triangles(g: &GraphSpec) -> Vec<OrientedTriangle> {
    let mut set = HashSet::new();
    for &(x, y) in g.sigma_edges() {
        for &z in g.successors(y) {
            if g.has_arrow(z, x) {
                set.insert(OrientedTriangle::canonical(x, y, z));
            }
        }
    }
    let mut out: Vec<_> = set.into_iter().collect();
    out.sort();
    out
}

/// Lookup from any rotation of a triangle to its position in a cell list.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TriangleIndex {
    map: HashMap<[usize; 3], usize>,
}

impl TriangleIndex {
    pub fn new(tris: &[OrientedTriangle]) -> Self {
        Self {
            map: tris.iter().enumerate().map(|(i, t)| (t.0, i)).collect(),
        }
    }

    pub fn get(&self, x: usize, y: usize, z: usize) -> Option<usize> {
        self.map.get(&OrientedTriangle::canonical(x, y, z).0).copied()
    }
}

/// `√(μ_a μ_m)`, the forced value of the collapsed cell on `a m a`.
pub fn collapsed_cell(g: &GraphSpec, spectral: &SpectralData, a: usize, m: usize) -> Result<f64> {
    if !g.are_neighbours(a, m) {
        return Err(Error::NotNeighbours(
            g.vertex(a).id.clone(),
            g.vertex(m).id.clone(),
        ));
    }
    Ok((spectral.mu[a] * spectral.mu[m]).sqrt())
}

#[derive(Debug, Clone, PartialEq)]
pub struct CellSystem {
    graph: String,
    triangles: Vec<OrientedTriangle>,
    values: Vec<Complex64>,
    /// Largest violation per constraint family.
    pub residuals: BTreeMap<String, f64>,
    pub seed: u64,
    /// Problems found when the cells were loaded.
    pub warnings: Vec<String>,
    index: TriangleIndex,
}

impl CellSystem {
    pub fn from_values(g: &GraphSpec, values: Vec<Complex64>, seed: u64) -> Result<Self> {
        let triangles = enumerate_triangles(g);
        if values.len() != triangles.len() {
            return Err(Error::CellFile(format!(
                "{} values for {} triangles",
                values.len(),
                triangles.len()
            )));
        }
        let index = TriangleIndex::new(&triangles);
        let mut cs = Self {
            graph: g.name().to_string(),
            triangles,
            values,
            residuals: BTreeMap::new(),
            seed,
            warnings: Vec::new(),
            index,
        };
        cs.residuals = cell_residuals(g, &cs.values)?;
        Ok(cs)
    }

    /// Every cell zero. Useful for checking that broken cells are detected.
    pub fn zero(g: &GraphSpec) -> Self {
        let n = enumerate_triangles(g).len();
        Self::from_values(g, vec![Complex64::default(); n], 0).expect("matching length")
    }

    pub fn graph_name(&self) -> &str {
        &self.graph
    }

    pub fn triangles(&self) -> &[OrientedTriangle] {
        &self.triangles
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn index(&self) -> &TriangleIndex {
        &self.index
    }

    /// `T(x, y, z)` for any rotation of a stored triangle.
    pub fn value(&self, x: usize, y: usize, z: usize) -> Option<Complex64> {
        self.index.get(x, y, z).map(|i| self.values[i])
    }

    pub(crate) fn check_graph(&self, g: &GraphSpec) -> Result<()> {
        if self.triangles != enumerate_triangles(g) {
            return Err(Error::CellFile(format!(
                "cells for `{}` do not match the triangles of `{}`",
                self.graph,
                g.name()
            )));
        }
        Ok(())
    }

    /// Whether every solver residual is below `tol`.
    pub fn verified(&self, tol: f64) -> bool {
        self.residuals.values().all(|&r| r < tol)
    }
}

/// Unit phase per σ-arrow.
#[derive(Debug, Clone, PartialEq)]
pub struct GaugePhases {
    pub phases: BTreeMap<(usize, usize), Complex64>,
}

impl GaugePhases {
    pub fn identity(g: &GraphSpec) -> Self {
        Self {
            phases: g
                .sigma_edges()
                .iter()
                .map(|&e| (e, Complex64::new(1.0, 0.0)))
                .collect(),
        }
    }

    pub fn random(g: &GraphSpec, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        Self {
            phases: g
                .sigma_edges()
                .iter()
                .map(|&e| (e, Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))))
                .collect(),
        }
    }

    pub fn from_angles(g: &GraphSpec, angles: &[f64]) -> Self {
        Self {
            phases: g
                .sigma_edges()
                .iter()
                .zip(angles)
                .map(|(&e, &a)| (e, Complex64::from_polar(1.0, a)))
                .collect(),
        }
    }
}

/// `T'(x,y,z) = g(x→y) g(y→z) g(z→x) T(x,y,z)`; the residual report is carried over.
pub fn gauge_transform(cells: &CellSystem, phases: &GaugePhases) -> Result<CellSystem> {
    let mut out = cells.clone();
    for (t, v) in cells.triangles.iter().zip(out.values.iter_mut()) {
        for arrow in t.arrows() {
            let p = phases.phases.get(&arrow).ok_or_else(|| {
                Error::Unsupported(format!("no gauge phase for arrow {arrow:?}"))
            })?;
            *v *= p;
        }
    }
    Ok(out)
}

/// Gauge with as many positive-real cells as the graph allows: a maximal
/// set of triangles with independent arrow sets is made positive, the
/// rest carry gauge-invariant phases.
pub fn canonical_gauge(g: &GraphSpec, cells: &CellSystem) -> Result<CellSystem> {
    let edges = g.sigma_edges();
    let edge_pos: HashMap<(usize, usize), usize> =
        edges.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut chosen: Vec<DVector<f64>> = Vec::new();
    let mut orth: Vec<DVector<f64>> = Vec::new();
    let mut rhs = Vec::new();
    for (t, v) in cells.triangles.iter().zip(&cells.values) {
        if v.norm() < 1e-12 {
            continue;
        }
        let mut row = DVector::zeros(edges.len());
        for a in t.arrows() {
            row[edge_pos[&a]] = 1.0;
        }
        let mut r = row.clone();
        for q in &orth {
            r -= q * q.dot(&row);
        }
        if r.norm() > 1e-9 {
            orth.push(r.normalize());
            chosen.push(row);
            rhs.push(-v.arg());
        }
    }
    if chosen.is_empty() {
        return Ok(cells.clone());
    }
    let m = DMatrix::from_fn(chosen.len(), edges.len(), |i, j| chosen[i][j]);
    let b = DVector::from_vec(rhs);
    let angles = m
        .svd(true, true)
        .solve(&b, 1e-12)
        .map_err(|e| Error::Unsupported(format!("gauge fixing: {e}")))?;
    let mut out = gauge_transform(cells, &GaugePhases::from_angles(g, angles.as_slice()))?;
    for v in &mut out.values {
        if v.im.abs() < 1e-12 * v.norm().max(1.0) {
            v.im = 0.0;
        }
    }
    out.residuals = cell_residuals(g, &out.values)?;
    Ok(out)
}

// ---------------------------------------------------------------------------
// solver

struct BraidBlock {
    c1: Stencil,
    c2: Stencil,
}

struct SquareBlock {
    a1: Stencil,
    a2: Stencil,
    b1: Stencil,
    b2: Stencil,
    rhs: CMatrix,
}

struct Bigon {
    tris: Vec<usize>,
    target: f64,
}

/// Precomputed stencils for the constraint families.
struct Model {
    bigons: Vec<Bigon>,
    braids: Vec<BraidBlock>,
    squares: Vec<SquareBlock>,
}

impl Model {
    fn new(g: &GraphSpec, sp: &SpectralData, tris: &[OrientedTriangle]) -> Result<Self> {
        let index = TriangleIndex::new(tris);
        let mu = &sp.mu;
        let delta = sp.hecke();
        let mut bigons = Vec::new();
        for &(c, a) in g.sigma_edges() {
            let ts: Vec<usize> = g
                .successors(a)
                .iter()
                .filter(|&&m| g.has_arrow(m, c))
                .filter_map(|&m| index.get(a, m, c))
                .collect();
            if !ts.is_empty() {
                bigons.push(Bigon {
                    tris: ts,
                    target: delta * mu[a] * mu[c],
                });
            }
        }

        let space = |a: usize, b: usize, w: &Word| PathSpace::new(g, PathGrading::new(a, b, w.clone()));
        let stencil = |dom: &PathSpace, i: usize| -> Result<Stencil> {
            let cw = annihilation_word(&dom.grading().word, i);
            let cod = space(dom.grading().from, dom.grading().to, &cw)?;
            Ok(annihilation_stencil(g, mu, &index, dom, &cod, i))
        };

        let mut braids = Vec::new();
        let mut squares = Vec::new();
        let n = g.len();
        for a in 0..n {
            for b in 0..n {
                for t in [EdgeTag::Sigma, EdgeTag::SigmaBar] {
                    let w = Word(vec![t; 3]);
                    let s = space(a, b, &w)?;
                    if s.dim() > 0 {
                        braids.push(BraidBlock {
                            c1: stencil(&s, 1)?,
                            c2: stencil(&s, 2)?,
                        });
                    }

                    let w = Word(vec![t, t.opposite()]);
                    let s = space(a, b, &w)?;
                    if s.dim() == 0 {
                        continue;
                    }
                    let w1 = space(a, b, &creation_word(&w, 1))?;
                    let w2 = annihilation_word(&w1.grading().word, 2);
                    let w1b = space(a, b, &creation_word(&w2, 1))?;
                    let d = s.dim();
                    let mut rhs = CMatrix::identity(d, d);
                    if a == b {
                        // ∩_1 ∪_1 on return paths a m a: rank one with weights √(μ_m/μ_a)
                        let wts: Vec<f64> = s
                            .basis()
                            .iter()
                            .map(|p| (mu[p.vertices()[1]] / mu[a]).sqrt())
                            .collect();
                        for i in 0..d {
                            for j in 0..d {
                                rhs[(i, j)] += wts[i] * wts[j];
                            }
                        }
                    }
                    squares.push(SquareBlock {
                        a1: stencil(&w1, 1)?,
                        a2: stencil(&w1, 2)?,
                        b1: stencil(&w1b, 1)?,
                        b2: stencil(&w1b, 2)?,
                        rhs,
                    });
                }
            }
        }
        Ok(Self {
            bigons,
            braids,
            squares,
        })
    }

    /// Max residual per family, and optionally the flat residual vector.
    fn evaluate(&self, t: &[Complex64], mut flat: Option<&mut Vec<f64>>) -> [f64; 3] {
        let mut max = [0.0f64; 3];
        for b in &self.bigons {
            let r = b.tris.iter().map(|&i| t[i].norm_sqr()).sum::<f64>() - b.target;
            max[0] = max[0].max(r.abs());
            if let Some(f) = flat.as_deref_mut() {
                f.push(r);
            }
        }
        let mut push = |k: usize, m: &CMatrix, flat: &mut Option<&mut Vec<f64>>| {
            max[k] = max[k].max(max_abs(m));
            if let Some(f) = flat.as_deref_mut() {
                for c in m.iter() {
                    f.push(c.re);
                    f.push(c.im);
                }
            }
        };
        for b in &self.braids {
            let c1 = b.c1.assemble(t);
            let c2 = b.c2.assemble(t);
            let u1 = c1.adjoint() * &c1;
            let u2 = c2.adjoint() * &c2;
            let f = &u1 * &u2 * &u1 - &u1 - (&u2 * &u1 * &u2 - &u2);
            push(1, &f, &mut flat);
        }
        for s in &self.squares {
            let q1 = s.a2.assemble(t) * s.a1.assemble(t).adjoint();
            let q2 = s.b2.assemble(t) * s.b1.assemble(t).adjoint();
            let r = q2 * q1 - &s.rhs;
            push(2, &r, &mut flat);
        }
        max
    }
}

const FAMILIES: [&str; 3] = ["sum_rule", "braid", "square"];

/// Largest violation of each solver constraint family.
pub fn cell_residuals(g: &GraphSpec, values: &[Complex64]) -> Result<BTreeMap<String, f64>> {
    let sp = spectral_data(g)?;
    let model = Model::new(g, &sp, &enumerate_triangles(g))?;
    let max = model.evaluate(values, None);
    Ok(FAMILIES
        .iter()
        .zip(max)
        .map(|(k, v)| (k.to_string(), v))
        .collect())
}

#[derive(Debug, Clone)]
pub struct SolveOptions {
    pub starts: usize,
    pub max_iterations: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            starts: 16,
            max_iterations: 400,
        }
    }
}

/// Solves for a cell system, returned in the canonical gauge.
pub fn solve_cells(g: &GraphSpec, seed: u64, tol: f64) -> Result<CellSystem> {
    solve_cells_with(g, seed, tol, &SolveOptions::default())
}

pub fn solve_cells_with(
    g: &GraphSpec,
    seed: u64,
    tol: f64,
    opts: &SolveOptions,
) -> Result<CellSystem> {
    let tris = enumerate_triangles(g);
    if tris.is_empty() {
        return Err(Error::NoTriangles);
    }
    let sp = spectral_data(g)?;
    let model = Model::new(g, &sp, &tris)?;
    let nt = tris.len();
    let to_cells = |x: &[f64]| -> Vec<Complex64> {
        (0..nt).map(|i| Complex64::new(x[i], x[nt + i])).collect()
    };
    let residual = |x: &[f64]| {
        let mut f = Vec::new();
        model.evaluate(&to_cells(x), Some(&mut f));
        f
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<[f64; 3]> = None;
    for _ in 0..opts.starts {
        let x0: Vec<f64> = (0..2 * nt).map(|_| rng.random_range(-2.0..2.0)).collect();
        let x = levenberg_marquardt(&residual, x0, opts.max_iterations);
        let max = model.evaluate(&to_cells(&x), None);
        if max.iter().all(|&r| r < tol) {
            let raw = CellSystem::from_values(g, to_cells(&x), seed)?;
            let cs = canonical_gauge(g, &raw)?;
            if cs.verified(tol) {
                return Ok(cs);
            }
        }
        let worst = |m: &[f64; 3]| m.iter().cloned().fold(0.0, f64::max);
        if best.is_none_or(|b| worst(&max) < worst(&b)) {
            best = Some(max);
        }
    }
    let best = best.unwrap_or_default();
    Err(Error::SolverNonConvergence(
        FAMILIES
            .iter()
            .zip(best)
            .map(|(k, v)| format!("{k}={v:.3e}"))
            .collect::<Vec<_>>()
            .join(", "),
    ))
}

/// Levenberg–Marquardt on `½|f(x)|²` with a central-difference Jacobian.
fn levenberg_marquardt(f: &dyn Fn(&[f64]) -> Vec<f64>, mut x: Vec<f64>, max_iter: usize) -> Vec<f64> {
    let n = x.len();
    let cost = |r: &[f64]| r.iter().map(|v| v * v).sum::<f64>();
    let mut r = f(&x);
    let mut c = cost(&r);
    let mut lambda = 1e-3;
    for _ in 0..max_iter {
        if c < 1e-30 {
            break;
        }
        let m = r.len();
        let mut jac = DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = 1e-6 * x[j].abs().max(1.0);
            let mut xp = x.clone();
            xp[j] += h;
            let fp = f(&xp);
            xp[j] = x[j] - h;
            let fm = f(&xp);
            for i in 0..m {
                jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
            }
        }
        let jt = jac.transpose();
        let a = &jt * &jac;
        let g = &jt * DVector::from_column_slice(&r);
        let scale = a.diagonal().max().max(1e-300);
        let mut improved = false;
        for _ in 0..30 {
            let mut damped = a.clone();
            for i in 0..n {
                damped[(i, i)] += lambda * scale;
            }
            let Some(chol) = damped.cholesky() else {
                lambda *= 10.0;
                continue;
            };
            let step = chol.solve(&(-&g));
            let xn: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            let rn = f(&xn);
            let cn = cost(&rn);
            if cn < c {
                let tiny = step.norm() < 1e-15 * (1.0 + DVector::from_column_slice(&x).norm());
                x = xn;
                r = rn;
                c = cn;
                lambda = (lambda / 3.0).max(1e-15);
                improved = !tiny;
                break;
            }
            lambda *= 4.0;
        }
        if !improved {
            break;
        }
    }
    x
}

// ---------------------------------------------------------------------------
// files

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellEntry {
    tri: [String; 3],
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CellFile {
    graph: String,
    cells: Vec<CellEntry>,
    residuals: BTreeMap<String, f64>,
    seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    checksum: Option<String>,
}

fn checksum(cells: &[CellEntry]) -> Result<String> {
    let digest = Sha256::digest(serde_json::to_string(cells)?.as_bytes());
    Ok(digest.iter().map(|b| format!("{b:02x}")).collect())
}

/// Serialises a cell system; output is deterministic.
pub fn cells_to_json(g: &GraphSpec, cells: &CellSystem) -> Result<String> {
    let entries: Vec<CellEntry> = cells
        .triangles
        .iter()
        .zip(&cells.values)
        .map(|(t, v)| CellEntry {
            tri: t.0.map(|x| g.vertex(x).id.clone()),
            re: v.re,
            im: v.im,
        })
        .collect();
    let file = CellFile {
        graph: cells.graph.clone(),
        checksum: Some(checksum(&entries)?),
        cells: entries,
        residuals: cells.residuals.clone(),
        seed: cells.seed,
    };
    Ok(serde_json::to_string_pretty(&file)? + "\n")
}

pub fn save_cells(g: &GraphSpec, cells: &CellSystem, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, cells_to_json(g, cells)?)?;
    Ok(())
}

pub fn load_cells(g: &GraphSpec, path: impl AsRef<Path>) -> Result<CellSystem> {
    let text = std::fs::read_to_string(path.as_ref())?;
    cells_from_json(g, &text)
        .map_err(|e| Error::CellFile(format!("{}: {e}", path.as_ref().display())))
}

/// Parses a cell file. Cells that fail the constraints at [`DEFAULT_TOL`]
/// still load, with a warning per failing family.
pub fn cells_from_json(g: &GraphSpec, text: &str) -> Result<CellSystem> {
    let file: CellFile =
        serde_json::from_str(text).map_err(|e| Error::CellFile(format!("schema: {e}")))?;
    if !file.graph.eq_ignore_ascii_case(g.name()) {
        return Err(Error::CellFile(format!(
            "file is for graph `{}`, not `{}`",
            file.graph,
            g.name()
        )));
    }
    if let Some(sum) = &file.checksum {
        if *sum != checksum(&file.cells)? {
            return Err(Error::CellFile("checksum mismatch".into()));
        }
    }
    let triangles = enumerate_triangles(g);
    let index = TriangleIndex::new(&triangles);
    let mut values = vec![None; triangles.len()];
    for e in &file.cells {
        let v = e
            .tri
            .iter()
            .map(|k| g.find_vertex(k))
            .collect::<Result<Vec<_>>>()?;
        let i = index.get(v[0], v[1], v[2]).ok_or_else(|| {
            Error::CellFile(format!("({} {} {}) is not a triangle", e.tri[0], e.tri[1], e.tri[2]))
        })?;
        if values[i].replace(Complex64::new(e.re, e.im)).is_some() {
            return Err(Error::CellFile(format!(
                "triangle {} listed twice",
                triangles[i].display(g)
            )));
        }
    }
    let values = values
        .into_iter()
        .enumerate()
        .map(|(i, v)| v.ok_or_else(|| Error::MissingCells(triangles[i].display(g))))
        .collect::<Result<Vec<_>>>()?;
    let checked = cell_residuals(g, &values)?;
    let warnings = checked
        .iter()
        .filter(|(_, &r)| !(r < DEFAULT_TOL))
        .map(|(k, r)| format!("{k} residual {r:.3e} exceeds {DEFAULT_TOL:e}"))
        .collect();
    Ok(CellSystem {
        graph: g.name().to_string(),
        triangles,
        values,
        residuals: file.residuals,
        seed: file.seed,
        warnings,
        index,
    })
}

fn builtin_cell_text(name: &str) -> Option<&'static str> {
    Some(match name {
        "a2" => include_str!("../cells/a2.json"),
        "a3" => include_str!("../cells/a3.json"),
        "a4" => include_str!("../cells/a4.json"),
        "a5" => include_str!("../cells/a5.json"),
        "e5" => include_str!("../cells/e5.json"),
        _ => return None,
    })
}

/// Cells for `g`: from [`CELLS_DIR_ENV`] when it holds a file for the
/// graph, otherwise the copy compiled into the crate.
pub fn shipped_cells(g: &GraphSpec) -> Result<CellSystem> {
    let name = g.name().to_ascii_lowercase();
    if let Some(dir) = std::env::var_os(CELLS_DIR_ENV) {
        let path = PathBuf::from(dir).join(format!("{name}.json"));
        if path.exists() {
            return load_cells(g, path);
        }
    }
    let text = builtin_cell_text(&name).ok_or_else(|| Error::MissingCells(g.name().into()))?;
    cells_from_json(g, text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_a_graph, build_e5_graph};

    const PHI: f64 = 1.618_033_988_749_895;

    #[test]
    fn triangle_counts() {
        let a2 = build_a_graph(2);
        let names: Vec<String> = enumerate_triangles(&a2).iter().map(|t| t.display(&a2)).collect();
        assert_eq!(names, ["(1 3 3b)", "(3b 8 6b)", "(3b 8 3)", "(3 6 8)"]);
        assert_eq!(enumerate_triangles(&build_e5_graph()).len(), 14);
        assert!(enumerate_triangles(&build_a_graph(0)).is_empty());
        for k in 1..=5 {
            assert_eq!(enumerate_triangles(&build_a_graph(k)).len() as u32, k * k);
        }
    }

    #[test]
    fn collapsed_cells() {
        let g = build_a_graph(2);
        let sp = spectral_data(&g).unwrap();
        let v = |k| g.find_vertex(k).unwrap();
        assert!((collapsed_cell(&g, &sp, v("3"), v("3b")).unwrap() - PHI).abs() < 1e-12);
        assert!(collapsed_cell(&g, &sp, v("1"), v("8")).is_err());
        let e = build_e5_graph();
        let se = spectral_data(&e).unwrap();
        let c = collapsed_cell(&e, &se, e.find_vertex("1_0").unwrap(), e.find_vertex("2_1").unwrap()).unwrap();
        assert!((c - (1.0 + 2f64.sqrt()).sqrt()).abs() < 1e-10);
        for &(a, b) in e.sigma_edges() {
            assert_eq!(collapsed_cell(&e, &se, a, b).unwrap(), collapsed_cell(&e, &se, b, a).unwrap());
        }
    }

    #[test]
    fn shipped_a2_is_canonical() {
        let g = build_a_graph(2);
        let cs = shipped_cells(&g).unwrap();
        assert!(cs.warnings.is_empty());
        let v = |k| g.find_vertex(k).unwrap();
        let t = |a, b, c| cs.value(v(a), v(b), v(c)).unwrap();
        assert!((t("1", "3", "3b") - PHI).norm() < 1e-9);
        assert!((t("3", "6", "8") - PHI).norm() < 1e-9);
        assert!((t("3b", "8", "6b") - PHI).norm() < 1e-9);
        assert!((t("3", "3b", "8") - PHI.sqrt()).norm() < 1e-9);
    }

    #[test]
    fn shipped_e5_gauge() {
        let g = build_e5_graph();
        let cs = shipped_cells(&g).unwrap();
        assert!(cs.warnings.is_empty());
        let neg = cs.values().iter().filter(|v| v.re < 0.0).count();
        let real = cs.values().iter().all(|v| v.im == 0.0);
        assert!(real);
        assert_eq!(neg, 1);
    }

    #[test]
    fn sum_rule_holds_for_shipped() {
        for name in crate::graphs::BUILTIN_GRAPHS {
            let g = crate::graphs::builtin_graph(name).unwrap();
            let cs = shipped_cells(&g).unwrap();
            let r = cell_residuals(&g, cs.values()).unwrap();
            assert!(r["sum_rule"] < 1e-9, "{name}: {r:?}");
        }
    }

    #[test]
    fn gauge_keeps_residuals() {
        let g = build_e5_graph();
        let cs = shipped_cells(&g).unwrap();
        let before = cell_residuals(&g, cs.values()).unwrap();
        let t = gauge_transform(&cs, &GaugePhases::random(&g, 7)).unwrap();
        let after = cell_residuals(&g, t.values()).unwrap();
        for k in FAMILIES {
            assert!((before[k] - after[k]).abs() < 1e-12);
        }
        for (a, b) in cs.values().iter().zip(t.values()) {
            assert!((a.norm() - b.norm()).abs() < 1e-12);
        }
        assert_eq!(gauge_transform(&cs, &GaugePhases::identity(&g)).unwrap(), cs);
        assert_eq!(t.residuals, cs.residuals);
    }

    #[test]
    fn canonical_gauge_is_idempotent_on_a2() {
        let g = build_a_graph(2);
        let cs = shipped_cells(&g).unwrap();
        let t = gauge_transform(&cs, &GaugePhases::random(&g, 3)).unwrap();
        let back = canonical_gauge(&g, &t).unwrap();
        for (a, b) in cs.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn solve_a2_deterministic() {
        let g = build_a_graph(2);
        let a = solve_cells(&g, 11, DEFAULT_TOL).unwrap();
        let b = solve_cells(&g, 11, DEFAULT_TOL).unwrap();
        assert_eq!(cells_to_json(&g, &a).unwrap(), cells_to_json(&g, &b).unwrap());
        let shipped = shipped_cells(&g).unwrap();
        for (x, y) in a.values().iter().zip(shipped.values()) {
            assert!((x - y).norm() < 1e-8);
        }
    }

    #[test]
    fn solve_without_triangles() {
        assert!(matches!(
            solve_cells(&build_a_graph(0), 0, DEFAULT_TOL),
            Err(Error::NoTriangles)
        ));
    }

    #[test]
    fn file_round_trip_and_errors() {
        let g = build_a_graph(2);
        let cs = shipped_cells(&g).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("a2.json");
        save_cells(&g, &cs, &path).unwrap();
        assert_eq!(load_cells(&g, &path).unwrap(), cs);

        let text = cells_to_json(&g, &cs).unwrap();
        let tampered = text.replacen("\"re\": 1.6", "\"re\": 1.7", 1);
        assert!(tampered != text);
        assert!(cells_from_json(&g, &tampered).is_err());

        let bad = r#"{"graph":"a2","cells":[{"tri":["1","3","8"],"re":1.0,"im":0.0}],"residuals":{},"seed":0}"#;
        assert!(matches!(cells_from_json(&g, bad), Err(Error::CellFile(_))));
        assert!(cells_from_json(&g, r#"{"graph":"a2"}"#).is_err());

        let zero = cells_to_json(&g, &CellSystem::zero(&g)).unwrap();
        let z = cells_from_json(&g, &zero).unwrap();
        assert!(!z.warnings.is_empty());
    }
}
