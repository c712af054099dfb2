//! Essential paths (joint kernels of all annihilation and cup operators),
//! the decomposition of a path space into essential and raised parts, and
//! the greedy factorizer that peels backtracks off an elementary path.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fusion::fusion_matrix;
use crate::linalg::{column_span, hstack, max_abs, null_space, projector, vstack, CMatrix, NullSpace, RANK_TOL};
use crate::operators::{annihilation_word, cup_word, CapOrder, PathAlgebra, RELATION_TOL};
use crate::paths::{concatenate, EdgeTag, ElementaryPath, PathGrading, PathSpace, PathVector, Word};

/// Stacked matrices of every `C_i` (equal tags at `i, i+1`) and every `∪_i`
/// (mixed tags) that can act on the grading.
pub fn constraint_matrix(alg: &PathAlgebra, grading: &PathGrading) -> Result<CMatrix> {
    let d = alg.space(grading)?.dim();
    let tags = grading.word.tags();
    let mut blocks = Vec::new();
    for i in 1..grading.len() {
        let op = if tags[i - 1] == tags[i] {
            alg.annihilation(grading, i)?
        } else {
            alg.cup(grading, i)?
        };
        blocks.push(op.matrix);
    }
    Ok(vstack(&blocks, d))
}

/// Joint kernel of [`constraint_matrix`], ignoring the length clause.
pub fn joint_kernel(alg: &PathAlgebra, grading: &PathGrading) -> Result<NullSpace> {
    Ok(null_space(&constraint_matrix(alg, grading)?, RANK_TOL))
}

#[derive(Debug, Clone)]
pub struct EssentialBasis {
    pub grading: PathGrading,
    /// Orthonormal essential vectors; empty when excluded by length.
    pub vectors: Vec<PathVector>,
    pub dim: usize,
    /// Dimension of the joint kernel before the length clause is applied.
    pub kernel_dim: usize,
    /// `α+β` exceeds the level, so kernel vectors are not counted as essential.
    pub excluded_by_length_clause: bool,
    pub singular_values: Vec<f64>,
    pub gap: Option<f64>,
}

impl EssentialBasis {
    pub fn space(&self) -> Option<&Arc<PathSpace>> {
        self.vectors.first().map(|v| v.space())
    }
}

fn columns_to_vectors(space: &Arc<PathSpace>, m: &CMatrix) -> Result<Vec<PathVector>> {
    m.column_iter()
        .map(|c| PathVector::new(space.clone(), c.into_owned()))
        .collect()
}

pub fn essential_basis(alg: &PathAlgebra, grading: &PathGrading) -> Result<EssentialBasis> {
    let space = alg.space(grading)?;
    let ns = joint_kernel(alg, grading)?;
    let (a, b) = grading.path_type();
    let excluded = a + b > alg.graph().level();
    let vectors = if excluded {
        Vec::new()
    } else {
        columns_to_vectors(&space, &ns.basis)?
    };
    Ok(EssentialBasis {
        grading: grading.clone(),
        dim: vectors.len(),
        vectors,
        kernel_dim: ns.dim(),
        excluded_by_length_clause: excluded,
        singular_values: ns.singular_values,
        gap: ns.gap,
    })
}

/// Relative distance of a combination of paths (possibly spread over several
/// words with common endpoints) from the direct sum of their joint kernels.
pub fn kernel_membership(alg: &PathAlgebra, terms: &[(ElementaryPath, Complex64)]) -> Result<f64> {
    let mut by_grading: BTreeMap<PathGrading, Vec<(ElementaryPath, Complex64)>> = BTreeMap::new();
    for (p, c) in terms {
        by_grading.entry(p.grading()).or_default().push((p.clone(), *c));
    }
    let mut off = 0.0;
    let mut norm = 0.0;
    for (gr, ts) in by_grading {
        let v = PathVector::from_terms(alg.space(&gr)?, &ts)?;
        let k = joint_kernel(alg, &gr)?.basis;
        let x = v.coefficients();
        let proj = &k * (k.adjoint() * x);
        off += (x - proj).norm_squared();
        norm += v.norm_squared();
    }
    Ok(if norm == 0.0 { 0.0 } else { (off / norm).sqrt() })
}

#[derive(Debug, Clone, Serialize)]
pub struct WordDims {
    pub word: String,
    /// `dims[a][b]` = essential dimension from `a` to `b` in this word.
    pub dims: Vec<Vec<usize>>,
    pub total: usize,
    pub matches_fusion: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct EssentialDims {
    pub path_type: (u32, u32),
    pub words: Vec<WordDims>,
    /// Sum over words.
    pub totals: Vec<Vec<usize>>,
    pub total: usize,
    pub fusion: Vec<Vec<i64>>,
    pub per_word_matches_fusion: bool,
}

pub fn essential_dims(alg: &PathAlgebra, path_type: (u32, u32)) -> Result<EssentialDims> {
    let g = alg.graph();
    let n = g.len();
    let f = fusion_matrix(g, path_type)?;
    let fusion: Vec<Vec<i64>> = (0..n).map(|a| (0..n).map(|b| f.get(a, b)).collect()).collect();
    let mut totals = vec![vec![0; n]; n];
    let mut words = Vec::new();
    for word in Word::all_of_type(path_type.0, path_type.1) {
        let mut dims = vec![vec![0; n]; n];
        for a in 0..n {
            for b in 0..n {
                let gr = PathGrading::new(a, b, word.clone());
                if crate::paths::path_space_dim(g, &gr) == 0 {
                    continue;
                }
                dims[a][b] = essential_basis(alg, &gr)?.dim;
                totals[a][b] += dims[a][b];
            }
        }
        let matches = (0..n).all(|a| (0..n).all(|b| dims[a][b] as i64 == fusion[a][b]));
        words.push(WordDims {
            word: word.to_string(),
            total: dims.iter().flatten().sum(),
            dims,
            matches_fusion: matches,
        });
    }
    Ok(EssentialDims {
        path_type,
        per_word_matches_fusion: words.iter().all(|w| w.matches_fusion),
        total: totals.iter().flatten().sum(),
        totals,
        fusion,
        words,
    })
}

// ---------------------------------------------------------------------------
// decomposition

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionResiduals {
    pub hermitian: f64,
    pub idempotent: f64,
    pub orthogonal: f64,
    pub completeness: f64,
    /// Largest overlap between essential and raised basis vectors.
    pub essential_raised_overlap: f64,
}

impl DecompositionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.hermitian,
            self.idempotent,
            self.orthogonal,
            self.completeness,
            self.essential_raised_overlap,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionReport {
    pub grading: String,
    pub dim_total: usize,
    /// Essential dimension after the length clause.
    pub dim_essential: usize,
    /// Kernel vectors beyond the level (counted with the base, not as essential).
    pub dim_excluded_kernel: usize,
    /// Rank added by each raising generation, starting at generation 1.
    pub raised_dims: Vec<usize>,
    pub rank_raised: usize,
    #[serde(skip)]
    pub base_projector: CMatrix,
    #[serde(skip)]
    pub raised_projector: CMatrix,
    pub residuals: DecompositionResiduals,
}

/// Memoised generation sets, shared across gradings with the same endpoints.
pub struct Decomposer<'a> {
    alg: &'a PathAlgebra,
    kernels: HashMap<PathGrading, CMatrix>,
    generations: HashMap<(PathGrading, usize), CMatrix>,
}

impl<'a> Decomposer<'a> {
    pub fn new(alg: &'a PathAlgebra) -> Self {
        Self {
            alg,
            kernels: HashMap::new(),
            generations: HashMap::new(),
        }
    }

    fn kernel(&mut self, gr: &PathGrading) -> Result<CMatrix> {
        if let Some(k) = self.kernels.get(gr) {
            return Ok(k.clone());
        }
        let k = joint_kernel(self.alg, gr)?.basis;
        self.kernels.insert(gr.clone(), k.clone());
        Ok(k)
    }

    /// Orthonormal basis of generation `j`: images under one creation or
    /// cap of generation `j-1` of every word one raising step below.
    fn generation(&mut self, gr: &PathGrading, j: usize) -> Result<CMatrix> {
        if j == 0 {
            return self.kernel(gr);
        }
        let key = (gr.clone(), j);
        if let Some(m) = self.generations.get(&key) {
            return Ok(m.clone());
        }
        let d = self.alg.space(gr)?.dim();
        let tags = gr.word.tags();
        let mut images = Vec::new();
        for i in 1..gr.len() {
            let (lower, op) = if tags[i - 1] == tags[i] {
                let lower = gr.with_word(annihilation_word(&gr.word, i));
                let op = self.alg.creation(&lower, i)?;
                (lower, op)
            } else {
                let lower = gr.with_word(cup_word(&gr.word, i));
                let op = self.alg.cap(&lower, i, CapOrder::of(tags[i - 1]))?;
                (lower, op)
            };
            if self.alg.space(&lower)?.dim() == 0 {
                continue;
            }
            let prev = self.generation(&lower, j - 1)?;
            if prev.ncols() > 0 {
                images.push(&op.matrix * prev);
            }
        }
        let span = column_span(&hstack(&images, d), RANK_TOL);
        self.generations.insert(key, span.clone());
        Ok(span)
    }

    pub fn decompose(&mut self, gr: &PathGrading) -> Result<DecompositionReport> {
        let alg = self.alg;
        let d = alg.space(gr)?.dim();
        let kernel = self.kernel(gr)?;
        let (a, b) = gr.path_type();
        let excluded = a + b > alg.graph().level();

        let mut raised = CMatrix::zeros(d, 0);
        let mut raised_dims = Vec::new();
        for j in 1..=gr.len() {
            let gen = self.generation(gr, j)?;
            let joined = column_span(&hstack(&[raised.clone(), gen], d), RANK_TOL);
            raised_dims.push(joined.ncols() - raised.ncols());
            raised = joined;
        }
        let rank_raised = raised.ncols();
        let pk = projector(&kernel, d);
        let pr = projector(&raised, d);
        let id = CMatrix::identity(d, d);
        let residuals = DecompositionResiduals {
            hermitian: max_abs(&(&pk - pk.adjoint())).max(max_abs(&(&pr - pr.adjoint()))),
            idempotent: max_abs(&(&pk * &pk - &pk)).max(max_abs(&(&pr * &pr - &pr))),
            orthogonal: max_abs(&(&pk * &pr)),
            completeness: max_abs(&(&pk + &pr - &id)),
            essential_raised_overlap: max_abs(&(kernel.adjoint() * &raised)),
        };
        let label = gr.display(alg.graph());
        if kernel.ncols() + rank_raised != d {
            return Err(Error::RankDeficiency(format!(
                "{label}: {} kernel + {} raised != {} total (completeness residual {:.3e})",
                kernel.ncols(),
                rank_raised,
                d,
                residuals.completeness
            )));
        }
        Ok(DecompositionReport {
            grading: label,
            dim_total: d,
            dim_essential: if excluded { 0 } else { kernel.ncols() },
            dim_excluded_kernel: if excluded { kernel.ncols() } else { 0 },
            raised_dims,
            rank_raised,
            base_projector: pk,
            raised_projector: pr,
            residuals,
        })
    }
}

pub fn decompose_space(alg: &PathAlgebra, grading: &PathGrading) -> Result<DecompositionReport> {
    Decomposer::new(alg).decompose(grading)
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionSweep {
    pub gradings: usize,
    pub max_residual: f64,
    pub worst_grading: Option<String>,
    pub failures: Vec<String>,
    pub passed: bool,
}

/// Decomposes every grading with `|word| ≤ max_len`.
pub fn decomposition_sweep(alg: &PathAlgebra, max_len: usize) -> Result<DecompositionSweep> {
    let mut dec = Decomposer::new(alg);
    let mut sweep = DecompositionSweep {
        gradings: 0,
        max_residual: 0.0,
        worst_grading: None,
        failures: Vec::new(),
        passed: true,
    };
    for gr in alg.gradings(max_len) {
        sweep.gradings += 1;
        match dec.decompose(&gr) {
            Ok(r) => {
                let m = r.residuals.max();
                if m > sweep.max_residual || sweep.worst_grading.is_none() {
                    sweep.max_residual = sweep.max_residual.max(m);
                    sweep.worst_grading = Some(r.grading.clone());
                }
                if !(m < RELATION_TOL) {
                    sweep.failures.push(format!("{}: residual {m:.3e}", r.grading));
                }
            }
            Err(e) => sweep.failures.push(e.to_string()),
        }
    }
    sweep.passed = sweep.failures.is_empty();
    Ok(sweep)
}

// ---------------------------------------------------------------------------
// factorization

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum PeelKind {
    Creation,
    Cap(CapOrder),
}

#[derive(Debug, Clone)]
pub struct Peel {
    /// 1-based position of the raising operator on `reduced`.
    pub position: usize,
    pub kind: PeelKind,
    /// Vertices removed from `prefix` (one for a creation, two for a cap).
    pub removed: Vec<usize>,
    pub prefix: ElementaryPath,
    pub reduced: ElementaryPath,
    pub suffix: ElementaryPath,
    /// Coefficient of `prefix` in the raising operator applied to `reduced`.
    pub weight: Complex64,
}

#[derive(Debug, Clone)]
pub struct FactorizationRecord {
    pub original: ElementaryPath,
    pub peels: Vec<Peel>,
    pub core: ElementaryPath,
    /// The core lies in the joint kernel of its grading.
    pub core_in_kernel: bool,
    /// The core is longer than the level allows for essential paths.
    pub core_beyond_level: bool,
}

/// Positions `k` (1-based) where steps `k, k+1` form a collapsible pattern:
/// equal tags closing a triangle, or a return pair.
pub fn collapsible_positions(alg: &PathAlgebra, p: &ElementaryPath) -> Vec<usize> {
    let g = alg.graph();
    let v = p.vertices();
    let t = p.word().tags();
    (1..p.len())
        .filter(|&k| {
            let (x, y, z) = (v[k - 1], v[k], v[k + 1]);
            if t[k - 1] != t[k] {
                return x == z;
            }
            let cell = match t[k - 1] {
                EdgeTag::Sigma if g.has_arrow(z, x) => alg.cells().value(x, y, z),
                EdgeTag::SigmaBar if g.has_arrow(x, z) => alg.cells().value(z, y, x),
                _ => None,
            };
            cell.is_some_and(|c| c.norm() > 0.0)
        })
        .collect()
}

fn unit(alg: &PathAlgebra, p: &ElementaryPath) -> Result<PathVector> {
    PathVector::basis_vector(alg.space(&p.grading())?, p)
}

fn raise(alg: &PathAlgebra, kind: PeelKind, k: usize, v: &PathVector) -> Result<PathVector> {
    let op = match kind {
        PeelKind::Creation => alg.creation(v.grading(), k)?,
        PeelKind::Cap(order) => alg.cap(v.grading(), k, order)?,
    };
    op.apply(v)
}

/// `v • suffix`, term by term.
pub fn concatenate_vector(alg: &PathAlgebra, v: &PathVector, suffix: &ElementaryPath) -> Result<PathVector> {
    let gr = v.grading();
    if gr.to != suffix.start() {
        return Err(Error::InvalidPath("suffix does not start where the vector ends".into()));
    }
    let mut word = gr.word.0.clone();
    word.extend_from_slice(&suffix.word().0);
    let target = alg.space(&PathGrading::new(gr.from, suffix.end(), Word(word)))?;
    let mut terms = Vec::new();
    for (p, c) in v.terms(0.0) {
        terms.push((concatenate(p, suffix).expect("endpoints match"), c));
    }
    PathVector::from_terms(target, &terms)
}

pub fn factorize_path(alg: &PathAlgebra, p: &ElementaryPath) -> Result<FactorizationRecord> {
    let mut cur = p.clone();
    let mut peels = Vec::new();
    loop {
        let pats = collapsible_positions(alg, &cur);
        let Some(&last) = pats.last() else { break };
        let n = cur.len();
        let prefix = cur.segment(0, last + 1);
        let suffix = cur.segment(last + 1, n);
        let k = collapsible_positions(alg, &prefix)[0];
        let t = prefix.word().tags();
        let v = prefix.vertices();
        let (kind, removed, reduced) = if t[k - 1] == t[k] {
            let mut vs = v.to_vec();
            vs.remove(k);
            let w = annihilation_word(prefix.word(), k);
            (PeelKind::Creation, vec![v[k]], ElementaryPath::new(alg.graph(), vs, w)?)
        } else {
            let mut vs = v[..k].to_vec();
            vs.extend_from_slice(&v[k + 2..]);
            let w = cup_word(prefix.word(), k);
            (
                PeelKind::Cap(CapOrder::of(t[k - 1])),
                vec![v[k], v[k + 1]],
                ElementaryPath::new(alg.graph(), vs, w)?,
            )
        };
        let weight = raise(alg, kind, k, &unit(alg, &reduced)?)?.coefficient(&prefix);
        peels.push(Peel {
            position: k,
            kind,
            removed,
            prefix,
            reduced: reduced.clone(),
            suffix,
            weight,
        });
        cur = reduced;
    }
    let gr = cur.grading();
    let kernel_residual = {
        let m = constraint_matrix(alg, &gr)?;
        let e = unit(alg, &cur)?;
        max_abs(&(m * e.coefficients()))
    };
    let (a, b) = cur.path_type();
    Ok(FactorizationRecord {
        original: p.clone(),
        peels,
        core_in_kernel: kernel_residual < RELATION_TOL,
        core_beyond_level: a + b > alg.graph().level(),
        core: cur,
    })
}

/// Rebuilds the vector `raise_1(… raise_m(core) • suffix_m …) • suffix_1`.
pub fn replay(alg: &PathAlgebra, rec: &FactorizationRecord) -> Result<PathVector> {
    let mut v = unit(alg, &rec.core)?;
    for peel in rec.peels.iter().rev() {
        v = raise(alg, peel.kind, peel.position, &v)?;
        v = concatenate_vector(alg, &v, &peel.suffix)?;
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cells::shipped_cells;
    use crate::graphs::{build_a_graph, build_e5_graph, GraphSpec};

    fn algebra(g: GraphSpec) -> PathAlgebra {
        let cells = shipped_cells(&g).unwrap();
        PathAlgebra::new(g, cells).unwrap()
    }

    fn gr(alg: &PathAlgebra, a: &str, b: &str, w: &str) -> PathGrading {
        let g = alg.graph();
        PathGrading::new(g.find_vertex(a).unwrap(), g.find_vertex(b).unwrap(), Word::parse(w).unwrap())
    }

    #[test]
    fn a2_return_word() {
        let alg = algebra(build_a_graph(2));
        let e = essential_basis(&alg, &gr(&alg, "3", "3", "bs")).unwrap();
        assert_eq!(e.dim, 1);
        let v = &e.vectors[0];
        let phi: f64 = (1.0 + 5f64.sqrt()) / 2.0;
        let p313 = ElementaryPath::parse(alg.graph(), "3,1,3", "bs").unwrap();
        let p383 = ElementaryPath::parse(alg.graph(), "3,8,3", "bs").unwrap();
        let ratio = v.coefficient(&p383) / v.coefficient(&p313);
        assert!((ratio - Complex64::new(-(1.0 / phi).sqrt(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn a2_two_sigma() {
        let alg = algebra(build_a_graph(2));
        let e = essential_basis(&alg, &gr(&alg, "3", "8", "ss")).unwrap();
        assert_eq!(e.dim, 1);
        let v = &e.vectors[0];
        let p368 = ElementaryPath::parse(alg.graph(), "3,6,8", "ss").unwrap();
        let p338 = ElementaryPath::parse(alg.graph(), "3,3b,8", "ss").unwrap();
        let ratio = v.coefficient(&p338) / v.coefficient(&p368);
        let phi: f64 = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((ratio - Complex64::new(-phi.sqrt(), 0.0)).norm() < 1e-9);
    }

    #[test]
    fn e5_kernel_contains_example() {
        let alg = algebra(build_e5_graph());
        let p = ElementaryPath::parse(alg.graph(), "1_3,2_4,2_3,1_1", "sbs").unwrap();
        let r = kernel_membership(&alg, &[(p, Complex64::new(1.0, 0.0))]).unwrap();
        assert!(r < 1e-10);
    }

    #[test]
    fn vectors_are_orthonormal_and_annihilated() {
        let alg = algebra(build_e5_graph());
        for g in alg.gradings(3) {
            let e = essential_basis(&alg, &g).unwrap();
            let m = constraint_matrix(&alg, &g).unwrap();
            for (i, u) in e.vectors.iter().enumerate() {
                assert!(max_abs(&(&m * u.coefficients())) < 1e-8);
                for (j, w) in e.vectors.iter().enumerate() {
                    let ip = crate::paths::inner_product(u, w).unwrap();
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn a2_dims() {
        let alg = algebra(build_a_graph(2));
        let totals: Vec<usize> = [(0, 0), (1, 0), (0, 1), (2, 0), (0, 2)]
            .iter()
            .map(|&t| essential_dims(&alg, t).unwrap().total)
            .collect();
        assert_eq!(totals, [6, 9, 9, 6, 6]);
        let d = essential_dims(&alg, (1, 1)).unwrap();
        assert!(d.per_word_matches_fusion);
        assert_eq!(d.total, 18);
    }

    #[test]
    fn length_clause() {
        let alg = algebra(build_a_graph(2));
        let e = essential_basis(&alg, &gr(&alg, "1", "6b", "sbs")).unwrap();
        assert!(e.excluded_by_length_clause);
        assert!(e.vectors.is_empty());
        assert!(e.kernel_dim > 0);
    }

    #[test]
    fn small_decomposition() {
        let alg = algebra(build_a_graph(2));
        let r = decompose_space(&alg, &gr(&alg, "3", "3", "sb")).unwrap();
        assert_eq!((r.dim_total, r.dim_essential, r.rank_raised), (2, 1, 1));
        assert_eq!(r.raised_dims, [1, 0]);
        assert!(r.residuals.max() < 1e-12);
        let r = decompose_space(&alg, &gr(&alg, "3", "8", "")).unwrap();
        assert_eq!(r.dim_total, 0);
    }

    #[test]
    fn factorize_examples() {
        let alg = algebra(build_a_graph(2));
        let p = ElementaryPath::parse(alg.graph(), "3,3b,3", "sb").unwrap();
        let rec = factorize_path(&alg, &p).unwrap();
        assert_eq!(rec.peels.len(), 1);
        assert!(matches!(rec.peels[0].kind, PeelKind::Cap(_)));
        assert_eq!(rec.core.display(alg.graph()), "(3)");
        assert!(replay(&alg, &rec).unwrap().coefficient(&p).norm() > 1e-9);

        let e = ElementaryPath::parse(alg.graph(), "1,3,8", "sb").unwrap();
        let rec = factorize_path(&alg, &e).unwrap();
        assert!(rec.peels.is_empty());
        assert_eq!(rec.core, e);

        let alg = algebra(build_e5_graph());
        let p = ElementaryPath::parse(alg.graph(), "1_3,2_4,2_3,2_2", "sbb").unwrap();
        let rec = factorize_path(&alg, &p).unwrap();
        assert_eq!(rec.peels.len(), 1);
        assert_eq!(rec.peels[0].kind, PeelKind::Creation);
        assert_eq!(rec.peels[0].position, 2);
        assert_eq!(rec.core.display(alg.graph()), "(1_3 2_4 2_2)");
        assert!(replay(&alg, &rec).unwrap().coefficient(&p).norm() > 1e-9);
    }
}
