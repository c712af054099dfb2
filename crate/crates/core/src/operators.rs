//! Creation, annihilation, cup and cap operators as matrices between
//! word-graded path spaces, and the Temperley–Lieb checks built from them.
//!
//! Positions are 1-based and count steps: step `k` goes `v_{k-1} -> v_k`.
//! `C_i` collapses steps `i, i+1`; `C†_i` expands step `i` (the new vertex
//! lands at index `i`), so `C†_i` is the exact adjoint of `C_i` on the
//! longer space. `∪_i` removes a return pair at steps `i, i+1` and `∩_i`
//! inserts one after `v_{i-1}`.

use std::collections::HashMap;
use std::fmt;
use std::sync::{Arc, Mutex};

use num_complex::Complex64;
use serde::Serialize;

use crate::cells::{CellSystem, TriangleIndex};
use crate::error::{Error, Result};
use crate::graphs::{spectral_data, GraphSpec, SpectralData};
use crate::linalg::{max_abs, CMatrix};
use crate::paths::{EdgeTag, PathGrading, PathSpace, PathVector, Word};

/// Residual threshold used by every pass/fail decision on operator relations.
pub const RELATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum OperatorKind {
    Annihilation,
    Creation,
    Cup,
    Cap,
    U,
    F,
    Composite,
}

/// Tag order of the return pair inserted by a cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum CapOrder {
    /// `σ` out along an arrow `a -> b`, then `σ̄` back.
    SigmaFirst,
    /// `σ̄` out against an arrow `b -> a`, then `σ` back.
    SigmaBarFirst,
}

impl CapOrder {
    pub fn tags(self) -> [EdgeTag; 2] {
        match self {
            CapOrder::SigmaFirst => [EdgeTag::Sigma, EdgeTag::SigmaBar],
            CapOrder::SigmaBarFirst => [EdgeTag::SigmaBar, EdgeTag::Sigma],
        }
    }

    pub fn of(first: EdgeTag) -> Self {
        match first {
            EdgeTag::Sigma => CapOrder::SigmaFirst,
            EdgeTag::SigmaBar => CapOrder::SigmaBarFirst,
        }
    }
}

/// One matrix entry whose value is `scale · T[tri]` (or its conjugate).
/// Kept symbolic so the cell solver can re-evaluate operators cheaply.
#[derive(Debug, Clone, Copy)]
pub(crate) struct StencilEntry {
    pub row: usize,
    pub col: usize,
    pub tri: usize,
    pub conj: bool,
    pub scale: f64,
}

#[derive(Debug, Clone)]
pub(crate) struct Stencil {
    pub nrows: usize,
    pub ncols: usize,
    pub entries: Vec<StencilEntry>,
}

impl Stencil {
    pub fn assemble(&self, cells: &[Complex64]) -> CMatrix {
        let mut m = CMatrix::zeros(self.nrows, self.ncols);
        for e in &self.entries {
            let t = if e.conj { cells[e.tri].conj() } else { cells[e.tri] };
            m[(e.row, e.col)] += t * e.scale;
        }
        m
    }
}

/// Codomain word of `C_i`: steps `i, i+1` become one step of the opposite tag.
/// For mixed tags the operator is zero; the codomain then uses the opposite of tag `i`.
pub fn annihilation_word(word: &Word, i: usize) -> Word {
    let t = word.tags();
    let mut out = t[..i - 1].to_vec();
    out.push(t[i - 1].opposite());
    out.extend_from_slice(&t[i + 1..]);
    Word(out)
}

/// Codomain word of `C†_i`: step `i` becomes two steps of the opposite tag.
pub fn creation_word(word: &Word, i: usize) -> Word {
    let t = word.tags();
    let mut out = t[..i - 1].to_vec();
    out.push(t[i - 1].opposite());
    out.push(t[i - 1].opposite());
    out.extend_from_slice(&t[i..]);
    Word(out)
}

pub fn cup_word(word: &Word, i: usize) -> Word {
    let t = word.tags();
    let mut out = t[..i - 1].to_vec();
    out.extend_from_slice(&t[i + 1..]);
    Word(out)
}

pub fn cap_word(word: &Word, i: usize, order: CapOrder) -> Word {
    let t = word.tags();
    let mut out = t[..i - 1].to_vec();
    out.extend_from_slice(&order.tags());
    out.extend_from_slice(&t[i - 1..]);
    Word(out)
}

fn check_position(op: &'static str, i: usize, max: usize) -> Result<()> {
    if i == 0 || i > max {
        return Err(Error::PositionOutOfRange {
            op,
            position: i,
            max,
        });
    }
    Ok(())
}

/// Entries of `C_i : dom -> cod`.
pub(crate) fn annihilation_stencil(
    g: &GraphSpec,
    mu: &[f64],
    tris: &TriangleIndex,
    dom: &PathSpace,
    cod: &PathSpace,
    i: usize,
) -> Stencil {
    let tags = dom.grading().word.tags();
    let mut entries = Vec::new();
    if tags[i - 1] == tags[i] {
        for (col, p) in dom.basis().iter().enumerate() {
            let v = p.vertices();
            let (x, y, z) = (v[i - 1], v[i], v[i + 1]);
            let (tri, conj) = match tags[i - 1] {
                EdgeTag::Sigma if g.has_arrow(z, x) => (tris.get(x, y, z), false),
                EdgeTag::SigmaBar if g.has_arrow(x, z) => (tris.get(z, y, x), true),
                _ => continue,
            };
            let Some(tri) = tri else { continue };
            let mut w = v.to_vec();
            w.remove(i);
            let row = cod.index_of(&w).expect("collapsed path lies in codomain");
            entries.push(StencilEntry {
                row,
                col,
                tri,
                conj,
                scale: 1.0 / (mu[x] * mu[z]).sqrt(),
            });
        }
    }
    Stencil {
        nrows: cod.dim(),
        ncols: dom.dim(),
        entries,
    }
}

#[derive(Debug, Clone)]
pub struct LinearOperator {
    pub domain: Arc<PathSpace>,
    pub codomain: Arc<PathSpace>,
    /// Rows index the codomain basis, columns the domain basis.
    pub matrix: CMatrix,
    pub kind: OperatorKind,
    pub position: usize,
}

impl LinearOperator {
    pub fn domain_grading(&self) -> &PathGrading {
        self.domain.grading()
    }

    pub fn codomain_grading(&self) -> &PathGrading {
        self.codomain.grading()
    }

    pub fn is_zero(&self) -> bool {
        self.matrix.iter().all(|c| *c == Complex64::default())
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &LinearOperator) -> Result<LinearOperator> {
        if inner.codomain_grading() != self.domain_grading() {
            return Err(Error::GradingMismatch(
                inner.codomain_grading().to_string(),
                self.domain_grading().to_string(),
            ));
        }
        Ok(LinearOperator {
            domain: inner.domain.clone(),
            codomain: self.codomain.clone(),
            matrix: &self.matrix * &inner.matrix,
            kind: OperatorKind::Composite,
            position: self.position,
        })
    }

    pub fn adjoint(&self) -> LinearOperator {
        let kind = match self.kind {
            OperatorKind::Annihilation => OperatorKind::Creation,
            OperatorKind::Creation => OperatorKind::Annihilation,
            OperatorKind::Cup => OperatorKind::Cap,
            OperatorKind::Cap => OperatorKind::Cup,
            k => k,
        };
        LinearOperator {
            domain: self.codomain.clone(),
            codomain: self.domain.clone(),
            matrix: self.matrix.adjoint(),
            kind,
            position: self.position,
        }
    }

    pub fn apply(&self, v: &PathVector) -> Result<PathVector> {
        if v.grading() != self.domain_grading() {
            return Err(Error::GradingMismatch(
                v.grading().to_string(),
                self.domain_grading().to_string(),
            ));
        }
        PathVector::new(self.codomain.clone(), &self.matrix * v.coefficients())
    }
}

/// A graph together with its spectral data and a cell system; the factory
/// for every operator. Path spaces are cached and shared.
pub struct PathAlgebra {
    graph: GraphSpec,
    spectral: SpectralData,
    cells: CellSystem,
    spaces: Mutex<HashMap<PathGrading, Arc<PathSpace>>>,
}

impl fmt::Debug for PathAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PathAlgebra")
            .field("graph", &self.graph.name())
            .field("triangles", &self.cells.triangles().len())
            .finish()
    }
}

impl PathAlgebra {
    pub fn new(graph: GraphSpec, cells: CellSystem) -> Result<Self> {
        cells.check_graph(&graph)?;
        let spectral = spectral_data(&graph)?;
        Ok(Self {
            graph,
            spectral,
            cells,
            spaces: Mutex::new(HashMap::new()),
        })
    }

    pub fn graph(&self) -> &GraphSpec {
        &self.graph
    }

    pub fn spectral(&self) -> &SpectralData {
        &self.spectral
    }

    pub fn cells(&self) -> &CellSystem {
        &self.cells
    }

    pub fn beta(&self) -> f64 {
        self.spectral.beta
    }

    pub fn mu(&self, v: usize) -> f64 {
        self.spectral.mu[v]
    }

    pub fn space(&self, grading: &PathGrading) -> Result<Arc<PathSpace>> {
        if let Some(s) = self.spaces.lock().unwrap().get(grading) {
            return Ok(s.clone());
        }
        let s = Arc::new(PathSpace::new(&self.graph, grading.clone())?);
        self.spaces
            .lock()
            .unwrap()
            .insert(grading.clone(), s.clone());
        Ok(s)
    }

    /// `C_i`, for `1 ≤ i ≤ n-1`.
    pub fn annihilation(&self, domain: &PathGrading, i: usize) -> Result<LinearOperator> {
        check_position("annihilation", i, domain.len().saturating_sub(1))?;
        let dom = self.space(domain)?;
        let cod = self.space(&domain.with_word(annihilation_word(&domain.word, i)))?;
        let stencil = annihilation_stencil(
            &self.graph,
            &self.spectral.mu,
            self.cells.index(),
            &dom,
            &cod,
            i,
        );
        Ok(LinearOperator {
            matrix: stencil.assemble(self.cells.values()),
            domain: dom,
            codomain: cod,
            kind: OperatorKind::Annihilation,
            position: i,
        })
    }

    /// `C†_i`, for `1 ≤ i ≤ n`: expands step `i` through every completing triangle.
    ///
    /// Built by inserting vertices rather than by transposing `C_i`, so the
    /// adjointness check compares two independent constructions.
    pub fn creation(&self, domain: &PathGrading, i: usize) -> Result<LinearOperator> {
        check_position("creation", i, domain.len())?;
        let dom = self.space(domain)?;
        let cod = self.space(&domain.with_word(creation_word(&domain.word, i)))?;
        let inner = domain.word.tags()[i - 1].opposite();
        let mut m = CMatrix::zeros(cod.dim(), dom.dim());
        for (col, p) in dom.basis().iter().enumerate() {
            let v = p.vertices();
            let (x, z) = (v[i - 1], v[i]);
            for &y in inner.neighbours(&self.graph, x) {
                if !inner.allows(&self.graph, y, z) {
                    continue;
                }
                let t = match inner {
                    EdgeTag::Sigma => self.cells.value(x, y, z).map(|t| t.conj()),
                    EdgeTag::SigmaBar => self.cells.value(z, y, x),
                };
                let Some(t) = t else { continue };
                let mut w = v.to_vec();
                w.insert(i, y);
                let row = cod.index_of(&w).expect("expanded path lies in codomain");
                m[(row, col)] += t / (self.mu(x) * self.mu(z)).sqrt();
            }
        }
        Ok(LinearOperator {
            domain: dom,
            codomain: cod,
            matrix: m,
            kind: OperatorKind::Creation,
            position: i,
        })
    }

    /// `∪_i`, for `1 ≤ i ≤ n-1`.
    pub fn cup(&self, domain: &PathGrading, i: usize) -> Result<LinearOperator> {
        check_position("cup", i, domain.len().saturating_sub(1))?;
        let dom = self.space(domain)?;
        let cod = self.space(&domain.with_word(cup_word(&domain.word, i)))?;
        let mut m = CMatrix::zeros(cod.dim(), dom.dim());
        let tags = domain.word.tags();
        if tags[i - 1] != tags[i] {
            for (col, p) in dom.basis().iter().enumerate() {
                let v = p.vertices();
                if v[i - 1] != v[i + 1] {
                    continue;
                }
                let mut w = v[..i].to_vec();
                w.extend_from_slice(&v[i + 2..]);
                let row = cod.index_of(&w).expect("reduced path lies in codomain");
                m[(row, col)] += Complex64::new((self.mu(v[i]) / self.mu(v[i - 1])).sqrt(), 0.0);
            }
        }
        Ok(LinearOperator {
            domain: dom,
            codomain: cod,
            matrix: m,
            kind: OperatorKind::Cup,
            position: i,
        })
    }

    /// `∩_i` with one insertion order, for `1 ≤ i ≤ n+1`: inserts a return
    /// pair at vertex `v_{i-1}`.
    pub fn cap(&self, domain: &PathGrading, i: usize, order: CapOrder) -> Result<LinearOperator> {
        check_position("cap", i, domain.len() + 1)?;
        let dom = self.space(domain)?;
        let cod = self.space(&domain.with_word(cap_word(&domain.word, i, order)))?;
        let [out, back] = order.tags();
        let mut m = CMatrix::zeros(cod.dim(), dom.dim());
        for (col, p) in dom.basis().iter().enumerate() {
            let v = p.vertices();
            let a = v[i - 1];
            for &b in out.neighbours(&self.graph, a) {
                if !back.allows(&self.graph, b, a) {
                    continue;
                }
                let mut w = v[..i].to_vec();
                w.extend_from_slice(&[b, a]);
                w.extend_from_slice(&v[i..]);
                let row = cod.index_of(&w).expect("capped path lies in codomain");
                m[(row, col)] += Complex64::new((self.mu(b) / self.mu(a)).sqrt(), 0.0);
            }
        }
        Ok(LinearOperator {
            domain: dom,
            codomain: cod,
            matrix: m,
            kind: OperatorKind::Cap,
            position: i,
        })
    }

    /// `∩_i` in both insertion orders.
    pub fn caps(&self, domain: &PathGrading, i: usize) -> Result<[LinearOperator; 2]> {
        Ok([
            self.cap(domain, i, CapOrder::SigmaFirst)?,
            self.cap(domain, i, CapOrder::SigmaBarFirst)?,
        ])
    }

    /// `U_i = C†_i C_i`, an endomorphism of the domain.
    pub fn tl_u(&self, domain: &PathGrading, i: usize) -> Result<LinearOperator> {
        let c = self.annihilation(domain, i)?;
        let m = c.matrix.adjoint() * &c.matrix;
        Ok(LinearOperator {
            domain: c.domain.clone(),
            codomain: c.domain,
            matrix: m,
            kind: OperatorKind::U,
            position: i,
        })
    }

    /// `F_i = U_i U_{i+1} U_i − U_i`, for `1 ≤ i ≤ n-2`.
    pub fn tl_f(&self, domain: &PathGrading, i: usize) -> Result<LinearOperator> {
        check_position("F", i, domain.len().saturating_sub(2))?;
        let u = self.tl_u(domain, i)?;
        let v = self.tl_u(domain, i + 1)?;
        let m = &u.matrix * &v.matrix * &u.matrix - &u.matrix;
        Ok(LinearOperator {
            matrix: m,
            kind: OperatorKind::F,
            ..u
        })
    }

    /// Whether step `i` of `path` (1-based) closes at least one triangle,
    /// i.e. whether `C†_i` acts nontrivially on it.
    pub fn step_closes_triangle(&self, vertices: &[usize], tag: EdgeTag, i: usize) -> bool {
        let (a, c) = (vertices[i - 1], vertices[i]);
        let g = &self.graph;
        match tag {
            EdgeTag::SigmaBar => g.successors(a).iter().any(|&m| g.has_arrow(m, c)),
            EdgeTag::Sigma => g.predecessors(a).iter().any(|&m| g.has_arrow(c, m)),
        }
    }

    /// All nonempty gradings with `|word| ≤ max_len`, in a fixed order.
    pub fn gradings(&self, max_len: usize) -> Vec<PathGrading> {
        let n = self.graph.len();
        let mut out = Vec::new();
        for len in 0..=max_len {
            for word in Word::all_of_length(len) {
                for a in 0..n {
                    for b in 0..n {
                        let gr = PathGrading::new(a, b, word.clone());
                        if crate::paths::path_space_dim(&self.graph, &gr) > 0 {
                            out.push(gr);
                        }
                    }
                }
            }
        }
        out
    }

    /// Sweeps every grading with `|word| ≤ max_len` and reports the largest
    /// residual of each relation.
    pub fn verify_tl(&self, max_len: usize) -> Result<TlReport> {
        let beta = self.beta();
        let hecke = self.spectral.hecke();
        let mut acc = Accumulator::default();
        for gr in self.gradings(max_len) {
            self.verify_grading(&gr, max_len, beta, hecke, &mut acc)?;
        }
        Ok(acc.finish(self.graph.name(), max_len, beta, hecke))
    }

    fn verify_grading(
        &self,
        gr: &PathGrading,
        max_len: usize,
        beta: f64,
        hecke: f64,
        acc: &mut Accumulator,
    ) -> Result<()> {
        let n = gr.len();
        let tags = gr.word.tags();
        let space = self.space(gr)?;
        let d = space.dim();
        let id = CMatrix::identity(d, d);
        let label = gr.display(&self.graph);

        let us: Vec<CMatrix> = (1..n)
            .map(|i| self.tl_u(gr, i).map(|u| u.matrix))
            .collect::<Result<_>>()?;
        let u = |i: usize| &us[i - 1];
        let same = |from: usize, to: usize| tags[from - 1..to].iter().all(|&t| t == tags[from - 1]);

        for i in 1..n {
            let sq = u(i) * u(i);
            acc.add(Rel::H1, max_abs(&(&sq - u(i) * Complex64::from(beta))), &label);
            acc.add(Rel::H1Hecke, max_abs(&(&sq - u(i) * Complex64::from(hecke))), &label);
            for j in i + 2..n {
                acc.add(Rel::H2, max_abs(&(u(i) * u(j) - u(j) * u(i))), &label);
            }
        }

        // C_i C†_i on each step: β where the step closes a triangle, 0 elsewhere
        if n < max_len {
            for i in 1..=n {
                let cd = self.creation(gr, i)?;
                let c = self.annihilation(cd.codomain_grading(), i)?;
                let m = &c.matrix * &cd.matrix;
                let diag = |scale: f64| {
                    CMatrix::from_fn(d, d, |r, s| {
                        let closes = r == s
                            && self.step_closes_triangle(space.basis()[r].vertices(), tags[i - 1], i);
                        Complex64::new(if closes { scale } else { 0.0 }, 0.0)
                    })
                };
                acc.add(Rel::H1, max_abs(&(&m - diag(beta))), &label);
                acc.add(Rel::H1Hecke, max_abs(&(&m - diag(hecke))), &label);
            }
        }

        let f = |i: usize| u(i) * u(i + 1) * u(i) - u(i);
        for i in 1..n.saturating_sub(1) {
            if same(i, i + 2) {
                let g = u(i + 1) * u(i) * u(i + 1) - u(i + 1);
                acc.add(Rel::H3, max_abs(&(f(i) - g)), &label);
            }
        }
        for i in 1..n.saturating_sub(2) {
            if same(i, i + 3) {
                let (fi, fj) = (f(i), f(i + 1));
                let fff = &fi * &fj * &fi;
                acc.add(Rel::Lemma, max_abs(&(&fff - &fi * Complex64::from(beta * beta))), &label);
                acc.add(Rel::LemmaHecke, max_abs(&(&fff - &fi * Complex64::from(hecke * hecke))), &label);
                let left = u(i) - u(i + 2) * u(i + 1) * u(i) + u(i + 1);
                let right = u(i + 1) * u(i + 2) * u(i + 1) - u(i + 1);
                acc.add(Rel::H4, max_abs(&(left * right)), &label);
            }
        }

        // square relation on return pairs: (C_{i+1} C†_i)^2 = 1 + ∩_i ∪_i
        if n < max_len {
            for i in 1..n {
                if tags[i - 1] == tags[i] {
                    continue;
                }
                let q1 = self.swap_operator(gr, i)?;
                let q2 = self.swap_operator(q1.codomain_grading(), i)?;
                let cup = self.cup(gr, i)?;
                let lhs = &q2.matrix * &q1.matrix;
                let rhs = &id + cup.matrix.adjoint() * &cup.matrix;
                acc.add(Rel::CupCap, max_abs(&(lhs - rhs)), &label);
            }
        }
        Ok(())
    }

    /// `C_{i+1} C†_i`: exchanges the mixed pair at steps `i, i+1`.
    pub fn swap_operator(&self, domain: &PathGrading, i: usize) -> Result<LinearOperator> {
        let up = self.creation(domain, i)?;
        let down = self.annihilation(up.codomain_grading(), i + 1)?;
        down.compose(&up)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Rel {
    H1,
    H2,
    H3,
    H4,
    Lemma,
    CupCap,
    H1Hecke,
    LemmaHecke,
}

impl Rel {
    fn name(self) -> &'static str {
        match self {
            Rel::H1 => "H1",
            Rel::H2 => "H2",
            Rel::H3 => "H3",
            Rel::H4 => "H4",
            Rel::Lemma => "lemma",
            Rel::CupCap => "cup_cap",
            Rel::H1Hecke => "H1_hecke",
            Rel::LemmaHecke => "lemma_hecke",
        }
    }

    fn statement(self) -> &'static str {
        match self {
            Rel::H1 => "U_i^2 = beta U_i, C_i C_i^dag = beta",
            Rel::H2 => "U_i U_j = U_j U_i, |i-j| > 1",
            Rel::H3 => "F_i = F_{i+1}",
            Rel::H4 => "(U_i - U_{i+2}U_{i+1}U_i + U_{i+1})(U_{i+1}U_{i+2}U_{i+1} - U_{i+1}) = 0",
            Rel::Lemma => "F_i F_{i+1} F_i = beta^2 F_i",
            Rel::CupCap => "(C_{i+1} C_i^dag)^2 = 1 + cap_i cup_i",
            Rel::H1Hecke => "U_i^2 = [2]_q U_i, C_i C_i^dag = [2]_q",
            Rel::LemmaHecke => "F_i F_{i+1} F_i = [2]_q^2 F_i",
        }
    }

    fn diagnostic(self) -> bool {
        matches!(self, Rel::H1Hecke | Rel::LemmaHecke)
    }
}

const ALL_RELS: [Rel; 8] = [
    Rel::H1,
    Rel::H2,
    Rel::H3,
    Rel::H4,
    Rel::Lemma,
    Rel::CupCap,
    Rel::H1Hecke,
    Rel::LemmaHecke,
];

#[derive(Default)]
struct Accumulator {
    max: HashMap<Rel, (f64, usize, String)>,
}

impl Accumulator {
    fn add(&mut self, rel: Rel, residual: f64, label: &str) {
        let e = self.max.entry(rel).or_insert((0.0, 0, String::new()));
        e.1 += 1;
        if residual > e.0 || e.2.is_empty() {
            e.0 = residual;
            e.2 = label.to_string();
        }
    }

    fn finish(self, graph: &str, max_len: usize, beta: f64, hecke: f64) -> TlReport {
        let mut relations = Vec::new();
        let mut diagnostics = Vec::new();
        for rel in ALL_RELS {
            let (max, count, worst) = self.max.get(&rel).cloned().unwrap_or_default();
            let r = RelationResidual {
                name: rel.name().to_string(),
                statement: rel.statement().to_string(),
                max_residual: max,
                instances: count,
                worst_grading: (count > 0).then_some(worst),
                passed: max < RELATION_TOL,
            };
            if rel.diagnostic() {
                diagnostics.push(r);
            } else {
                relations.push(r);
            }
        }
        let passed = relations.iter().all(|r| r.passed);
        TlReport {
            graph: graph.to_string(),
            max_len,
            tol: RELATION_TOL,
            beta,
            hecke,
            relations,
            diagnostics,
            passed,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationResidual {
    pub name: String,
    pub statement: String,
    pub max_residual: f64,
    pub instances: usize,
    pub worst_grading: Option<String>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TlReport {
    pub graph: String,
    pub max_len: usize,
    pub tol: f64,
    pub beta: f64,
    pub hecke: f64,
    /// The relations as stated, with β.
    pub relations: Vec<RelationResidual>,
    /// The same relations with the Hecke parameter `[2]_q` in place of β.
    pub diagnostics: Vec<RelationResidual>,
    pub passed: bool,
}

impl TlReport {
    pub fn relation(&self, name: &str) -> Option<&RelationResidual> {
        self.relations
            .iter()
            .chain(self.diagnostics.iter())
            .find(|r| r.name == name)
    }
}
