//! Elementary paths and word-graded path spaces.
//!
//! A path space is graded by its endpoints and the exact sequence of edge
//! tags (the *word*). The `(α, β)` spaces are direct sums over the words
//! with `α` σ-steps and `β` σ̄-steps.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graphs::GraphSpec;

/// Default cap on the number of basis paths a space may materialise.
pub const DEFAULT_SPACE_CAP: usize = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum EdgeTag {
    Sigma,
    SigmaBar,
}

impl EdgeTag {
    pub fn opposite(self) -> Self {
        match self {
            EdgeTag::Sigma => EdgeTag::SigmaBar,
            EdgeTag::SigmaBar => EdgeTag::Sigma,
        }
    }

    pub fn symbol(self) -> char {
        match self {
            EdgeTag::Sigma => 's',
            EdgeTag::SigmaBar => 'b',
        }
    }

    /// Whether the step `from -> to` is allowed with this tag.
    pub fn allows(self, g: &GraphSpec, from: usize, to: usize) -> bool {
        match self {
            EdgeTag::Sigma => g.has_arrow(from, to),
            EdgeTag::SigmaBar => g.has_arrow(to, from),
        }
    }

    /// Vertices reachable from `v` in one step with this tag.
    pub fn neighbours(self, g: &GraphSpec, v: usize) -> &[usize] {
        match self {
            EdgeTag::Sigma => g.successors(v),
            EdgeTag::SigmaBar => g.predecessors(v),
        }
    }
}

/// A tag sequence, written with `s` (σ) and `b` (σ̄).
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word(pub Vec<EdgeTag>);

impl Word {
    pub fn parse(s: &str) -> Result<Self> {
        s.trim()
            .chars()
            .map(|c| match c {
                's' | 'S' | 'σ' => Ok(EdgeTag::Sigma),
                'b' | 'B' => Ok(EdgeTag::SigmaBar),
                _ => Err(Error::InvalidWord(s.to_string())),
            })
            .collect::<Result<Vec<_>>>()
            .map(Word)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn tags(&self) -> &[EdgeTag] {
        &self.0
    }

    /// `(α, β)` = (number of σ, number of σ̄).
    pub fn path_type(&self) -> (u32, u32) {
        let a = self.0.iter().filter(|&&t| t == EdgeTag::Sigma).count() as u32;
        (a, self.0.len() as u32 - a)
    }

    /// All words with `alpha` σ-steps and `beta` σ̄-steps, in lexicographic order.
    pub fn all_of_type(alpha: u32, beta: u32) -> Vec<Word> {
        let n = (alpha + beta) as usize;
        let mut out = Vec::new();
        let mut cur = Vec::with_capacity(n);
        fn rec(a: u32, b: u32, cur: &mut Vec<EdgeTag>, out: &mut Vec<Word>) {
            if a == 0 && b == 0 {
                out.push(Word(cur.clone()));
                return;
            }
            if a > 0 {
                cur.push(EdgeTag::Sigma);
                rec(a - 1, b, cur, out);
                cur.pop();
            }
            if b > 0 {
                cur.push(EdgeTag::SigmaBar);
                rec(a, b - 1, cur, out);
                cur.pop();
            }
        }
        rec(alpha, beta, &mut cur, &mut out);
        debug_assert!(out.iter().all(|w| w.len() == n));
        out
    }

    /// All words of length `n` in lexicographic order (σ < σ̄).
    pub fn all_of_length(n: usize) -> Vec<Word> {
        (0..1usize << n)
            .map(|mask| {
                Word(
                    (0..n)
                        .map(|i| {
                            if mask >> (n - 1 - i) & 1 == 0 {
                                EdgeTag::Sigma
                            } else {
                                EdgeTag::SigmaBar
                            }
                        })
                        .collect(),
                )
            })
            .collect()
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in &self.0 {
            write!(f, "{}", t.symbol())?;
        }
        Ok(())
    }
}

/// A walk on the graph with one tag per step.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ElementaryPath {
    vertices: Vec<usize>,
    word: Word,
}

impl ElementaryPath {
    pub fn vertex(v: usize) -> Self {
        Self {
            vertices: vec![v],
            word: Word::default(),
        }
    }

    /// Builds a path, checking every step against its tag.
    pub fn new(g: &GraphSpec, vertices: Vec<usize>, word: Word) -> Result<Self> {
        if vertices.is_empty() || vertices.len() != word.len() + 1 {
            return Err(Error::InvalidPath(format!(
                "{} vertices for a word of length {}",
                vertices.len(),
                word.len()
            )));
        }
        for (k, tag) in word.tags().iter().enumerate() {
            let (u, v) = (vertices[k], vertices[k + 1]);
            if u >= g.len() || v >= g.len() || !tag.allows(g, u, v) {
                return Err(Error::InvalidPath(format!(
                    "step {} is not a {:?} step",
                    k + 1,
                    tag
                )));
            }
        }
        Ok(Self { vertices, word })
    }

    pub(crate) fn from_parts(vertices: Vec<usize>, word: Word) -> Self {
        debug_assert_eq!(vertices.len(), word.len() + 1);
        Self { vertices, word }
    }

    /// Parses comma-separated vertex keys such as `"1,3,8"`.
    pub fn parse(g: &GraphSpec, vertices: &str, word: &str) -> Result<Self> {
        let vs = vertices
            .split(',')
            .map(|k| g.find_vertex(k))
            .collect::<Result<Vec<_>>>()?;
        Self::new(g, vs, Word::parse(word)?)
    }

    pub fn start(&self) -> usize {
        self.vertices[0]
    }

    pub fn end(&self) -> usize {
        *self.vertices.last().unwrap()
    }

    pub fn vertices(&self) -> &[usize] {
        &self.vertices
    }

    pub fn word(&self) -> &Word {
        &self.word
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    /// `(to, tag)` for each step.
    pub fn steps(&self) -> impl Iterator<Item = (usize, EdgeTag)> + '_ {
        self.vertices[1..].iter().copied().zip(self.word.0.iter().copied())
    }

    pub fn path_type(&self) -> (u32, u32) {
        self.word.path_type()
    }

    pub fn grading(&self) -> PathGrading {
        PathGrading::new(self.start(), self.end(), self.word.clone())
    }

    /// Sub-path over vertices `from..=to`.
    pub fn segment(&self, from: usize, to: usize) -> ElementaryPath {
        ElementaryPath {
            vertices: self.vertices[from..=to].to_vec(),
            word: Word(self.word.0[from..to].to_vec()),
        }
    }

    pub fn display(&self, g: &GraphSpec) -> String {
        let labels: Vec<&str> = self.vertices.iter().map(|&v| g.vertex(v).id.as_str()).collect();
        format!("({})", labels.join(" "))
    }
}

/// Joins `p` and `q` when `p` ends where `q` starts.
pub fn concatenate(p: &ElementaryPath, q: &ElementaryPath) -> Option<ElementaryPath> {
    if p.end() != q.start() {
        return None;
    }
    let mut vertices = p.vertices.clone();
    vertices.extend_from_slice(&q.vertices[1..]);
    let mut word = p.word.0.clone();
    word.extend_from_slice(&q.word.0);
    Some(ElementaryPath {
        vertices,
        word: Word(word),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PathGrading {
    pub from: usize,
    pub to: usize,
    pub word: Word,
}

impl PathGrading {
    pub fn new(from: usize, to: usize, word: Word) -> Self {
        Self { from, to, word }
    }

    pub fn len(&self) -> usize {
        self.word.len()
    }

    pub fn is_empty(&self) -> bool {
        self.word.is_empty()
    }

    pub fn path_type(&self) -> (u32, u32) {
        self.word.path_type()
    }

    pub fn with_word(&self, word: Word) -> Self {
        Self::new(self.from, self.to, word)
    }

    pub fn display(&self, g: &GraphSpec) -> String {
        format!(
            "{} -> {} [{}]",
            g.vertex(self.from).id,
            g.vertex(self.to).id,
            self.word
        )
    }
}

impl fmt::Display for PathGrading {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} -> {} [{}]", self.from, self.to, self.word)
    }
}

/// All walks realising `grading`, in lexicographic order of vertex sequences.
pub fn enumerate_paths(g: &GraphSpec, grading: &PathGrading) -> Result<Vec<ElementaryPath>> {
    enumerate_paths_capped(g, grading, DEFAULT_SPACE_CAP)
}

pub fn enumerate_paths_capped(
    g: &GraphSpec,
    grading: &PathGrading,
    cap: usize,
) -> Result<Vec<ElementaryPath>> {
    let tags = grading.word.tags();
    let n = tags.len();
    // reachable[k][v]: the suffix of the word starting at step k+1 can go from v to `to`
    let mut reachable = vec![vec![false; g.len()]; n + 1];
    if grading.to < g.len() {
        reachable[n][grading.to] = true;
    }
    for k in (0..n).rev() {
        for v in 0..g.len() {
            reachable[k][v] = tags[k]
                .neighbours(g, v)
                .iter()
                .any(|&w| reachable[k + 1][w]);
        }
    }
    let mut out = Vec::new();
    if grading.from >= g.len() || !reachable[0][grading.from] {
        return Ok(out);
    }
    let mut stack = vec![grading.from];
    fn rec(
        g: &GraphSpec,
        tags: &[EdgeTag],
        reachable: &[Vec<bool>],
        stack: &mut Vec<usize>,
        out: &mut Vec<ElementaryPath>,
        cap: usize,
        grading: &PathGrading,
    ) -> Result<()> {
        let k = stack.len() - 1;
        if k == tags.len() {
            if out.len() == cap {
                return Err(Error::SpaceTooLarge {
                    grading: grading.to_string(),
                    cap,
                });
            }
            out.push(ElementaryPath::from_parts(
                stack.clone(),
                Word(tags.to_vec()),
            ));
            return Ok(());
        }
        let v = *stack.last().unwrap();
        for &w in tags[k].neighbours(g, v) {
            if reachable[k + 1][w] {
                stack.push(w);
                rec(g, tags, reachable, stack, out, cap, grading)?;
                stack.pop();
            }
        }
        Ok(())
    }
    rec(g, tags, &reachable, &mut stack, &mut out, cap, grading)?;
    Ok(out)
}

/// Dimension as the `(from, to)` entry of the ordered product of step
/// matrices (σ-adjacency for σ, its transpose for σ̄).
pub fn path_space_dim(g: &GraphSpec, grading: &PathGrading) -> u64 {
    let n = g.len();
    let mut row = DVector::<u64>::zeros(n);
    row[grading.from] = 1;
    let a = {
        let mut a = DMatrix::<u64>::zeros(n, n);
        for &(u, v) in g.sigma_edges() {
            a[(u, v)] = 1;
        }
        a
    };
    for tag in grading.word.tags() {
        let step = match tag {
            EdgeTag::Sigma => a.clone(),
            EdgeTag::SigmaBar => a.transpose(),
        };
        row = step.transpose() * row;
    }
    row[grading.to]
}

/// An enumerated graded space with a lookup from vertex sequence to basis index.
#[derive(Debug, Clone)]
pub struct PathSpace {
    grading: PathGrading,
    basis: Vec<ElementaryPath>,
    index: HashMap<Vec<usize>, usize>,
}

impl PathSpace {
    pub fn new(g: &GraphSpec, grading: PathGrading) -> Result<Self> {
        let basis = enumerate_paths(g, &grading)?;
        let index = basis
            .iter()
            .enumerate()
            .map(|(i, p)| (p.vertices.clone(), i))
            .collect();
        Ok(Self {
            grading,
            basis,
            index,
        })
    }

    pub fn grading(&self) -> &PathGrading {
        &self.grading
    }

    pub fn basis(&self) -> &[ElementaryPath] {
        &self.basis
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn index_of(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }
}

/// A complex combination of the basis paths of one graded space.
#[derive(Debug, Clone)]
pub struct PathVector {
    space: Arc<PathSpace>,
    coefficients: DVector<Complex64>,
}

impl PathVector {
    pub fn new(space: Arc<PathSpace>, coefficients: DVector<Complex64>) -> Result<Self> {
        if coefficients.len() != space.dim() {
            return Err(Error::InvalidPath(format!(
                "{} coefficients for a space of dimension {}",
                coefficients.len(),
                space.dim()
            )));
        }
        Ok(Self {
            space,
            coefficients,
        })
    }

    pub fn zero(space: Arc<PathSpace>) -> Self {
        let n = space.dim();
        Self {
            space,
            coefficients: DVector::zeros(n),
        }
    }

    /// The unit vector of one basis path.
    pub fn basis_vector(space: Arc<PathSpace>, path: &ElementaryPath) -> Result<Self> {
        let i = space
            .index_of(path.vertices())
            .filter(|_| path.word() == &space.grading().word)
            .ok_or_else(|| Error::InvalidPath("path not in space".into()))?;
        let mut v = Self::zero(space);
        v.coefficients[i] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    /// Builds a vector from `(path, coefficient)` terms; every path must lie in `space`.
    pub fn from_terms(
        space: Arc<PathSpace>,
        terms: &[(ElementaryPath, Complex64)],
    ) -> Result<Self> {
        let mut v = Self::zero(space);
        for (p, c) in terms {
            if p.word() != &v.space.grading().word {
                return Err(Error::GradingMismatch(
                    p.grading().to_string(),
                    v.space.grading().to_string(),
                ));
            }
            let i = v
                .space
                .index_of(p.vertices())
                .ok_or_else(|| Error::InvalidPath("path not in space".into()))?;
            v.coefficients[i] += c;
        }
        Ok(v)
    }

    pub fn space(&self) -> &Arc<PathSpace> {
        &self.space
    }

    pub fn grading(&self) -> &PathGrading {
        self.space.grading()
    }

    pub fn coefficients(&self) -> &DVector<Complex64> {
        &self.coefficients
    }

    pub fn coefficient(&self, path: &ElementaryPath) -> Complex64 {
        self.space
            .index_of(path.vertices())
            .filter(|_| path.word() == &self.space.grading().word)
            .map(|i| self.coefficients[i])
            .unwrap_or_default()
    }

    pub fn norm_squared(&self) -> f64 {
        self.coefficients.iter().map(|c| c.norm_sqr()).sum()
    }

    /// Non-zero terms in basis order.
    pub fn terms(&self, tol: f64) -> Vec<(&ElementaryPath, Complex64)> {
        self.space
            .basis()
            .iter()
            .zip(self.coefficients.iter())
            .filter(|(_, c)| c.norm() > tol)
            .map(|(p, &c)| (p, c))
            .collect()
    }
}

/// `⟨u, v⟩ = Σ conj(u_e) v_e` over a shared graded basis.
pub fn inner_product(u: &PathVector, v: &PathVector) -> Result<Complex64> {
    if u.grading() != v.grading() {
        return Err(Error::GradingMismatch(
            u.grading().to_string(),
            v.grading().to_string(),
        ));
    }
    Ok(u.coefficients.dotc(&v.coefficients))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::{build_a_graph, build_e5_graph};

    fn ids(g: &GraphSpec, paths: &[ElementaryPath]) -> Vec<String> {
        paths.iter().map(|p| p.display(g)).collect()
    }

    #[test]
    fn enumerate_a2_examples() {
        let g = build_a_graph(2);
        let v = |k| g.find_vertex(k).unwrap();
        let grading = PathGrading::new(v("1"), v("8"), Word::parse("sb").unwrap());
        assert_eq!(ids(&g, &enumerate_paths(&g, &grading).unwrap()), ["(1 3 8)"]);

        let grading = PathGrading::new(v("3"), v("3"), Word::parse("sb").unwrap());
        let got = ids(&g, &enumerate_paths(&g, &grading).unwrap());
        // vertex order is (0,0) (0,1) (0,2) (1,0) (1,1) (2,0): 3b precedes 6
        assert_eq!(got, ["(3 3b 3)", "(3 6 3)"]);

        let grading = PathGrading::new(v("6"), v("6"), Word::default());
        assert_eq!(ids(&g, &enumerate_paths(&g, &grading).unwrap()), ["(6)"]);
    }

    #[test]
    fn dimension_examples() {
        let g = build_a_graph(2);
        let v = |k| g.find_vertex(k).unwrap();
        let grading = PathGrading::new(v("3"), v("8"), Word::parse("ss").unwrap());
        assert_eq!(path_space_dim(&g, &grading), 2);
        assert_eq!(
            path_space_dim(&g, &PathGrading::new(v("3"), v("8"), Word::default())),
            0
        );

        let e = build_e5_graph();
        for i in 0..6 {
            let total: u64 = (0..e.len())
                .map(|b| path_space_dim(&e, &PathGrading::new(i, b, Word::parse("s").unwrap())))
                .sum();
            assert_eq!(total, 1);
        }
    }

    #[test]
    fn enumeration_matches_matrix_count() {
        for g in [build_a_graph(2), build_e5_graph()] {
            for n in 0..=5 {
                for word in Word::all_of_length(n) {
                    for a in 0..g.len() {
                        for b in 0..g.len() {
                            let grading = PathGrading::new(a, b, word.clone());
                            let paths = enumerate_paths(&g, &grading).unwrap();
                            assert_eq!(paths.len() as u64, path_space_dim(&g, &grading));
                            assert!(paths.windows(2).all(|w| w[0].vertices() < w[1].vertices()));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn enumeration_is_stable() {
        let g = build_e5_graph();
        let grading = PathGrading::new(6, 8, Word::parse("ssbs").unwrap());
        assert_eq!(
            enumerate_paths(&g, &grading).unwrap(),
            enumerate_paths(&g, &grading).unwrap()
        );
    }

    #[test]
    fn space_cap_refuses() {
        let g = build_e5_graph();
        let grading = PathGrading::new(6, 6, Word::parse("sbsb").unwrap());
        let dim = path_space_dim(&g, &grading) as usize;
        assert!(dim > 2);
        assert!(matches!(
            enumerate_paths_capped(&g, &grading, 2),
            Err(Error::SpaceTooLarge { .. })
        ));
        assert_eq!(enumerate_paths_capped(&g, &grading, dim).unwrap().len(), dim);
    }

    #[test]
    fn concatenation() {
        let g = build_a_graph(2);
        let p13 = ElementaryPath::parse(&g, "1,3", "s").unwrap();
        let p38 = ElementaryPath::parse(&g, "3,8", "b").unwrap();
        let p83 = ElementaryPath::parse(&g, "8,3", "s").unwrap();
        let joined = concatenate(&p13, &p38).unwrap();
        assert_eq!(joined, ElementaryPath::parse(&g, "1,3,8", "sb").unwrap());
        assert_eq!(joined.len(), p13.len() + p38.len());
        assert!(concatenate(&p13, &p83).is_none());
        let unit = ElementaryPath::vertex(p13.start());
        assert_eq!(concatenate(&unit, &p13).unwrap(), p13);
        assert_eq!(
            concatenate(&p13, &ElementaryPath::vertex(p13.end())).unwrap(),
            p13
        );
    }

    #[test]
    fn rejects_invalid_steps() {
        let g = build_a_graph(2);
        assert!(ElementaryPath::parse(&g, "1,3", "b").is_err());
        assert!(ElementaryPath::parse(&g, "1,3,8", "s").is_err());
        assert!(Word::parse("sx").is_err());
    }

    #[test]
    fn inner_products() {
        let g = build_a_graph(2);
        let space = Arc::new(PathSpace::new(&g, PathGrading::new(3, 3, Word::parse("sb").unwrap())).unwrap());
        let e0 = PathVector::basis_vector(space.clone(), &space.basis()[0]).unwrap();
        let e1 = PathVector::basis_vector(space.clone(), &space.basis()[1]).unwrap();
        assert_eq!(inner_product(&e0, &e0).unwrap(), Complex64::new(1.0, 0.0));
        assert_eq!(inner_product(&e0, &e1).unwrap(), Complex64::new(0.0, 0.0));
        let other = Arc::new(PathSpace::new(&g, PathGrading::new(3, 3, Word::parse("bs").unwrap())).unwrap());
        let f = PathVector::zero(other);
        assert!(inner_product(&e0, &f).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn cvec(len: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
            proptest::collection::vec((-5.0..5.0f64, -5.0..5.0f64), len)
        }

        proptest! {
            #[test]
            fn conjugate_symmetry(u in cvec(3), v in cvec(3)) {
                let g = build_e5_graph();
                let space = Arc::new(PathSpace::new(&g, PathGrading::new(6, 6, Word::parse("bs").unwrap())).unwrap());
                prop_assume!(space.dim() == 3);
                let mk = |xs: &Vec<(f64, f64)>| PathVector::new(
                    space.clone(),
                    DVector::from_iterator(3, xs.iter().map(|&(a, b)| Complex64::new(a, b))),
                ).unwrap();
                let (u, v) = (mk(&u), mk(&v));
                let uv = inner_product(&u, &v).unwrap();
                let vu = inner_product(&v, &u).unwrap();
                prop_assert!((uv - vu.conj()).norm() < 1e-12);
                prop_assert!((inner_product(&u, &u).unwrap().re - u.norm_squared()).abs() < 1e-9);
            }

            #[test]
            fn concatenation_is_associative(start in 0usize..12, w in "[sb]{0,6}", cut1 in 0usize..7, cut2 in 0usize..7) {
                let g = build_e5_graph();
                let word = Word::parse(&w).unwrap();
                // walk greedily along the first admissible neighbour
                let mut vs = vec![start];
                for t in word.tags() {
                    let next = t.neighbours(&g, *vs.last().unwrap())[0];
                    vs.push(next);
                }
                let p = ElementaryPath::new(&g, vs, word.clone()).unwrap();
                let n = p.len();
                let (i, j) = (cut1.min(n), cut2.min(n));
                let (i, j) = (i.min(j), i.max(j));
                let (a, b, c) = (p.segment(0, i), p.segment(i, j), p.segment(j, n));
                let left = concatenate(&concatenate(&a, &b).unwrap(), &c).unwrap();
                let right = concatenate(&a, &concatenate(&b, &c).unwrap()).unwrap();
                prop_assert_eq!(&left, &right);
                prop_assert_eq!(&left, &p);
            }
        }
    }
}
