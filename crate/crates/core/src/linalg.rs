//! Small dense complex linear-algebra helpers: kernels, spans and ranks
//! from a full SVD.

use nalgebra::{DMatrix, Dim, Matrix, RawStorage};
use num_complex::Complex64;

pub type CMatrix = DMatrix<Complex64>;

/// Relative singular-value cutoff used for every rank decision.
pub const RANK_TOL: f64 = 1e-9;

/// Result of a numerical null-space computation.
#[derive(Debug, Clone)]
pub struct NullSpace {
    /// Orthonormal columns spanning the kernel.
    pub basis: CMatrix,
    /// All singular values in decreasing order (padded with zeros to the column count).
    pub singular_values: Vec<f64>,
    pub rank: usize,
    /// Ratio between the smallest kept and the largest dropped singular value,
    /// `None` when one side is empty.
    pub gap: Option<f64>,
}

impl NullSpace {
    pub fn dim(&self) -> usize {
        self.basis.ncols()
    }
}

/// Full SVD via faer: singular values (padded with zeros to the column
/// count, decreasing), `U` (rows × rows) and `V` (cols × cols).
///
/// nalgebra's complex SVD is not used: on some rank-deficient inputs with
/// zero rows it returns factors that do not reconstruct the matrix.
fn sorted_svd(m: &CMatrix) -> (Vec<f64>, CMatrix, CMatrix) {
    let (r, c) = m.shape();
    let fm = faer::Mat::<Complex64>::from_fn(r, c, |i, j| m[(i, j)]);
    let svd = fm.svd().expect("complex SVD did not converge");
    let s = svd.S().column_vector();
    let mut sv: Vec<f64> = (0..r.min(c)).map(|i| s[i].re).collect();
    sv.resize(c, 0.0);
    let (fu, fv) = (svd.U(), svd.V());
    let u = CMatrix::from_fn(r, r, |i, j| fu[(i, j)]);
    let v = CMatrix::from_fn(c, c, |i, j| fv[(i, j)]);
    (sv, u, v)
}

fn rank_of(s: &[f64], rel_tol: f64) -> usize {
    let smax = s.first().copied().unwrap_or(0.0);
    if smax <= f64::MIN_POSITIVE {
        return 0;
    }
    s.iter().take_while(|&&x| x > rel_tol * smax).count()
}

fn gap_at(s: &[f64], rank: usize) -> Option<f64> {
    if rank == 0 || rank >= s.len() {
        return None;
    }
    let below = s[rank];
    Some(if below == 0.0 { f64::INFINITY } else { s[rank - 1] / below })
}

/// Orthonormal kernel basis of `m` (columns), with singular values below
/// `rel_tol * σ_max` treated as zero.
pub fn null_space(m: &CMatrix, rel_tol: f64) -> NullSpace {
    let n = m.ncols();
    if n == 0 {
        return NullSpace {
            basis: CMatrix::zeros(0, 0),
            singular_values: vec![],
            rank: 0,
            gap: None,
        };
    }
    if m.nrows() == 0 {
        return NullSpace {
            basis: CMatrix::identity(n, n),
            singular_values: vec![0.0; n],
            rank: 0,
            gap: None,
        };
    }
    let (s, _, v) = sorted_svd(m);
    let rank = rank_of(&s, rel_tol);
    let basis = v.columns(rank, n - rank).into_owned();
    let gap = gap_at(&s, rank);
    NullSpace {
        basis: canonical_phase(basis),
        singular_values: s,
        rank,
        gap,
    }
}

/// Orthonormal basis of the column span of `m`.
pub fn column_span(m: &CMatrix, rel_tol: f64) -> CMatrix {
    if m.ncols() == 0 || m.nrows() == 0 {
        return CMatrix::zeros(m.nrows(), 0);
    }
    let (s, u, _) = sorted_svd(m);
    let rank = rank_of(&s, rel_tol).min(m.nrows());
    u.view((0, 0), (m.nrows(), rank)).into_owned()
}

/// Numerical rank with the given relative cutoff.
pub fn rank(m: &CMatrix, rel_tol: f64) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    rank_of(&sorted_svd(m).0, rel_tol)
}

/// Rotates each column so its largest-magnitude entry is real positive.
/// Makes kernel vectors reproducible across runs and readable.
pub fn canonical_phase(mut m: CMatrix) -> CMatrix {
    for mut col in m.column_iter_mut() {
        let mut best = 0;
        for i in 0..col.len() {
            if col[i].norm() > col[best].norm() + 1e-12 {
                best = i;
            }
        }
        if col.len() > 0 && col[best].norm() > 0.0 {
            let phase = col[best].conj() / col[best].norm();
            col *= phase;
        }
    }
    m
}

/// Largest entry magnitude, zero for empty matrices.
pub fn max_abs<R: Dim, C: Dim, S: RawStorage<Complex64, R, C>>(m: &Matrix<Complex64, R, C, S>) -> f64 {
    m.iter().map(|c| c.norm()).fold(0.0, f64::max)
}

/// Orthogonal projector `Q Q†` onto the span of orthonormal columns `q`.
pub fn projector(q: &CMatrix, n: usize) -> CMatrix {
    if q.ncols() == 0 {
        return CMatrix::zeros(n, n);
    }
    q * q.adjoint()
}

/// Stacks matrices with equal column counts vertically.
pub fn vstack(blocks: &[CMatrix], ncols: usize) -> CMatrix {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMatrix::zeros(rows, ncols);
    let mut r = 0;
    for b in blocks {
        debug_assert_eq!(b.ncols(), ncols);
        out.view_mut((r, 0), (b.nrows(), ncols)).copy_from(b);
        r += b.nrows();
    }
    out
}

/// Concatenates matrices with equal row counts horizontally.
pub fn hstack(blocks: &[CMatrix], nrows: usize) -> CMatrix {
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = CMatrix::zeros(nrows, cols);
    let mut c = 0;
    for b in blocks {
        debug_assert_eq!(b.nrows(), nrows);
        out.view_mut((0, c), (nrows, b.ncols())).copy_from(b);
        c += b.ncols();
    }
    out
}
