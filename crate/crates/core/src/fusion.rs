//! Module-action (fusion) matrices `F_(α,β)` from the SU(3) tensor rule
//! `σ ⊗ (p,q) = (p+1,q) ⊕ (p−1,q+1) ⊕ (p,q−1)`.

use std::collections::BTreeMap;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graphs::GraphSpec;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FusionMatrix {
    pub path_type: (u32, u32),
    pub matrix: DMatrix<i64>,
}

impl FusionMatrix {
    pub fn get(&self, a: usize, b: usize) -> i64 {
        self.matrix[(a, b)]
    }

    pub fn total(&self) -> i64 {
        self.matrix.sum()
    }
}

/// Every `F_(α,β)` with `α+β ≤ max_total`.
pub fn fusion_matrices(g: &GraphSpec, max_total: u32) -> Result<BTreeMap<(u32, u32), FusionMatrix>> {
    if max_total > g.level() {
        return Err(Error::TypeBeyondLevel(max_total, 0, g.level()));
    }
    let n = g.len();
    let mut f10 = DMatrix::<i64>::zeros(n, n);
    for &(u, v) in g.sigma_edges() {
        f10[(u, v)] = 1;
    }
    let mut m: BTreeMap<(u32, u32), DMatrix<i64>> = BTreeMap::new();
    m.insert((0, 0), DMatrix::identity(n, n));
    for total in 1..=max_total {
        for p in (1..=total).rev() {
            let q = total - p;
            let mut x = &f10 * &m[&(p - 1, q)];
            if p >= 2 {
                x -= &m[&(p - 2, q + 1)];
            }
            if q >= 1 {
                x -= &m[&(p - 1, q - 1)];
            }
            m.insert((p, q), x);
        }
        let t = m[&(total, 0)].transpose();
        m.insert((0, total), t);
    }
    Ok(m
        .into_iter()
        .map(|(t, matrix)| (t, FusionMatrix { path_type: t, matrix }))
        .collect())
}

/// `F_(α,β)` alone.
pub fn fusion_matrix(g: &GraphSpec, path_type: (u32, u32)) -> Result<FusionMatrix> {
    let (a, b) = path_type;
    if a + b > g.level() {
        return Err(Error::TypeBeyondLevel(a, b, g.level()));
    }
    Ok(fusion_matrices(g, a + b)?.remove(&path_type).expect("computed"))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AdmissibleTriangle {
    pub from: String,
    pub to: String,
    pub multiplicity: i64,
}

/// Pairs `(a, b)` with `F_(α,β)(a, b) > 0`, in vertex order.
pub fn admissible_triangles(g: &GraphSpec, path_type: (u32, u32)) -> Result<Vec<AdmissibleTriangle>> {
    let f = fusion_matrix(g, path_type)?;
    let n = g.len();
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            if f.get(a, b) > 0 {
                out.push(AdmissibleTriangle {
                    from: g.vertex(a).id.clone(),
                    to: g.vertex(b).id.clone(),
                    multiplicity: f.get(a, b),
                });
            }
        }
    }
    Ok(out)
}

/// `x ⊗ y` as multiplicities over vertices; A-type graphs only, where every
/// vertex is itself a type `(λ1, λ2)`.
pub fn fusion_product(g: &GraphSpec, x: usize, y: usize) -> Result<Vec<i64>> {
    let lambda = g.vertex(x).tri.filter(|_| g.is_a_type()).ok_or_else(|| {
        Error::Unsupported(format!("`{}` has no fusion table (not A-type)", g.name()))
    })?;
    let f = fusion_matrix(g, lambda)?;
    Ok((0..g.len()).map(|z| f.get(y, z)).collect())
}

/// The full multiplication table, entry `[x][y]` listing `x ⊗ y` as
/// `(vertex, multiplicity)` pairs in vertex order.
pub fn fusion_table(g: &GraphSpec) -> Result<Vec<Vec<Vec<(usize, i64)>>>> {
    let n = g.len();
    let mut rows = Vec::with_capacity(n);
    for x in 0..n {
        let mut row = Vec::with_capacity(n);
        for y in 0..n {
            let p = fusion_product(g, x, y)?;
            row.push(
                p.into_iter()
                    .enumerate()
                    .filter(|&(_, m)| m != 0)
                    .collect(),
            );
        }
        rows.push(row);
    }
    Ok(rows)
}

/// Renders `x ⊗ y` as `a+b`, with `2·a` for multiplicities.
pub fn render_product(g: &GraphSpec, terms: &[(usize, i64)]) -> String {
    if terms.is_empty() {
        return "0".into();
    }
    terms
        .iter()
        .map(|&(z, m)| {
            if m == 1 {
                g.vertex(z).id.clone()
            } else {
                format!("{m}·{}", g.vertex(z).id)
            }
        })
        .collect::<Vec<_>>()
        .join("+")
}

/// The A2 multiplication table as published, rows and columns in the order
/// `1, 3, 6, 3b, 6b, 8`. Used as an oracle.
pub const A2_TABLE_ORDER: [&str; 6] = ["1", "3", "6", "3b", "6b", "8"];
pub const A2_TABLE: [[&str; 6]; 6] = [
    ["1", "3", "6", "3b", "6b", "8"],
    ["3", "3b+6", "8", "1+8", "3b", "6b+3"],
    ["6", "8", "6b", "3", "1", "3b"],
    ["3b", "1+8", "3", "6b+3", "8", "6+3b"],
    ["6b", "3b", "1", "8", "6", "3"],
    ["8", "6b+3", "3b", "6+3b", "3", "1+8"],
];

/// Parses an `a+b` table entry into sorted vertex indices with multiplicity.
pub fn parse_product(g: &GraphSpec, s: &str) -> Result<Vec<(usize, i64)>> {
    let mut counts = BTreeMap::new();
    for part in s.split('+') {
        *counts.entry(g.find_vertex(part.trim())?).or_insert(0) += 1;
    }
    Ok(counts.into_iter().collect())
}
