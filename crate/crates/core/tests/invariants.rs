use std::sync::OnceLock;

use nalgebra::DVector;
use num_complex::Complex64;
use proptest::prelude::*;
use su3paths::cells::{gauge_transform, shipped_cells, solve_cells, GaugePhases, DEFAULT_TOL};
use su3paths::essential::{essential_basis, factorize_path, replay};
use su3paths::graphs::{build_a_graph, build_e5_graph, GraphSpec};
use su3paths::operators::{CapOrder, PathAlgebra};
use su3paths::paths::{enumerate_paths, PathGrading};

fn algebra(g: GraphSpec) -> PathAlgebra {
    let cells = shipped_cells(&g).unwrap();
    PathAlgebra::new(g, cells).unwrap()
}

fn a3() -> &'static PathAlgebra {
    static A: OnceLock<PathAlgebra> = OnceLock::new();
    A.get_or_init(|| algebra(build_a_graph(3)))
}

fn e5() -> &'static PathAlgebra {
    static A: OnceLock<PathAlgebra> = OnceLock::new();
    A.get_or_init(|| algebra(build_e5_graph()))
}

fn gradings(alg: &PathAlgebra, max_len: usize) -> Vec<PathGrading> {
    alg.gradings(max_len).into_iter().filter(|g| g.len() >= 2).collect()
}

fn cvec(seed: &[(f64, f64)], n: usize) -> DVector<Complex64> {
    DVector::from_fn(n, |i, _| {
        let (re, im) = seed[i % seed.len()];
        Complex64::new(re * (i as f64 + 1.0).sin(), im + i as f64 * 0.1)
    })
}

fn dot(a: &DVector<Complex64>, b: &DVector<Complex64>) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauge_leaves_kernels_alone(seed in any::<u64>()) {
        let alg = a3();
        let g = alg.graph().clone();
        let cells = gauge_transform(alg.cells(), &GaugePhases::random(&g, seed)).unwrap();
        let moved = PathAlgebra::new(g, cells).unwrap();
        for gr in alg.gradings(3) {
            let a = essential_basis(alg, &gr).unwrap();
            let b = essential_basis(&moved, &gr).unwrap();
            prop_assert_eq!((a.dim, a.kernel_dim), (b.dim, b.kernel_dim));
        }
    }

    #[test]
    fn operators_are_adjoint_on_vectors(
        pick in any::<prop::sample::Index>(),
        pos in any::<prop::sample::Index>(),
        seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..8),
    ) {
        let alg = e5();
        let grs = gradings(alg, 4);
        let gr = &grs[pick.index(grs.len())];
        let i = 1 + pos.index(gr.len() - 1);
        let tags = gr.word.tags();
        let (down, up) = if tags[i - 1] == tags[i] {
            let c = alg.annihilation(gr, i).unwrap();
            let cd = alg.creation(c.codomain_grading(), i).unwrap();
            (c, cd)
        } else {
            let cup = alg.cup(gr, i).unwrap();
            let cap = alg.cap(cup.codomain_grading(), i, CapOrder::of(tags[i - 1])).unwrap();
            (cup, cap)
        };
        let u = cvec(&seed, down.matrix.ncols());
        let v = cvec(&seed[1..].iter().chain(&seed[..1]).copied().collect::<Vec<_>>(), down.matrix.nrows());
        let lhs = dot(&v, &(&down.matrix * &u));
        let rhs = dot(&(&up.matrix * &v), &u);
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + lhs.norm()));
    }

    #[test]
    fn factorizer_replays_a3(pick in any::<prop::sample::Index>(), which in any::<prop::sample::Index>()) {
        let alg = a3();
        let grs = alg.gradings(4);
        let gr = &grs[pick.index(grs.len())];
        let paths = enumerate_paths(alg.graph(), gr).unwrap();
        prop_assume!(!paths.is_empty());
        let p = &paths[which.index(paths.len())];
        let rec = factorize_path(alg, p).unwrap();
        let c = replay(alg, &rec).unwrap().coefficient(p);
        let w: Complex64 = rec.peels.iter().map(|pl| pl.weight).product();
        prop_assert!(c.norm() > 1e-12);
        prop_assert!((c - w).norm() <= 1e-10 * w.norm().max(1.0));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn solver_seed_does_not_matter(seed in any::<u64>()) {
        let g = build_a_graph(2);
        let shipped = shipped_cells(&g).unwrap();
        let solved = solve_cells(&g, seed, DEFAULT_TOL).unwrap();
        for (a, b) in shipped.values().iter().zip(solved.values()) {
            prop_assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }
}
