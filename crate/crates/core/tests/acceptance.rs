//! Acceptance criteria, one PASS/FAIL line each. Exits nonzero if any fail.

use std::time::{Duration, Instant};

use num_complex::Complex64;
use su3paths::cells::{gauge_transform, shipped_cells, GaugePhases};
use su3paths::cli::dispatch;
use su3paths::essential::{
    decomposition_sweep, essential_basis, essential_dims, factorize_path, kernel_membership, replay,
};
use su3paths::fusion::{parse_product, A2_TABLE, A2_TABLE_ORDER};
use su3paths::graphs::{build_a_graph, build_e5_graph, q_dim_triangular, spectral_data, GraphSpec};
use su3paths::linalg::max_abs;
use su3paths::operators::{CapOrder, PathAlgebra};
use su3paths::paths::{enumerate_paths, ElementaryPath};
use su3paths::reference;

const SPECTRAL_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-8;
const ADJOINT_TOL: f64 = 1e-12;
const SPOT_TOL: f64 = 1e-9;
const MAX_LEN: usize = 4;

fn algebra(g: GraphSpec) -> PathAlgebra {
    let cells = shipped_cells(&g).expect("shipped cells");
    PathAlgebra::new(g, cells).expect("algebra")
}

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn fusion_table() -> Outcome {
    let t = Instant::now();
    let r = dispatch(["su3paths", "fusion", "table", "a2", "--json"]);
    let elapsed = t.elapsed();
    let json = r.json.expect("json payload");
    let g = build_a_graph(2);
    let mut matched = 0;
    for (i, x) in A2_TABLE_ORDER.iter().enumerate() {
        for (j, _) in A2_TABLE_ORDER.iter().enumerate() {
            assert_eq!(json["order"][i], *x);
            let got = parse_product(&g, json["table"][i][j].as_str().unwrap()).unwrap();
            if got == parse_product(&g, A2_TABLE[i][j]).unwrap() {
                matched += 1;
            }
        }
    }
    outcome(
        r.code == 0 && matched == 36 && elapsed < Duration::from_secs(1),
        format!("{matched}/36 entries, exit {}, {:.3}s", r.code, elapsed.as_secs_f64()),
    )
}

fn spectral() -> Outcome {
    let a2 = build_a_graph(2);
    let e5 = build_e5_graph();
    let sa = spectral_data(&a2).unwrap();
    let se = spectral_data(&e5).unwrap();
    let da = (sa.beta - (1.0 + 2.0 * (2.0 * std::f64::consts::PI / 5.0).cos())).abs();
    let de = (se.beta - (1.0 + 2f64.sqrt())).abs();
    let dq = a2
        .vertices()
        .iter()
        .zip(&sa.mu)
        .map(|(v, m)| (m - q_dim_triangular(v.tri.unwrap(), 5)).abs())
        .fold(0.0, f64::max);
    outcome(
        da < SPECTRAL_TOL && de < SPECTRAL_TOL && dq < SPECTRAL_TOL,
        format!("|dbeta(A2)| {da:.1e}, |dbeta(E5)| {de:.1e}, max |mu - qdim| {dq:.1e}"),
    )
}

fn essential_counts(alg: &PathAlgebra) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (t, want) in [((0, 0), 6), ((1, 0), 9), ((0, 1), 9), ((2, 0), 6), ((0, 2), 6)] {
        let d = essential_dims(alg, t).unwrap();
        ok &= d.total == want;
        parts.push(format!("({},{}) {}", t.0, t.1, d.total));
    }
    let d = essential_dims(alg, (1, 1)).unwrap();
    ok &= d.total == 18 && d.per_word_matches_fusion;
    parts.push(format!("(1,1) {} per-word=F {}", d.total, d.per_word_matches_fusion));
    let combos = reference::a2_key_vectors(alg.graph()).unwrap();
    let worst = reference::membership(alg, &combos[2..])
        .unwrap()
        .into_iter()
        .map(|(_, r)| r)
        .fold(0.0, f64::max);
    ok &= worst < RESIDUAL_TOL;
    parts.push(format!("diagonal combinations {worst:.1e}"));
    outcome(ok, parts.join(", "))
}

fn essential_vectors(alg: &PathAlgebra) -> Outcome {
    let rs = reference::membership(alg, &reference::a2_key_vectors(alg.graph()).unwrap()).unwrap();
    let worst = rs.iter().map(|(_, r)| *r).fold(0.0, f64::max);
    outcome(
        rs.len() == 5 && worst < RESIDUAL_TOL,
        format!("{} vectors, max residual {worst:.1e}", rs.len()),
    )
}

fn e5_spot_checks(e5: &PathAlgebra) -> Outcome {
    // the magnitude comparison inside uses 1e-9
    let _ = SPOT_TOL;
    let checks = reference::e5_spot_checks(e5).unwrap();
    let failed: Vec<String> = checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    let last = checks.last().map(|c| c.detail.clone()).unwrap_or_default();
    outcome(
        failed.is_empty() && checks.len() == 4,
        if failed.is_empty() { format!("4 checks; {last}") } else { format!("failed: {}", failed.join("; ")) },
    )
}

fn temperley_lieb(a2: &PathAlgebra, e5: &PathAlgebra) -> Outcome {
    let t = Instant::now();
    let mut ok = true;
    let mut parts = Vec::new();
    for alg in [a2, e5] {
        let r = alg.verify_tl(MAX_LEN).unwrap();
        for rel in &r.relations {
            if !(rel.max_residual < RESIDUAL_TOL) {
                ok = false;
                parts.push(format!("{} {} {:.3e}", r.graph, rel.name, rel.max_residual));
            }
        }
        let worst = r.relations.iter().map(|x| x.max_residual).fold(0.0, f64::max);
        parts.push(format!("{} worst {worst:.2e}", r.graph));
    }
    let elapsed = t.elapsed();
    ok &= elapsed < Duration::from_secs(60);
    parts.push(format!("{:.2}s", elapsed.as_secs_f64()));
    outcome(ok, parts.join(", "))
}

fn adjointness(algs: &[&PathAlgebra]) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut pairs = 0;
    for alg in algs {
        for gr in alg.gradings(MAX_LEN) {
            let tags = gr.word.tags();
            for i in 1..gr.len() {
                let (down, up) = if tags[i - 1] == tags[i] {
                    let c = alg.annihilation(&gr, i).unwrap();
                    let cd = alg.creation(c.codomain_grading(), i).unwrap();
                    (c, cd)
                } else {
                    let cup = alg.cup(&gr, i).unwrap();
                    let cap = alg.cap(cup.codomain_grading(), i, CapOrder::of(tags[i - 1])).unwrap();
                    (cup, cap)
                };
                assert_eq!(up.codomain_grading(), &gr);
                worst = worst.max(max_abs(&(down.matrix.adjoint() - &up.matrix)));
                pairs += 1;
            }
        }
    }
    outcome(worst <= ADJOINT_TOL, format!("{pairs} pairs, max |C^dag - C*| {worst:.1e}"))
}

fn decomposition(algs: &[&PathAlgebra]) -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for alg in algs {
        let s = decomposition_sweep(alg, MAX_LEN).unwrap();
        ok &= s.passed;
        parts.push(format!(
            "{}: {} gradings, max residual {:.1e}{}",
            alg.graph().name(),
            s.gradings,
            s.max_residual,
            if s.failures.is_empty() { String::new() } else { format!(", {} failures", s.failures.len()) }
        ));
    }
    outcome(ok, parts.join("; "))
}

fn gauge_robustness(a2: &PathAlgebra) -> Outcome {
    let g = a2.graph().clone();
    let grs = a2.gradings(3);
    let dims = |alg: &PathAlgebra| -> Vec<(usize, usize)> {
        grs.iter()
            .map(|gr| {
                let e = essential_basis(alg, gr).unwrap();
                (e.dim, e.kernel_dim)
            })
            .collect()
    };
    let base = dims(a2);
    let mut changed = 0;
    for seed in 0..100 {
        let cells = gauge_transform(a2.cells(), &GaugePhases::random(&g, seed)).unwrap();
        let alg = PathAlgebra::new(g.clone(), cells).unwrap();
        if dims(&alg) != base {
            changed += 1;
        }
    }
    outcome(changed == 0, format!("100 gauges x {} gradings, {changed} differ", grs.len()))
}

fn length_clause(a2: &PathAlgebra) -> Outcome {
    let g = a2.graph();
    // the three listed paths and their conjugates
    let specs = ["1 3 8 6b", "6 8 3b 1", "6b 3b 3 6", "1 3b 8 6", "6b 8 3 1", "6 3 3b 6b"];
    let mut ok = true;
    let mut parts = Vec::new();
    for s in specs {
        let p = reference::path(g, s).unwrap();
        let e = essential_basis(a2, &p.grading()).unwrap();
        let r = kernel_membership(a2, &[(p.clone(), Complex64::new(1.0, 0.0))]).unwrap();
        let good = r < RESIDUAL_TOL && e.kernel_dim > 0 && e.excluded_by_length_clause && e.vectors.is_empty();
        ok &= good;
        parts.push(format!("{} [{}] kernel {}", p.display(g), p.word(), e.kernel_dim));
    }
    outcome(ok, parts.join(", "))
}

fn factorizer(a2: &PathAlgebra) -> Outcome {
    let g = a2.graph();
    let (mut total, mut bad, mut essential) = (0, Vec::new(), 0);
    for gr in a2.gradings(MAX_LEN) {
        for p in enumerate_paths(g, &gr).unwrap() {
            total += 1;
            let rec = factorize_path(a2, &p).unwrap();
            let v = replay(a2, &rec).unwrap();
            let c = v.coefficient(&p);
            let w: Complex64 = rec.peels.iter().map(|pl| pl.weight).product();
            let mut good = c.norm() > 1e-12 && (c - w).norm() <= 1e-10 * w.norm().max(1.0);
            if is_essential(a2, &p) {
                essential += 1;
                good &= rec.peels.is_empty();
            }
            if !good {
                bad.push(p.display(g));
            }
        }
    }
    outcome(
        bad.is_empty(),
        if bad.is_empty() {
            format!("{total} paths ({essential} essential) replayed")
        } else {
            format!("{} of {total} failed, e.g. {}", bad.len(), bad[0])
        },
    )
}

fn is_essential(alg: &PathAlgebra, p: &ElementaryPath) -> bool {
    let (a, b) = p.path_type();
    a + b <= alg.graph().level()
        && kernel_membership(alg, &[(p.clone(), Complex64::new(1.0, 0.0))]).unwrap() < RESIDUAL_TOL
}

fn main() {
    let a2 = algebra(build_a_graph(2));
    let e5 = algebra(build_e5_graph());
    let criteria: Vec<(&str, Box<dyn Fn() -> Outcome>)> = vec![
        ("fusion table (A2)", Box::new(fusion_table)),
        ("spectral data", Box::new(spectral)),
        ("essential counts (A2)", Box::new(|| essential_counts(&a2))),
        ("essential vectors (A2)", Box::new(|| essential_vectors(&a2))),
        ("E5 annihilation spot checks", Box::new(|| e5_spot_checks(&e5))),
        ("Temperley-Lieb relations (A2, E5, |word| <= 4)", Box::new(|| temperley_lieb(&a2, &e5))),
        ("adjointness", Box::new(|| adjointness(&[&a2, &e5]))),
        ("decomposition (A2, E5, |word| <= 4)", Box::new(|| decomposition(&[&a2, &e5]))),
        ("gauge robustness (A2, |word| <= 3)", Box::new(|| gauge_robustness(&a2))),
        ("length clause (A2)", Box::new(|| length_clause(&a2))),
        ("factorizer (A2, |word| <= 4)", Box::new(|| factorizer(&a2))),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        if !o.passed {
            failed += 1;
        }
        println!("{} {:>2}. {name}: {}", if o.passed { "PASS" } else { "FAIL" }, i + 1, o.detail);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
