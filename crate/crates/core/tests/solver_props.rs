use proptest::prelude::*;
use varalg_core::linalg::SpdMatrix;
use varalg_core::nonlin::{catalog_make, CatalogParams};
use varalg_core::problems::{build_lattice, build_tridiagonal, rectangle_net, Problem};
use varalg_core::solver::{critical_set, find_two_solutions, EnergyModel, SolverConfig};
use varalg_core::thresholds::{lambda_star, RhoSearch};
use varalg_core::vecops::{dist2, hausdorff, norm2};

fn catalog_problems() -> Vec<(&'static str, Problem)> {
    let make = |name: &str, params: CatalogParams| catalog_make(name, &params).unwrap();
    vec![
        ("rational_sq", build_tridiagonal(3, -1.0, 2.0, make("rational_sq", CatalogParams::with_n(3))).unwrap()),
        (
            "ex42",
            build_lattice(&rectangle_net(2, 2).unwrap(), make("ex42_logistic_log", CatalogParams::with_n(4))).unwrap(),
        ),
        ("ex37", build_tridiagonal(2, -1.0, 2.0, make("ex37_sqrt", CatalogParams::with_n(2))).unwrap()),
        ("ex41", build_tridiagonal(2, -1.0, 2.0, make("ex41_log", CatalogParams::with_n(2))).unwrap()),
        ("power", build_tridiagonal(2, -1.0, 2.0, make("power", CatalogParams::with_n(2).number("q", 0.5))).unwrap()),
    ]
}

fn away_from_kinks(p: &Problem, u: &[f64], margin: f64) -> bool {
    p.nonlinearity()
        .components()
        .iter()
        .zip(u)
        .all(|(f, &x)| f.kinks().iter().chain(&[0.0]).all(|k| (x - k).abs() > margin))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn gradient_matches_finite_differences(raw in prop::collection::vec(-6.0..6.0f64, 4), lambda in 0.1..10.0f64) {
        for (name, p) in catalog_problems() {
            let u = &raw[..p.dim()];
            if !away_from_kinks(&p, u, 0.05) {
                continue;
            }
            let m = EnergyModel::new(&p, lambda);
            let g = m.gradient(u);
            let scale = 1e-6 * (1.0 + norm2(&g));
            for k in 0..u.len() {
                let h = 1e-4;
                let (mut lo, mut hi) = (u.to_vec(), u.to_vec());
                lo[k] -= h;
                hi[k] += h;
                let fd = m.energy_change(&lo, &hi).unwrap() / (2.0 * h);
                prop_assert!((fd - g[k]).abs() < scale, "{name} k={k}: {fd} vs {}", g[k]);
            }
        }
    }

    #[test]
    fn hessian_matches_finite_differences(raw in prop::collection::vec(-6.0..6.0f64, 4), lambda in 0.1..10.0f64) {
        for (name, p) in catalog_problems() {
            let u = &raw[..p.dim()];
            let closed = p.nonlinearity().components().iter().all(|f| f.has_closed_derivative());
            if !closed || !away_from_kinks(&p, u, 0.05) {
                continue;
            }
            let m = EnergyModel::new(&p, lambda);
            let Ok(hess) = m.hessian(u) else { continue };
            let n = u.len();
            for j in 0..n {
                let h = 1e-6;
                let (mut lo, mut hi) = (u.to_vec(), u.to_vec());
                lo[j] -= h;
                hi[j] += h;
                let (gl, gh) = (m.gradient(&lo), m.gradient(&hi));
                for i in 0..n {
                    let fd = (gh[i] - gl[i]) / (2.0 * h);
                    let exact = hess[i * n + j];
                    prop_assert!((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs()), "{name} ({i},{j}): {fd} vs {exact}");
                }
            }
        }
    }
}

fn benchmark(scale: f64) -> Problem {
    let f = catalog_make("rational_sq", &CatalogParams::with_n(1).number("scale", scale)).unwrap();
    Problem::new(SpdMatrix::new(&[vec![2.0 * scale]]).unwrap(), f).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn critical_set_is_scale_invariant(c in 0.2..5.0f64, lambda in 3.0..8.0f64) {
        let cfg = SolverConfig::default();
        let base: Vec<Vec<f64>> = critical_set(&benchmark(1.0), lambda, &cfg).unwrap().into_iter().map(|p| p.u).collect();
        let scaled: Vec<Vec<f64>> = critical_set(&benchmark(c), lambda, &cfg).unwrap().into_iter().map(|p| p.u).collect();
        prop_assert_eq!(base.len(), scaled.len());
        prop_assert!(hausdorff(&base, &scaled) < 1e-8);
    }

    #[test]
    fn returned_points_are_critical_and_positive(factor in 1.05..3.0f64) {
        let (_, p) = catalog_problems().swap_remove(1);
        let ls = lambda_star(&p, &RhoSearch::default()).unwrap();
        let lambda = factor * ls;
        let cfg = SolverConfig::default();
        let two = find_two_solutions(&p, lambda, &cfg).unwrap();
        for cp in [&two.u1, &two.u2] {
            let m = EnergyModel::new(&p, lambda);
            prop_assert!(norm2(&m.gradient(&cp.u)) <= 1e-9 * (1.0 + norm2(&cp.u)));
            prop_assert!(cp.nontrivial);
            prop_assert!(cp.min_component() > 0.0, "{:?}", cp.u);
        }
        prop_assert!(two.u1.energy < 0.0 && 0.0 < two.u2.energy);
        prop_assert!(dist2(&two.u1.u, &two.u2.u) > 1e-6);
    }
}
