use varalg_core::linalg::SpdMatrix;
use varalg_core::nonlin::{catalog_make, CatalogParams};
use varalg_core::oracle::{grid_critical_points, GridSpec};
use varalg_core::problems::{build_tridiagonal, Problem};
use varalg_core::solver::{critical_set, SolverConfig};
use varalg_core::vecops::hausdorff;

fn compare(p: &Problem, lambda: f64, grid: GridSpec) {
    let solver: Vec<Vec<f64>> =
        critical_set(p, lambda, &SolverConfig::default()).unwrap().into_iter().map(|c| c.u).collect();
    let oracle = grid_critical_points(p, lambda, grid).unwrap();
    let d = hausdorff(&solver, &oracle);
    assert!(d < 1e-4, "λ = {lambda}: solver {solver:?}\noracle {oracle:?}");
}

#[test]
fn rational_tensor_matches_grid() {
    let f = catalog_make("rational_sq", &CatalogParams::with_n(2)).unwrap();
    let p = build_tridiagonal(2, -1.0, 2.0, f).unwrap();
    for lambda in [1.0, 2.5, 4.0, 6.0, 9.0] {
        // |f| < 1 and λ₁ = 1 put every solution in ‖u‖₂ ≤ λ√2.
        compare(&p, lambda, GridSpec { radius: 1.5 * lambda + 0.5, steps: 401 });
    }
}

#[test]
fn reduced_ex42_matches_grid() {
    let f = catalog_make("ex42_logistic_log", &CatalogParams::with_n(1)).unwrap();
    let p = Problem::new(SpdMatrix::new(&[vec![2.0]]).unwrap(), f).unwrap();
    for lambda in [1.0, 2.0, 3.0, 5.0, 8.0] {
        // 2t = λ log(1+t²) has no root beyond t = 100 for λ ≤ 8.
        compare(&p, lambda, GridSpec { radius: 100.0, steps: 200_001 });
    }
}
