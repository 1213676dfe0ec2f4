//! Headless check suite. Each check reproduces one acceptance criterion
//! with its tolerances pinned; the `verify` subcommand and the `acceptance`
//! test target both run these.

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varalg_core::linalg::{tridiagonal_rows, SpdMatrix};
use varalg_core::nonlin::{catalog_make, CatalogParams};
use varalg_core::oracle::{grid_critical_points, GridSpec};
use varalg_core::problems::{build_fourth_order, build_lattice, build_tridiagonal, rectangle_net, Problem};
use varalg_core::solver::{
    a_priori_radius, critical_set, find_two_solutions, lambda_sweep, Classification, EnergyModel, SolverConfig,
};
use varalg_core::thresholds::{
    lambda_star_from, max_rho, sublevel_ratio_scan, abar_threshold, three_solution_report, RhoSearch,
};
use varalg_core::vecops::{hausdorff, norm2};

use crate::commands::CommandError;

/// Single-component maximum of `ΣF_k(t)/t²` for the 2×2 lattice problem.
pub const EX42_RHO: f64 = 0.3787311542;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub detail: String,
}

impl Outcome {
    fn new(passed: bool, detail: impl Into<String>) -> Self {
        Outcome { passed, detail: detail.into() }
    }
}

pub struct Check {
    pub id: &'static str,
    pub title: &'static str,
    pub run: fn() -> Outcome,
}

pub const CHECKS: &[Check] = &[
    Check { id: "1", title: "lattice example threshold", run: threshold_ex42 },
    Check { id: "2", title: "lattice example solutions at lambda = 3", run: solutions_ex42 },
    Check { id: "3", title: "lattice assembly", run: lattice_assembly },
    Check { id: "4", title: "tridiagonal spectrum", run: tridiagonal_spectrum },
    Check { id: "5", title: "fourth-order stencil", run: fourth_order_stencil },
    Check { id: "6", title: "norm inequalities", run: norm_inequalities },
    Check { id: "7", title: "oracle equivalence", run: oracle_equivalence },
    Check { id: "8", title: "closed-form n=1 benchmark", run: benchmark_n1 },
    Check { id: "9", title: "three-solution instance at lambda = 1", run: three_solutions_literal },
    Check { id: "9s", title: "three-solution instance inside the recomputed window", run: three_solutions_window },
    Check { id: "10", title: "sublevel ratio scan", run: ratio_scan },
    Check { id: "11", title: "scaling law and non-vanishing minimizer", run: scaling_law },
    Check { id: "12", title: "gradient and Hessian finite differences", run: derivative_checks },
    Check { id: "abar", title: "two bounded solutions below abar", run: abar_empirical },
];

pub fn find(id: &str) -> Option<&'static Check> {
    CHECKS.iter().find(|c| c.id == id)
}

pub fn format_line(check: &Check, outcome: &Outcome) -> String {
    let tag = if outcome.passed { "PASS" } else { "FAIL" };
    format!("{tag} [{}] {}: {}", check.id, check.title, outcome.detail)
}

pub fn run_verify() -> Result<String, CommandError> {
    let mut output = String::new();
    let mut failed = 0;
    for check in CHECKS {
        let outcome = (check.run)();
        failed += usize::from(!outcome.passed);
        output.push_str(&format_line(check, &outcome));
        output.push('\n');
    }
    if failed == 0 {
        Ok(output)
    } else {
        Err(CommandError::VerifyFailed { failed, output })
    }
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn catalog(name: &str, params: CatalogParams) -> varalg_core::Nonlinearity {
    catalog_make(name, &params).expect("catalog entry")
}

pub fn ex42() -> Problem {
    build_lattice(&rectangle_net(2, 2).expect("2x2 net"), catalog("ex42_logistic_log", CatalogParams::with_n(4)))
        .expect("lattice problem")
}

pub fn ex37_n2() -> Problem {
    build_tridiagonal(2, -1.0, 2.0, catalog("ex37_sqrt", CatalogParams::with_n(2))).expect("tridiagonal problem")
}

pub fn benchmark() -> Problem {
    Problem::new(SpdMatrix::new(&[vec![2.0]]).expect("1x1"), catalog("rational_sq", CatalogParams::with_n(1)))
        .expect("benchmark problem")
}

fn threshold_ex42() -> Outcome {
    let p = ex42();
    let (res, time) = timed(|| max_rho(&p, &RhoSearch::default()));
    let Ok(rho) = res else {
        return Outcome::new(false, format!("{res:?}"));
    };
    let lambda_star = lambda_star_from(&p, &rho);
    let (e_rho, e_star) = (rel(rho.rho_max, 4.0 * EX42_RHO), rel(lambda_star, 1.0 / EX42_RHO));
    Outcome::new(
        e_rho < 1e-6 && e_star < 1e-5 && time < Duration::from_secs(1),
        format!(
            "rho_max = {:.10} (rel err {e_rho:.1e}), lambda* = {lambda_star:.7} (rel err {e_star:.1e}), {:.3} s",
            rho.rho_max,
            time.as_secs_f64()
        ),
    )
}

fn solutions_ex42() -> Outcome {
    let p = ex42();
    let (res, time) = timed(|| find_two_solutions(&p, 3.0, &SolverConfig::default()));
    let two = match res {
        Ok(t) => t,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let (u1, u2) = (&two.u1, &two.u2);
    let distinct = varalg_core::vecops::dist2(&u1.u, &u2.u) > 1e-6;
    let residual = u1.residual.max(u2.residual);
    let positive = u1.min_component() > 0.0 && u2.min_component() > 0.0;
    let conditions = two.sign_conditions.a1_holds && two.sign_conditions.a2_holds && two.f_nonnegative;
    let ok = u1.nontrivial
        && u2.nontrivial
        && distinct
        && residual < 1e-8
        && u1.energy < 0.0
        && u2.energy > 0.0
        && positive
        && conditions
        && time < Duration::from_secs(5);
    Outcome::new(
        ok,
        format!(
            "J(u1) = {:.6}, J(u2) = {:.6}, max residual {residual:.1e}, min components {:.4}/{:.4}, A1+A2+f>=0 {conditions}, {:.3} s",
            u1.energy,
            u2.energy,
            u1.min_component(),
            u2.min_component(),
            time.as_secs_f64()
        ),
    )
}

fn lattice_assembly() -> Outcome {
    let expected = [
        [4.0, -1.0, -1.0, 0.0],
        [-1.0, 4.0, 0.0, -1.0],
        [-1.0, 0.0, 4.0, -1.0],
        [0.0, -1.0, -1.0, 4.0],
    ];
    let m = ex42();
    let mismatches = (0..4).flat_map(|i| (0..4).map(move |j| (i, j))).filter(|&(i, j)| m.matrix().get(i, j) != expected[i][j]).count();
    Outcome::new(mismatches == 0, format!("{mismatches} of 16 entries differ"))
}

fn tridiagonal_spectrum() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut cases = 0;
    for n in 2..=50usize {
        for a in [-1.0f64, -2.0] {
            let c = (PI / (n + 1) as f64).cos();
            for b in [2.0 * a.abs(), 2.0 * a.abs() * c + 0.5] {
                let Ok(m) = SpdMatrix::new(&tridiagonal_rows(n, a, b)) else {
                    return Outcome::new(false, format!("Trid_{n}({a}, {b}, {a}) rejected"));
                };
                let mut want: Vec<f64> = (1..=n).map(|k| b + 2.0 * a * (k as f64 * PI / (n + 1) as f64).cos()).collect();
                want.sort_by(f64::total_cmp);
                for (got, want) in m.spectrum().iter().zip(&want) {
                    worst = worst.max((got - want).abs());
                }
                cases += 1;
            }
        }
    }
    Outcome::new(worst < 1e-10, format!("{cases} matrices, max eigenvalue error {worst:.1e}"))
}

fn fourth_order_stencil() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for n in 1..=10usize {
        let p = build_fourth_order(n, catalog("rational_sq", CatalogParams::with_n(n))).expect("fourth-order problem");
        for _ in 0..100 {
            let u: Vec<f64> = (0..n).map(|_| rng.random_range(-5.0..5.0)).collect();
            let au = p.matrix().mul_vec(&u);
            let padded: Vec<f64> = [0.0, 0.0].iter().chain(&u).chain(&[0.0, 0.0]).copied().collect();
            for (k, w) in padded.windows(5).enumerate() {
                let stencil = w[0] - 4.0 * w[1] + 6.0 * w[2] - 4.0 * w[3] + w[4];
                worst = worst.max((au[k] - stencil).abs());
            }
        }
    }
    Outcome::new(worst < 1e-12, format!("1000 vectors, max deviation {worst:.1e}"))
}

fn random_spd(rng: &mut ChaCha8Rng, n: usize) -> SpdMatrix {
    let m: Vec<f64> = (0..n * n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| (0..n).map(|k| m[k * n + i] * m[k * n + j]).sum::<f64>() + if i == j { 0.1 } else { 0.0 })
                .collect()
        })
        .collect();
    SpdMatrix::new(&rows).expect("MᵗM + 0.1 I is SPD")
}

fn norm_inequalities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut violations = 0;
    let mut worst_eig: f64 = 0.0;
    for _ in 0..1000 {
        let n = rng.random_range(1..=8usize);
        let a = random_spd(&mut rng, n);
        let u: Vec<f64> = (0..n).map(|_| rng.random_range(-10.0..10.0)).collect();
        if !a.verify_norm_bounds(&u).expect("matching dimension").all() {
            violations += 1;
        }
        let v = a.eigen().vector(0);
        let gap = a.quadratic_form(&v) - a.lambda_min() * norm2(&v).powi(2);
        worst_eig = worst_eig.max(gap.abs());
    }
    Outcome::new(
        violations == 0 && worst_eig < 1e-10,
        format!("{violations} violations in 1000 pairs, eigenvector lower-bound gap {worst_eig:.1e}"),
    )
}

fn oracle_gap(p: &Problem, lambda: f64, grid: GridSpec) -> Result<f64, String> {
    let solver: Vec<Vec<f64>> = critical_set(p, lambda, &SolverConfig::default())
        .map_err(|e| e.to_string())?
        .into_iter()
        .map(|c| c.u)
        .collect();
    let oracle = grid_critical_points(p, lambda, grid).map_err(|e| e.to_string())?;
    Ok(hausdorff(&solver, &oracle))
}

fn oracle_equivalence() -> Outcome {
    let tensor = build_tridiagonal(2, -1.0, 2.0, catalog("rational_sq", CatalogParams::with_n(2))).expect("Trid_2");
    let reduced = Problem::new(
        SpdMatrix::new(&[vec![2.0]]).expect("1x1"),
        catalog("ex42_logistic_log", CatalogParams::with_n(1)),
    )
    .expect("reduced lattice problem");
    let mut worst: f64 = 0.0;
    for lambda in [1.0, 2.5, 4.0, 6.0, 9.0] {
        // |f| < 1 and λ₁ = 1 keep every solution in ‖u‖₂ ≤ λ√2.
        match oracle_gap(&tensor, lambda, GridSpec { radius: 1.5 * lambda + 0.5, steps: 401 }) {
            Ok(d) => worst = worst.max(d),
            Err(e) => return Outcome::new(false, format!("rational_sq tensor, lambda {lambda}: {e}")),
        }
    }
    for lambda in [1.0, 2.0, 3.0, 5.0, 8.0] {
        // 2t = λ log(1+t²) has no root beyond t = 100 for λ ≤ 8.
        match oracle_gap(&reduced, lambda, GridSpec { radius: 100.0, steps: 200_001 }) {
            Ok(d) => worst = worst.max(d),
            Err(e) => return Outcome::new(false, format!("reduced lattice, lambda {lambda}: {e}")),
        }
    }
    Outcome::new(worst < 1e-4, format!("10 (problem, lambda) pairs, max Hausdorff distance {worst:.1e}"))
}

fn benchmark_n1() -> Outcome {
    let p = benchmark();
    let points = match critical_set(&p, 5.0, &SolverConfig::default()) {
        Ok(pts) => pts,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let mut by_u = points.clone();
    by_u.sort_by(|a, b| a.u[0].total_cmp(&b.u[0]));
    // J(u) = u² − 5(u − atan u) at each root of 2u = 5u²/(1+u²).
    let energy = |u: f64| u * u - 5.0 * (u - u.atan());
    let want = [
        (0.0, Classification::LocalMin),
        (0.5, Classification::Saddle { index: 1 }),
        (2.0, Classification::LocalMin),
    ];
    let ok = by_u.len() == 3
        && by_u.iter().zip(&want).all(|(c, &(u, class))| {
            (c.u[0] - u).abs() < 1e-8 && c.classification == class && (c.energy - energy(u)).abs() < 1e-5
        });
    let found: Vec<String> = by_u.iter().map(|c| format!("{:.10} ({}, J = {:.8})", c.u[0], c.classification.as_str(), c.energy)).collect();
    // The listed −0.46362 disagrees with the closed form −0.4642564 by
    // 6.4e-4; the check uses the closed form.
    Outcome::new(ok, format!("critical set [{}], energies against closed forms within 1e-5", found.join(", ")))
}

fn three_solutions_at(lambda: f64, expect_literal: bool) -> Outcome {
    let p = ex37_n2();
    let h = 2.0;
    let w = match three_solution_report(&p, 2.0, 3.0, h) {
        Ok(w) => w,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let (l1, l2, l3) = (w.lambda1_star.unwrap_or(f64::NAN), w.lambda2_star.unwrap_or(f64::NAN), w.lambda3h_star.unwrap_or(f64::NAN));
    let thresholds_ok = if expect_literal {
        (l1 - 0.5).abs() < 1e-12 && l2 == f64::INFINITY && (l3 - 0.5 * h).abs() < 1e-12
    } else {
        l2 == f64::INFINITY && l1 < lambda && lambda < l2
    };
    let points = match critical_set(&p, lambda, &SolverConfig::default()) {
        Ok(pts) => pts,
        Err(e) => return Outcome::new(false, format!("critical set at lambda {lambda}: {e}")),
    };
    let good: Vec<_> = points.iter().filter(|c| c.residual < 1e-8).collect();
    let nontrivial = good.iter().filter(|c| c.nontrivial).count();
    let ok = w.g1_holds && w.g2_holds && thresholds_ok && good.len() >= 3 && nontrivial >= 2;
    Outcome::new(
        ok,
        format!(
            "g1 {} g2 {}, lambda1* = {l1}, lambda2* = {l2}, lambda3h* (h = {h}) = {l3}; at lambda {lambda}: {} critical points, {nontrivial} nontrivial",
            w.g1_holds,
            w.g2_holds,
            good.len()
        ),
    )
}

/// The criterion as stated: `λ₁* = 0.5` and three critical points at `λ = 1`.
fn three_solutions_literal() -> Outcome {
    three_solutions_at(1.0, true)
}

/// Same instance at `λ = 5`, inside the window `(λ₁*, ∞)` this crate computes.
fn three_solutions_window() -> Outcome {
    three_solutions_at(5.0, false)
}

fn ratio_scan() -> Outcome {
    let scan = match sublevel_ratio_scan(&ex42(), 8) {
        Ok(s) => s,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let (first, last) = (scan.points[0].1, scan.points[8].1);
    let ok = last < 1e-3 * first && scan.tail_decreasing(4);
    Outcome::new(ok, format!("ratio at 1 = {first:.3e}, at 1e-8 = {last:.3e}, last four decades decreasing {}", scan.tail_decreasing(4)))
}

fn scaling_law() -> Outcome {
    let cfg = SolverConfig::default();
    let power = Problem::new(
        SpdMatrix::identity(1),
        catalog("power", CatalogParams::with_n(1).number("q", 0.5).number("positive_part", 1.0)),
    )
    .expect("power problem");
    let lambdas: Vec<f64> = (0..7).map(|k| f64::from(1u32 << k)).collect();
    let Some(fit) = lambda_sweep(&power, &lambdas, true, &cfg).slope_fit else {
        return Outcome::new(false, "power sweep produced no slope fit");
    };
    let sweep: Vec<f64> = (0..5).map(|k| 3.0 * 2f64.powi(k)).collect();
    let norms: Vec<Option<f64>> = lambda_sweep(&ex42(), &sweep, false, &cfg).records.iter().map(|r| r.min_norm).collect();
    let nondecreasing = norms.iter().all(Option::is_some) && norms.windows(2).all(|w| w[1] >= w[0]);
    let shown: Vec<String> = norms.iter().map(|m| m.map_or("-".into(), |m| format!("{m:.4}"))).collect();
    Outcome::new(
        (fit.slope - 2.0).abs() <= 0.05 && nondecreasing,
        format!("power slope {:.4}; lattice min_norm over lambda 3..48: [{}]", fit.slope, shown.join(", ")),
    )
}

fn catalog_problems() -> Vec<(&'static str, Problem)> {
    let trid = |n, f| build_tridiagonal(n, -1.0, 2.0, f).expect("tridiagonal problem");
    vec![
        ("rational_sq", trid(3, catalog("rational_sq", CatalogParams::with_n(3)))),
        ("ex42_logistic_log", ex42()),
        ("ex37_sqrt", ex37_n2()),
        ("ex41_log", trid(2, catalog("ex41_log", CatalogParams::with_n(2)))),
        ("power", trid(2, catalog("power", CatalogParams::with_n(2).number("q", 0.5)))),
    ]
}

/// Samples `u` with every component at least 0.05 from 0 and the kinks.
fn sample_away_from_kinks(rng: &mut ChaCha8Rng, p: &Problem) -> Vec<f64> {
    p.nonlinearity()
        .components()
        .iter()
        .map(|f| loop {
            let x: f64 = rng.random_range(-6.0..6.0);
            if f.kinks().iter().chain(&[0.0]).all(|k| (x - k).abs() > 0.05) {
                break x;
            }
        })
        .collect()
}

// NaN differences must count as mismatches.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
fn derivative_checks() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let mut failures = Vec::new();
    let mut hessian_cases = 0;
    for (name, p) in catalog_problems() {
        let closed = p.nonlinearity().components().iter().all(|f| f.has_closed_derivative());
        for _ in 0..100 {
            let u = sample_away_from_kinks(&mut rng, &p);
            let lambda = rng.random_range(0.1..10.0);
            let m = EnergyModel::new(&p, lambda);
            let g = m.gradient(&u);
            let tol = 1e-6 * (1.0 + norm2(&g));
            for k in 0..u.len() {
                let h = 1e-4;
                let (mut lo, mut hi) = (u.clone(), u.clone());
                lo[k] -= h;
                hi[k] += h;
                let fd = m.energy_change(&lo, &hi).map_or(f64::NAN, |d| d / (2.0 * h));
                if !((fd - g[k]).abs() < tol) {
                    failures.push(format!("{name} gradient[{k}] {fd} vs {}", g[k]));
                }
            }
            let Ok(hess) = m.hessian(&u) else { continue };
            if !closed {
                continue;
            }
            hessian_cases += 1;
            let n = u.len();
            for j in 0..n {
                let h = 1e-6;
                let (mut lo, mut hi) = (u.clone(), u.clone());
                lo[j] -= h;
                hi[j] += h;
                let (gl, gh) = (m.gradient(&lo), m.gradient(&hi));
                for i in 0..n {
                    let fd = (gh[i] - gl[i]) / (2.0 * h);
                    let exact = hess[i * n + j];
                    if !((fd - exact).abs() <= 1e-5 * (1.0 + exact.abs())) {
                        failures.push(format!("{name} hessian[{i},{j}] {fd} vs {exact}"));
                    }
                }
            }
        }
    }
    Outcome::new(
        failures.is_empty(),
        match failures.first() {
            None => format!("500 gradient samples, {hessian_cases} Hessian samples, no mismatches"),
            Some(f) => format!("{} mismatches, first: {f}", failures.len()),
        },
    )
}

/// Two bounded nontrivial solutions at three λ spread over `(λ*, ā)`.
fn abar_empirical() -> Outcome {
    let p = ex42();
    let a = match abar_threshold(&p, 0.5, &RhoSearch::default()) {
        Ok(a) => a,
        Err(e) => return Outcome::new(false, e.to_string()),
    };
    let mut notes = Vec::new();
    let mut ok = true;
    for frac in [0.25, 0.5, 0.75] {
        let lambda = a.lambda_star + frac * (a.abar - a.lambda_star);
        let bound = a_priori_radius(&p, lambda).unwrap_or(f64::INFINITY);
        match find_two_solutions(&p, lambda, &SolverConfig::default()) {
            Ok(two) => {
                let bounded = two.u1.norm() <= bound && two.u2.norm() <= bound;
                ok &= bounded && two.u1.nontrivial && two.u2.nontrivial;
                notes.push(format!("lambda {lambda:.4}: norms {:.4}/{:.4} <= {bound:.1}", two.u1.norm(), two.u2.norm()));
            }
            Err(e) => {
                ok = false;
                notes.push(format!("lambda {lambda:.4}: {e}"));
            }
        }
    }
    Outcome::new(ok, format!("abar = {:.4} (epsilon 0.5); {}", a.abar, notes.join("; ")))
}
