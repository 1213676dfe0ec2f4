//! Parameter thresholds for multiplicity of solutions.
//!
//! With `ρ(t) = Σ_k F_k(t)/t²` and `1ᵗA1` the ones form:
//!
//! * `λ* = 1ᵗA1 / (2 max_{t≠0} ρ(t))` — above it there are two nontrivial
//!   solutions (global minimizer and mountain-pass point);
//! * the sublevel bound `Σ_k max_{|ξ|≤√(2ϱ/λ₁)} F_k(ξ)` which dominates
//!   `Ψ` on `{uᵗAu < 2ϱ}`, and its ratio to `ϱ` as `ϱ → 0`;
//! * `ā`, the upper end of the parameter window for bounded solutions;
//! * the three-solution window built from `γ < δ`: with
//!   `S_γ = Σ_k max_{|ξ|≤γ} F_k(ξ)` and `S_δ = Σ_k F_k(δ)`,
//!   `η = λ₁γ² / (λ₁γ² + 1ᵗA1·δ²)`, conditions `δ > √(λ₁/1ᵗA1)·γ` and
//!   `S_γ < η S_δ`, and thresholds
//!   `λ₁* = 1ᵗA1·δ² / (2(S_δ − S_γ))`, `λ₂* = λ₁γ² / (2 S_γ)` and
//!   `λ₃,h* = hλ₁γ² / (2(λ₁γ² S_δ/(1ᵗA1·δ²) − S_γ))`.

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;
use thiserror::Error;

use crate::nonlin::{probe_hypotheses, HypothesisVerdict, NonlinError, ScalarFunction, Verdict};
use crate::problems::Problem;
use crate::search::golden_max;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ThresholdError {
    #[error("sup of Σ F_k(t) over the probed range is not positive (best ρ = {best:e} at t = {t})")]
    NonpositiveSup { best: f64, t: f64 },
    #[error(transparent)]
    Nonlin(#[from] NonlinError),
    #[error("first condition fails: δ = {delta} must exceed √(λ₁/1ᵗA1)·γ = {required}")]
    InfeasibleG1 { delta: f64, required: f64 },
    #[error("second condition fails: S_γ = {lhs:e} is not below η·S_δ = {rhs:e} (short by {:e})", lhs - rhs)]
    InfeasibleG2 { lhs: f64, rhs: f64 },
    #[error("thresholds out of order: λ₁* = {lambda1_star} is not below λ₂* = {lambda2_star}")]
    EmptyInterval { lambda1_star: f64, lambda2_star: f64 },
    #[error("invalid argument: {0}")]
    BadArgument(&'static str),
}

/// Grid and tolerance for the `ρ` maximization.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RhoSearch {
    pub t_min: f64,
    pub t_max: f64,
    pub per_decade: usize,
    /// Relative tolerance in `t` for golden-section refinement.
    pub rel_tol: f64,
}

impl Default for RhoSearch {
    fn default() -> Self {
        RhoSearch { t_min: 1e-6, t_max: 1e6, per_decade: 64, rel_tol: 1e-10 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RhoMaxResult {
    pub t_star: f64,
    pub rho_max: f64,
    pub bracket: (f64, f64),
    pub grid_evaluations: usize,
    /// The best grid point sits at an end of the search range, so the true
    /// maximum may lie outside it.
    pub range_suspect: bool,
}

fn rho_at(problem: &Problem, t: f64) -> Result<f64, NonlinError> {
    Ok(problem.nonlinearity().diagonal_primitive(t)? / (t * t))
}

/// `Σ_k F_k` on many points, chaining quadratures where needed.
fn diagonal_primitive_many(problem: &Problem, ts: &[f64]) -> Result<Vec<f64>, NonlinError> {
    let mut sum = alloc::vec![0.0; ts.len()];
    for f in problem.nonlinearity().components() {
        for (acc, v) in sum.iter_mut().zip(f.primitive_values(ts)?) {
            *acc += v;
        }
    }
    Ok(sum)
}

/// Maximizes `ρ(t) = Σ_k F_k(t)/t²` over `t ∈ ±[t_min, t_max]`.
///
/// The signed log grid is scanned, the three best non-adjacent grid points
/// are refined by golden-section search on their neighbouring brackets, and
/// the overall best is kept.
pub fn max_rho(problem: &Problem, search: &RhoSearch) -> Result<RhoMaxResult, ThresholdError> {
    if !(search.t_min > 0.0 && search.t_max > search.t_min && search.per_decade > 0) {
        return Err(ThresholdError::BadArgument("need 0 < t_min < t_max and per_decade > 0"));
    }
    let (lo, hi) = (search.t_min.log10(), search.t_max.log10());
    let steps = ((hi - lo) * search.per_decade as f64).ceil().max(1.0) as usize;
    let magnitudes: Vec<f64> = (0..=steps)
        .map(|i| 10f64.powf(lo + (hi - lo) * i as f64 / steps as f64))
        .collect();

    let mut best: Option<RhoMaxResult> = None;
    let mut evaluations = 0;
    for sign in [1.0, -1.0] {
        let ts: Vec<f64> = magnitudes.iter().map(|m| sign * m).collect();
        let values: Vec<f64> = diagonal_primitive_many(problem, &ts)?
            .iter()
            .zip(&ts)
            .map(|(v, t)| v / (t * t))
            .collect();
        evaluations += ts.len();

        let mut order: Vec<usize> = (0..ts.len()).collect();
        order.sort_by(|&a, &b| values[b].total_cmp(&values[a]).then(a.cmp(&b)));
        let mut picked: Vec<usize> = Vec::new();
        for i in order {
            if picked.len() == 3 {
                break;
            }
            if picked.iter().all(|&p| p.abs_diff(i) > 1) {
                picked.push(i);
            }
        }
        for i in picked {
            let a = ts[i.saturating_sub(1)];
            let b = ts[(i + 1).min(ts.len() - 1)];
            let (t, _) = golden_max(
                |t| rho_at(problem, t).unwrap_or(f64::NEG_INFINITY),
                a,
                b,
                search.rel_tol,
            );
            let mut candidate = (t, rho_at(problem, t)?);
            evaluations += 1;
            if values[i] > candidate.1 {
                candidate = (ts[i], values[i]);
            }
            if best.as_ref().is_none_or(|r| candidate.1 > r.rho_max) {
                best = Some(RhoMaxResult {
                    t_star: candidate.0,
                    rho_max: candidate.1,
                    bracket: if a < b { (a, b) } else { (b, a) },
                    grid_evaluations: 0,
                    range_suspect: i == 0 || i == ts.len() - 1,
                });
            }
        }
    }
    let mut best = best.expect("grid is nonempty");
    best.grid_evaluations = evaluations;
    if !(best.rho_max > 0.0) {
        return Err(ThresholdError::NonpositiveSup { best: best.rho_max, t: best.t_star });
    }
    Ok(best)
}

/// `λ* = 1ᵗA1 / (2 ρ_max)`.
pub fn lambda_star_from(problem: &Problem, rho: &RhoMaxResult) -> f64 {
    problem.matrix().ones_form() / (2.0 * rho.rho_max)
}

pub fn lambda_star(problem: &Problem, search: &RhoSearch) -> Result<f64, ThresholdError> {
    Ok(lambda_star_from(problem, &max_rho(problem, search)?))
}

const WINDOW_SCAN_POINTS: usize = 1024;

/// `max_{|ξ| ≤ radius} F(ξ)` by a dense scan plus golden refinement. The
/// result is never below `F(0) = 0`.
pub fn max_primitive_on(f: &ScalarFunction, radius: f64) -> Result<f64, NonlinError> {
    if radius <= 0.0 {
        return Ok(0.0);
    }
    let h = 2.0 * radius / WINDOW_SCAN_POINTS as f64;
    let ts: Vec<f64> = (0..=WINDOW_SCAN_POINTS)
        .map(|i| if i == WINDOW_SCAN_POINTS { radius } else { -radius + h * i as f64 })
        .collect();
    let values = f.primitive_values(&ts)?;
    let (i, &grid_best) = values
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1).then(b.0.cmp(&a.0)))
        .expect("grid is nonempty");
    let a = ts[i.saturating_sub(1)];
    let b = ts[(i + 1).min(WINDOW_SCAN_POINTS)];
    let (t, _) = golden_max(|t| f.primitive_value(t).unwrap_or(f64::NEG_INFINITY), a, b, 1e-12);
    Ok(f.primitive_value(t)?.max(grid_best).max(0.0))
}

/// `Σ_k max_{|ξ| ≤ γ} F_k(ξ)`.
pub fn window_sum(problem: &Problem, gamma: f64) -> Result<f64, NonlinError> {
    problem.nonlinearity().components().iter().map(|f| max_primitive_on(f, gamma)).sum()
}

/// Upper bound for `Ψ` on `{u : uᵗAu/2 < ϱ}`: since `‖u‖∞ ≤ √(2ϱ/λ₁)` there,
/// `Ψ(u) ≤ Σ_k max_{|ξ|≤√(2ϱ/λ₁)} F_k(ξ)`.
pub fn sublevel_sup_bound(problem: &Problem, varrho: f64) -> Result<f64, ThresholdError> {
    if !(varrho > 0.0) {
        return Err(ThresholdError::BadArgument("ϱ must be positive"));
    }
    let radius = (2.0 * varrho / problem.matrix().lambda_min()).sqrt();
    Ok(window_sum(problem, radius)?)
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioScan {
    /// `(ϱ, bound(ϱ)/ϱ)` for `ϱ = 1, 0.1, …, 10^−decades`.
    pub points: Vec<(f64, f64)>,
    /// The growth conditions at infinity or at zero were judged failed, so
    /// the ratio need not vanish.
    pub warning: bool,
}

impl RatioScan {
    /// Whether the ratios over the last `count` decades strictly decrease.
    pub fn tail_decreasing(&self, count: usize) -> bool {
        let k = self.points.len().saturating_sub(count + 1);
        self.points[k..].windows(2).all(|w| w[1].1 < w[0].1)
    }
}

pub fn sublevel_ratio_scan(problem: &Problem, decades: usize) -> Result<RatioScan, ThresholdError> {
    let verdict = probe_hypotheses(problem.nonlinearity(), problem.matrix().lambda_min());
    let warning = verdict.h1.verdict == Verdict::Fail || verdict.h2_prime.verdict == Verdict::Fail;
    let points = (0..=decades)
        .map(|d| {
            let varrho = 10f64.powi(-(d as i32));
            Ok((varrho, sublevel_sup_bound(problem, varrho)? / varrho))
        })
        .collect::<Result<_, ThresholdError>>()?;
    Ok(RatioScan { points, warning })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Abar {
    pub abar: f64,
    pub epsilon: f64,
    pub varrho: f64,
    /// `bound(ϱ)/ϱ` at the chosen `ϱ`.
    pub ratio: f64,
    pub lambda_star: f64,
}

/// `ā = (1+ε) / (1/λ* − bound(ϱ)/ϱ)` for a given `ϱ`.
pub fn abar_for(lambda_star: f64, ratio: f64, epsilon: f64) -> f64 {
    (1.0 + epsilon) / (1.0 / lambda_star - ratio)
}

/// Chooses `ϱ` as the largest value (found by log-scale bisection) with
/// `bound(ϱ)/ϱ < ε/λ*` and `ϱ < 1ᵗA1·t*²/2`, then evaluates `ā`.
pub fn abar_threshold(problem: &Problem, epsilon: f64, search: &RhoSearch) -> Result<Abar, ThresholdError> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(ThresholdError::BadArgument("ε must lie in (0, 1)"));
    }
    let rho = max_rho(problem, search)?;
    let lambda_star = lambda_star_from(problem, &rho);
    let cap = problem.matrix().ones_form() * rho.t_star * rho.t_star / 2.0;
    let target = epsilon / lambda_star;
    let ratio = |varrho: f64| -> Result<f64, ThresholdError> { Ok(sublevel_sup_bound(problem, varrho)? / varrho) };

    let top = cap * (1.0 - 1e-9);
    let (varrho, r) = if ratio(top)? < target {
        (top, ratio(top)?)
    } else {
        let mut lo = top;
        let mut r_lo = f64::INFINITY;
        for _ in 0..60 {
            lo /= 10.0;
            r_lo = ratio(lo)?;
            if r_lo < target {
                break;
            }
        }
        if !(r_lo < target) {
            return Err(ThresholdError::BadArgument("no ϱ satisfies bound(ϱ)/ϱ < ε/λ*"));
        }
        let mut hi = top;
        for _ in 0..60 {
            let mid = (lo * hi).sqrt();
            let r_mid = ratio(mid)?;
            if r_mid < target {
                lo = mid;
                r_lo = r_mid;
            } else {
                hi = mid;
            }
            if hi / lo < 1.0 + 1e-9 {
                break;
            }
        }
        (lo, r_lo)
    };
    Ok(Abar { abar: abar_for(lambda_star, r, epsilon), epsilon, varrho, ratio: r, lambda_star })
}

/// The three-solution quantities for given `γ`, `δ`, `h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThreeSolutionWindow {
    pub gamma: f64,
    pub delta: f64,
    pub h: f64,
    pub lambda1: f64,
    pub ones_form: f64,
    /// `λ₁γ²/2`.
    pub r: f64,
    /// `1ᵗA1·δ²/2`, the quadratic part at `δ·1`.
    pub phi_star: f64,
    pub eta: f64,
    /// `Σ_k max_{|ξ|≤γ} F_k(ξ)`.
    pub s_gamma: f64,
    /// `Σ_k F_k(δ)`.
    pub s_delta: f64,
    pub g1_holds: bool,
    pub g2_holds: bool,
    pub lambda1_star: Option<f64>,
    /// `+∞` when `S_γ = 0`.
    pub lambda2_star: Option<f64>,
    pub lambda3h_star: Option<f64>,
}

impl ThreeSolutionWindow {
    /// `(λ₁*, λ₂*)` when both conditions hold.
    pub fn interval(&self) -> Option<(f64, f64)> {
        Some((self.lambda1_star?, self.lambda2_star?))
    }
}

/// Evaluates every quantity without judging feasibility; the thresholds are
/// filled in only when both conditions hold.
pub fn three_solution_window(problem: &Problem, gamma: f64, delta: f64, h: f64) -> Result<ThreeSolutionWindow, ThresholdError> {
    if !(gamma > 0.0 && delta > 0.0) {
        return Err(ThresholdError::BadArgument("γ and δ must be positive"));
    }
    if !(h > 1.0) {
        return Err(ThresholdError::BadArgument("h must exceed 1"));
    }
    let lambda1 = problem.matrix().lambda_min();
    let ones = problem.matrix().ones_form();
    let r = lambda1 * gamma * gamma / 2.0;
    let phi_star = ones * delta * delta / 2.0;
    let eta = r / (r + phi_star);
    let s_gamma = window_sum(problem, gamma)?;
    let s_delta = problem.nonlinearity().diagonal_primitive(delta)?;
    let g1_holds = delta > (lambda1 / ones).sqrt() * gamma;
    let g2_holds = s_gamma < eta * s_delta;
    let mut w = ThreeSolutionWindow {
        gamma,
        delta,
        h,
        lambda1,
        ones_form: ones,
        r,
        phi_star,
        eta,
        s_gamma,
        s_delta,
        g1_holds,
        g2_holds,
        lambda1_star: None,
        lambda2_star: None,
        lambda3h_star: None,
    };
    if g1_holds && g2_holds {
        w.lambda1_star = Some(phi_star / (s_delta - s_gamma));
        w.lambda2_star = Some(if s_gamma == 0.0 { f64::INFINITY } else { r / s_gamma });
        w.lambda3h_star = Some(h * r / (2.0 * r * s_delta / (2.0 * phi_star) - s_gamma));
    }
    Ok(w)
}

/// Like [`three_solution_window`] but an infeasible configuration is an error.
pub fn three_solution_report(problem: &Problem, gamma: f64, delta: f64, h: f64) -> Result<ThreeSolutionWindow, ThresholdError> {
    let w = three_solution_window(problem, gamma, delta, h)?;
    if !w.g1_holds {
        return Err(ThresholdError::InfeasibleG1 { delta, required: (w.lambda1 / w.ones_form).sqrt() * gamma });
    }
    if !w.g2_holds {
        return Err(ThresholdError::InfeasibleG2 { lhs: w.s_gamma, rhs: w.eta * w.s_delta });
    }
    let (l1, l2) = w.interval().expect("both conditions hold");
    if !(l1 < l2) {
        return Err(ThresholdError::EmptyInterval { lambda1_star: l1, lambda2_star: l2 });
    }
    Ok(w)
}

/// Everything `analyze` reports.
#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdReport {
    pub lambda1: f64,
    pub lambda_n: f64,
    pub ones_form: f64,
    pub rho: Result<RhoMaxResult, ThresholdError>,
    pub lambda_star: Option<f64>,
    pub abar: Option<Result<Abar, ThresholdError>>,
    pub three_solutions: Option<Result<ThreeSolutionWindow, ThresholdError>>,
    pub hypotheses: HypothesisVerdict,
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct AnalyzeOptions {
    pub search: RhoSearch,
    /// `ε` for `ā`.
    pub epsilon: Option<f64>,
    /// `(γ, δ, h)`.
    pub window: Option<(f64, f64, f64)>,
}

pub fn analyze(problem: &Problem, opts: &AnalyzeOptions) -> ThresholdReport {
    let rho = max_rho(problem, &opts.search);
    let lambda_star = rho.as_ref().ok().map(|r| lambda_star_from(problem, r));
    ThresholdReport {
        lambda1: problem.matrix().lambda_min(),
        lambda_n: problem.matrix().lambda_max(),
        ones_form: problem.matrix().ones_form(),
        lambda_star,
        rho,
        abar: opts.epsilon.map(|eps| abar_threshold(problem, eps, &opts.search)),
        three_solutions: opts.window.map(|(g, d, h)| three_solution_report(problem, g, d, h)),
        hypotheses: probe_hypotheses(problem.nonlinearity(), problem.matrix().lambda_min()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdMatrix;
    use crate::nonlin::{catalog_make, CatalogParams, Nonlinearity};
    use crate::problems::{build_lattice, build_tridiagonal, rectangle_net};
    use alloc::vec;

    const EX42_MAX: f64 = 0.3787311542;

    fn ex42() -> Problem {
        let f = catalog_make("ex42_logistic_log", &CatalogParams::with_n(4)).unwrap();
        build_lattice(&rectangle_net(2, 2).unwrap(), f).unwrap()
    }

    fn scalar(a: f64, f: ScalarFunction) -> Problem {
        Problem::new(SpdMatrix::new(&[vec![a]]).unwrap(), Nonlinearity::uniform(f, 1).unwrap()).unwrap()
    }

    fn ex37() -> Problem {
        let f = catalog_make("ex37_sqrt", &CatalogParams::with_n(2)).unwrap();
        build_tridiagonal(2, -1.0, 2.0, f).unwrap()
    }

    #[test]
    fn ex42_rho_and_lambda_star() {
        let p = ex42();
        let r = max_rho(&p, &RhoSearch::default()).unwrap();
        assert!((r.rho_max / (4.0 * EX42_MAX) - 1.0).abs() < 1e-6, "{}", r.rho_max);
        assert!((r.t_star - 3.18).abs() < 0.01);
        assert!(!r.range_suspect);
        let ls = lambda_star_from(&p, &r);
        assert!((ls * EX42_MAX - 1.0).abs() < 1e-5);
    }

    #[test]
    fn linear_and_negative() {
        let lin = scalar(1.0, ScalarFunction::new("s", |s| s).with_primitive(|t| t * t / 2.0));
        let r = max_rho(&lin, &RhoSearch::default()).unwrap();
        assert!((r.rho_max - 0.5).abs() < 1e-12);
        assert!((lambda_star(&lin, &RhoSearch::default()).unwrap() - 1.0).abs() < 1e-12);
        let neg = scalar(1.0, ScalarFunction::new("-s", |s| -s));
        assert!(matches!(max_rho(&neg, &RhoSearch::default()), Err(ThresholdError::NonpositiveSup { .. })));
    }

    #[test]
    fn sublevel_bounds() {
        let p = ex37();
        assert_eq!(sublevel_sup_bound(&p, 2.0).unwrap(), 0.0);
        let lin = scalar(1.0, ScalarFunction::new("s", |s| s));
        assert!((sublevel_sup_bound(&lin, 0.5).unwrap() - 0.5).abs() < 1e-9);
    }

    #[test]
    fn three_solution_window_example() {
        let w = three_solution_report(&ex37(), 2.0, 3.0, 2.0).unwrap();
        assert!(w.g1_holds && w.g2_holds);
        assert_eq!(w.s_gamma, 0.0);
        assert!((w.s_delta - 2.0).abs() < 1e-14);
        assert!((w.lambda1_star.unwrap() - 4.5).abs() < 1e-12);
        assert_eq!(w.lambda2_star, Some(f64::INFINITY));
        assert!((w.lambda3h_star.unwrap() - 9.0).abs() < 1e-12);
        assert!((w.eta - w.r / (w.r + w.phi_star)).abs() < 1e-15);
    }

    #[test]
    fn three_solution_window_infeasible() {
        let p = scalar(1.0, ScalarFunction::new("s", |s| s));
        assert!(matches!(three_solution_report(&p, 1.0, 1.0, 2.0), Err(ThresholdError::InfeasibleG1 { .. })));
        // Linear f: S_γ = γ²/2 and η S_δ < δ²/2·η, which fails the second condition.
        assert!(matches!(three_solution_report(&p, 1.0, 2.0, 2.0), Err(ThresholdError::InfeasibleG2 { .. })));
        let w = three_solution_window(&p, 1.0, 1.0, 2.0).unwrap();
        assert!((w.eta - 0.5).abs() < 1e-15);
    }

    #[test]
    fn ratio_scan_and_abar() {
        let p = ex42();
        let scan = sublevel_ratio_scan(&p, 8).unwrap();
        assert!(!scan.warning);
        assert!(scan.points[8].1 < 1e-3 * scan.points[0].1);
        assert!(scan.tail_decreasing(4));
        let a = abar_threshold(&p, 0.5, &RhoSearch::default()).unwrap();
        assert!(a.abar > a.lambda_star);
        assert!(a.ratio < 0.5 / a.lambda_star);

        let lin = scalar(1.0, ScalarFunction::new("s", |s| s));
        let scan = sublevel_ratio_scan(&lin, 4).unwrap();
        assert!(scan.warning);
        assert!(scan.points.iter().all(|&(_, r)| (r - 1.0).abs() < 1e-9));
    }
}
