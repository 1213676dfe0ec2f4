#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::descent::gradient_descent;
use super::mountain::mountain_pass;
use super::newton::newton_refine_and_classify;
use super::{dedupe_points, CriticalPoint, EnergyModel, SolverConfig, SolverError};
use crate::linalg::SignConditionVerdict;
use crate::problems::Problem;
use crate::thresholds::{lambda_star_from, max_rho, RhoSearch};
use crate::vecops::dist2;

/// Gradient-descent stopping tolerance before the Newton polish.
const DESCENT_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct GlobalMin {
    pub best: CriticalPoint,
    /// Every distinct polished point, sorted by energy.
    pub candidates: Vec<CriticalPoint>,
    pub best_is_trivial: bool,
    pub failed_starts: usize,
}

fn check_lambda(lambda: f64) -> Result<(), SolverError> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(SolverError::InvalidLambda(lambda))
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

/// Uniform sample from the ball of the given radius.
fn ball_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    loop {
        let dir: Vec<f64> = (0..n).map(|_| gaussian(rng)).collect();
        let norm = crate::vecops::norm2(&dir);
        if norm > 0.0 {
            let r = radius * rng.random::<f64>().powf(1.0 / n as f64);
            return dir.iter().map(|x| x * r / norm).collect();
        }
    }
}

fn start_set(n: usize, t_star: f64, cfg: &SolverConfig) -> Vec<Vec<f64>> {
    let t = t_star.abs().max(1e-3);
    let mut starts = vec![vec![1e-3; n], vec![-1e-3; n], vec![t_star; n], vec![-t_star; n]];
    for k in 0..n {
        for scale in [1e-3, t, -t] {
            let mut e = vec![0.0; n];
            e[k] = scale;
            starts.push(e);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.multistart.seed);
    let radius = 4.0 * (n as f64).sqrt() * t;
    for _ in 0..cfg.multistart.random_starts {
        starts.push(ball_point(&mut rng, n, radius));
    }
    starts
}

/// Location of the maximum of `ρ`, or 1 when `ρ` has no positive maximum.
fn t_star_or_default(problem: &Problem) -> f64 {
    max_rho(problem, &RhoSearch::default()).map(|r| r.t_star).unwrap_or(1.0)
}

/// Multistart descent for the global minimizer of `J`.
///
/// Starts: small perturbations of 0, `±t*·1`, coordinate spikes `±t*·e_k`
/// and `random_starts` seeded points in the ball of radius `4√n|t*|`. Each
/// descent is polished by Newton's method.
pub fn find_global_min(
    model: &EnergyModel<'_>,
    t_star: Option<f64>,
    cfg: &SolverConfig,
) -> Result<GlobalMin, SolverError> {
    check_lambda(model.lambda)?;
    let t_star = t_star.unwrap_or_else(|| t_star_or_default(model.problem));
    let mut found = Vec::new();
    let mut failed_starts = 0;
    for start in start_set(model.dim(), t_star, cfg) {
        let polished = gradient_descent(model, &start, DESCENT_TOL, cfg.multistart.descent_max_iter, cfg.divergence_norm)
            .and_then(|u| newton_refine_and_classify(model, &u, cfg));
        match polished {
            Ok(cp) => found.push(cp),
            Err(_) => failed_starts += 1,
        }
    }
    let candidates = dedupe_points(found, cfg.dedupe_tol);
    let best = candidates.first().cloned().ok_or(SolverError::NoDescentProgress)?;
    Ok(GlobalMin { best_is_trivial: !best.nontrivial, best, candidates, failed_starts })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoSolutions {
    /// Global minimizer.
    pub u1: CriticalPoint,
    /// Mountain-pass point.
    pub u2: CriticalPoint,
    pub lambda_star: Option<f64>,
    /// `λ ≤ λ*`: the search ran anyway but nothing is guaranteed.
    pub below_threshold: bool,
    /// `J(u¹) < 0 < J(u²)`.
    pub energy_order_ok: bool,
    pub sign_conditions: SignConditionVerdict,
    pub f_nonnegative: bool,
    /// When `A` has nonpositive off-diagonals and `f ≥ 0`: whether both
    /// solutions are nonnegative (strictly positive when the strict
    /// lower-triangular condition holds as well).
    pub positivity_ok: Option<bool>,
}

pub fn find_two_solutions(problem: &Problem, lambda: f64, cfg: &SolverConfig) -> Result<TwoSolutions, SolverError> {
    check_lambda(lambda)?;
    let rho = max_rho(problem, &RhoSearch::default()).ok();
    let lambda_star = rho.as_ref().map(|r| lambda_star_from(problem, r));
    let model = EnergyModel::new(problem, lambda);
    let gm = find_global_min(&model, Some(rho.as_ref().map_or(1.0, |r| r.t_star)), cfg)?;
    if gm.best_is_trivial {
        let best_energy = gm.candidates.iter().find(|c| c.nontrivial).map_or(f64::NAN, |c| c.energy);
        return Err(SolverError::OnlyTrivialFound { best_energy });
    }
    let u1 = gm.best;
    let u2 = mountain_pass(&model, &u1.u, cfg)?;
    let distance = dist2(&u1.u, &u2.u);
    if !(distance > cfg.dedupe_tol * (1.0 + u1.norm())) {
        return Err(SolverError::DistinctnessFailed { distance });
    }
    if !u2.nontrivial {
        return Err(SolverError::DistinctnessFailed { distance: u2.norm() });
    }
    let sign_conditions = problem.matrix().check_sign_conditions();
    let f_nonnegative = problem.nonlinearity().appears_nonnegative();
    let positivity_ok = (sign_conditions.a1_holds && f_nonnegative).then_some(if sign_conditions.a2_holds {
        u1.strictly_positive && u2.strictly_positive
    } else {
        u1.nonnegative && u2.nonnegative
    });
    Ok(TwoSolutions {
        energy_order_ok: u1.energy < 0.0 && u2.energy > 0.0,
        below_threshold: lambda_star.is_some_and(|ls| lambda <= ls),
        lambda_star,
        sign_conditions,
        f_nonnegative,
        positivity_ok,
        u1,
        u2,
    })
}

/// A radius `R` with `λ√n·max_k sup_{|s|≤ρ}|f_k(s)| < λ₁ρ` for every sampled
/// `ρ ∈ {R, 2R, …, 1024R}`. Every critical point `u` satisfies
/// `λ₁‖u‖₂ ≤ λ‖f(u)‖₂`, so for sublinear `f` all of them lie in the ball of
/// radius `R`. `None` when no such `R ≤ 1e6` is found.
pub fn a_priori_radius(problem: &Problem, lambda: f64) -> Option<f64> {
    let n = problem.dim() as f64;
    let l1 = problem.matrix().lambda_min();
    let sup = |r: f64| {
        problem
            .nonlinearity()
            .components()
            .iter()
            .flat_map(|f| (0..=512).map(move |i| f.eval(-r + 2.0 * r * i as f64 / 512.0).abs()))
            .fold(0.0, f64::max)
    };
    let holds = |r: f64| lambda * n.sqrt() * sup(r) < l1 * r;
    let mut r = 1.0;
    while r <= 1e6 {
        if (0..=10).all(|k| holds(r * (1u32 << k) as f64)) {
            return Some(r);
        }
        r *= 2.0;
    }
    None
}

/// Every critical point reachable by multistart descent, mountain passes
/// from each negative-energy minimum, and a Newton multistart over a grid
/// (`n ≤ 3`) plus random points in the a-priori ball.
pub fn critical_set(problem: &Problem, lambda: f64, cfg: &SolverConfig) -> Result<Vec<CriticalPoint>, SolverError> {
    check_lambda(lambda)?;
    let model = EnergyModel::new(problem, lambda);
    let gm = find_global_min(&model, None, cfg)?;
    let mut found = gm.candidates.clone();
    for c in &gm.candidates {
        if c.energy < 0.0 {
            if let Ok(cp) = mountain_pass(&model, &c.u, cfg) {
                found.push(cp);
            }
        }
    }

    let n = problem.dim();
    let radius = a_priori_radius(problem, lambda)
        .unwrap_or_else(|| 4.0 * (n as f64).sqrt() * t_star_or_default(problem).abs().max(1.0));
    let per_axis: usize = match n {
        1 => 161,
        2 => 41,
        3 => 13,
        _ => 0,
    };
    let mut starts: Vec<Vec<f64>> = Vec::new();
    if per_axis > 0 {
        let total = per_axis.pow(n as u32);
        for idx in 0..total {
            let mut rem = idx;
            let p = (0..n)
                .map(|_| {
                    let i = rem % per_axis;
                    rem /= per_axis;
                    -radius + 2.0 * radius * i as f64 / (per_axis - 1) as f64
                })
                .collect();
            starts.push(p);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.multistart.seed ^ 0x9e37_79b9_7f4a_7c15);
    for _ in 0..64 * n.max(4) {
        starts.push(ball_point(&mut rng, n, radius));
    }
    for s in starts {
        if let Ok(cp) = newton_refine_and_classify(&model, &s, cfg) {
            found.push(cp);
        }
    }
    Ok(dedupe_points(found, cfg.dedupe_tol))
}
