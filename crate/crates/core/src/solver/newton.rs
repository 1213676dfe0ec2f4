use alloc::vec::Vec;

use super::{Classification, CriticalPoint, EnergyModel, SolverConfig, SolverError};
use crate::linalg::{solve_dense, symmetric_eigen};
use crate::vecops::{axpy, dot, norm2, norm_inf};

/// Relative size of the smallest Hessian eigenvalue below which a critical
/// point is degenerate.
pub const DEGENERACY_TOL: f64 = 1e-8;

const MAX_HALVINGS: usize = 60;

/// Inertia of `A − λ diag(f′(u))`.
pub fn classify(model: &EnergyModel<'_>, u: &[f64]) -> (Classification, Option<Vec<f64>>) {
    let n = model.dim();
    let Ok(h) = model.hessian(u) else {
        return (Classification::Unclassified, None);
    };
    let values = symmetric_eigen(n, &h).values;
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let smallest = values.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    let class = if smallest < DEGENERACY_TOL * scale || scale == 0.0 {
        Classification::Degenerate
    } else {
        match values.iter().filter(|&&v| v < 0.0).count() {
            0 => Classification::LocalMin,
            k if k == n && n >= 2 => Classification::LocalMax,
            index => Classification::Saddle { index },
        }
    };
    (class, Some(values))
}

/// Wraps `u` as a [`CriticalPoint`] after checking
/// `‖Au − λf(u)‖₂ ≤ residual_tol·(1 + ‖u‖₂)`.
pub fn make_critical_point(
    model: &EnergyModel<'_>,
    u: Vec<f64>,
    cfg: &SolverConfig,
) -> Result<CriticalPoint, SolverError> {
    let residual = model.residual(&u);
    let norm = norm2(&u);
    if !(residual <= cfg.residual_tol * (1.0 + norm)) {
        return Err(SolverError::StalledAtNonCritical { residual });
    }
    let energy = model.energy(&u)?;
    let (classification, hessian_spectrum) = classify(model, &u);
    let slack = 1e-12 * (1.0 + norm_inf(&u));
    let min = u.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(CriticalPoint {
        lambda: model.lambda,
        residual,
        energy,
        classification,
        hessian_spectrum,
        nontrivial: norm > cfg.nontrivial_norm,
        nonnegative: min >= -slack,
        strictly_positive: min > slack,
        u,
    })
}

/// Damped Newton on `G(u) = Au − λf(u)`. Returns the last iterate and the
/// number of iterations taken.
///
/// The step is halved until `‖G‖` decreases. When `f′` is unbounded at the
/// iterate, or the Jacobian is singular, one Armijo gradient step on `J` is
/// taken instead.
pub fn newton_iterate(
    model: &EnergyModel<'_>,
    u0: &[f64],
    cfg: &SolverConfig,
) -> Result<(Vec<f64>, usize), SolverError> {
    let n = model.dim();
    if u0.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, found: u0.len() });
    }
    let mut u = u0.to_vec();
    let mut g = model.gradient(&u);
    let mut r = norm2(&g);
    for it in 0..cfg.newton_max_iter {
        if r < cfg.newton_tol * (1.0 + norm2(&u)) {
            return Ok((u, it));
        }
        let direction = model.hessian(&u).ok().and_then(|h| {
            let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
            solve_dense(n, &h, &rhs).ok()
        });
        let mut next = None;
        if let Some(d) = direction {
            let mut alpha = 1.0;
            for _ in 0..MAX_HALVINGS {
                let cand = axpy(&u, alpha, &d);
                let gc = model.gradient(&cand);
                let rc = norm2(&gc);
                if rc < (1.0 - 1e-4 * alpha) * r {
                    next = Some((cand, gc, rc));
                    break;
                }
                alpha /= 2.0;
            }
        } else {
            next = descent_step(model, &u, &g)?;
        }
        let Some((cand, gc, rc)) = next else {
            return Ok((u, it));
        };
        u = cand;
        g = gc;
        r = rc;
        let norm = norm2(&u);
        if norm > cfg.divergence_norm || !norm.is_finite() {
            return Err(SolverError::Diverged { norm });
        }
    }
    Ok((u, cfg.newton_max_iter))
}

type Step = Option<(Vec<f64>, Vec<f64>, f64)>;

fn descent_step(model: &EnergyModel<'_>, u: &[f64], g: &[f64]) -> Result<Step, SolverError> {
    let g2 = dot(g, g);
    let mut t = 1.0 / model.problem.matrix().lambda_max();
    for _ in 0..MAX_HALVINGS {
        let cand = axpy(u, -t, g);
        if model.energy_change(u, &cand)? <= -1e-4 * t * g2 {
            let gc = model.gradient(&cand);
            let rc = norm2(&gc);
            return Ok(Some((cand, gc, rc)));
        }
        t /= 2.0;
    }
    Ok(None)
}

/// Newton refinement followed by inertia classification.
pub fn newton_refine_and_classify(
    model: &EnergyModel<'_>,
    u0: &[f64],
    cfg: &SolverConfig,
) -> Result<CriticalPoint, SolverError> {
    let (u, _) = newton_iterate(model, u0, cfg)?;
    make_critical_point(model, u, cfg)
}
