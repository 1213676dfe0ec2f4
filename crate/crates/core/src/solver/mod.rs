//! Critical points of `J(u) = uᵗAu/2 − λ Σ F_k(u_k)`.
//!
//! * [`EnergyModel`] evaluates `J`, its gradient `Au − λf(u)` and Hessian
//!   `A − λ diag(f′(u))`;
//! * [`find_global_min`] runs multistart gradient descent plus Newton polish;
//! * [`mountain_pass`] deforms a path from 0 to a low-energy endpoint until
//!   its highest point is a critical point;
//! * [`find_two_solutions`] combines the two and checks the expected
//!   structure (distinct, nontrivial, `J(u¹) < 0 < J(u²)`, positivity under
//!   sign conditions on `A`);
//! * [`critical_set`] collects every critical point the above plus a
//!   Newton multistart can reach;
//! * [`lambda_sweep`] repeats the two-solution search over many `λ` and
//!   fits the growth of `‖u¹‖₂`.

mod descent;
mod energy;
mod mountain;
mod multistart;
mod newton;
mod sweep;

use alloc::vec::Vec;
use thiserror::Error;

use crate::linalg::LinalgError;
use crate::nonlin::NonlinError;
use crate::thresholds::ThresholdError;

pub use descent::gradient_descent;
pub use energy::{EnergyModel, Evaluation};
pub use mountain::{mountain_pass, MountainPassConfig};
pub use multistart::{
    a_priori_radius, critical_set, find_global_min, find_two_solutions, GlobalMin, TwoSolutions,
};
pub use newton::{classify, make_critical_point, newton_refine_and_classify};
pub use sweep::{lambda_sweep, SlopeFit, SweepRecord, SweepResult};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolverError {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("λ must be positive and finite, got {0}")]
    InvalidLambda(f64),
    #[error(transparent)]
    Nonlin(#[from] NonlinError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Threshold(#[from] ThresholdError),
    #[error("iteration diverged: ‖u‖ = {norm:e}")]
    Diverged { norm: f64 },
    #[error("iteration stalled at a non-critical point (residual {residual:e})")]
    StalledAtNonCritical { residual: f64 },
    #[error("no descent start produced a critical point")]
    NoDescentProgress,
    #[error("mountain-pass endpoint has J = {energy:e} >= 0")]
    GeometryViolated { energy: f64 },
    #[error("the straight path from 0 to the endpoint never rises above J = 0")]
    NoBarrier,
    #[error("path deformation did not converge in {updates} updates (perpendicular gradient {residual:e})")]
    MaxDeformationIterations { updates: usize, residual: f64 },
    #[error("only the trivial solution was found (best nontrivial energy {best_energy:e})")]
    OnlyTrivialFound { best_energy: f64 },
    #[error("the two solutions are not distinct (distance {distance:e})")]
    DistinctnessFailed { distance: f64 },
}

/// Hessian-inertia classification.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Classification {
    LocalMin,
    /// `index` negative Hessian eigenvalues, `1 ≤ index`; on `n = 1` a
    /// strict local maximum is reported as a saddle of index 1.
    Saddle { index: usize },
    /// All `n ≥ 2` Hessian eigenvalues negative.
    LocalMax,
    /// Smallest `|eigenvalue|` below `1e-8 · ‖H‖`.
    Degenerate,
    /// The Hessian is unavailable (unbounded `f′`).
    Unclassified,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::LocalMin => "local_min",
            Classification::Saddle { .. } => "saddle",
            Classification::LocalMax => "local_max",
            Classification::Degenerate => "degenerate",
            Classification::Unclassified => "unclassified",
        }
    }

    pub fn morse_index(self) -> Option<usize> {
        match self {
            Classification::LocalMin => Some(0),
            Classification::Saddle { index } => Some(index),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalPoint {
    pub u: Vec<f64>,
    pub lambda: f64,
    /// `‖Au − λf(u)‖₂`.
    pub residual: f64,
    pub energy: f64,
    pub classification: Classification,
    /// Ascending Hessian spectrum, when available.
    pub hessian_spectrum: Option<Vec<f64>>,
    pub nontrivial: bool,
    pub nonnegative: bool,
    pub strictly_positive: bool,
}

impl CriticalPoint {
    pub fn norm(&self) -> f64 {
        crate::vecops::norm2(&self.u)
    }

    pub fn min_component(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultistartConfig {
    pub random_starts: usize,
    pub seed: u64,
    pub descent_max_iter: usize,
}

impl Default for MultistartConfig {
    fn default() -> Self {
        MultistartConfig { random_starts: 16, seed: 0x5eed, descent_max_iter: 20_000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    /// Accept a critical point when `‖G‖₂ ≤ residual_tol · (1 + ‖u‖₂)`.
    pub residual_tol: f64,
    /// Newton stops once `‖G‖₂ < newton_tol · (1 + ‖u‖₂)`.
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    /// `‖u‖₂` above this is divergence.
    pub divergence_norm: f64,
    /// `‖u‖₂` above this is a nontrivial solution.
    pub nontrivial_norm: f64,
    /// Points closer than this (in `‖·‖₂`) are the same critical point.
    pub dedupe_tol: f64,
    pub multistart: MultistartConfig,
    pub mountain: MountainPassConfig,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            residual_tol: 1e-9,
            newton_tol: 1e-14,
            newton_max_iter: 200,
            divergence_norm: 1e8,
            nontrivial_norm: 1e-8,
            dedupe_tol: 1e-6,
            multistart: MultistartConfig::default(),
            mountain: MountainPassConfig::default(),
        }
    }
}

/// Sorts by energy, then lexicographically, and drops points within `tol`
/// of an earlier one (keeping the smaller residual).
pub fn dedupe_points(mut points: Vec<CriticalPoint>, tol: f64) -> Vec<CriticalPoint> {
    points.sort_by(|a, b| a.residual.total_cmp(&b.residual));
    let mut kept: Vec<CriticalPoint> = Vec::new();
    for p in points {
        if kept.iter().all(|q| crate::vecops::dist2(&p.u, &q.u) > tol) {
            kept.push(p);
        }
    }
    kept.sort_by(|a, b| {
        a.energy.total_cmp(&b.energy).then_with(|| {
            a.u.iter()
                .zip(&b.u)
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(core::cmp::Ordering::Equal)
        })
    });
    kept
}
