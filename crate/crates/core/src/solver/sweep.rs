#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::mountain::mountain_pass;
use super::multistart::find_global_min;
use super::{CriticalPoint, EnergyModel, SolverConfig, SolverError};
use crate::nonlin::{probe_hypotheses, Verdict};
use crate::problems::Problem;
use crate::thresholds::{max_rho, RhoSearch};

/// Slack added to `1/(1−q)` before the slope counts as too steep.
pub const SLOPE_SLACK: f64 = 0.1;

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRecord {
    pub lambda: f64,
    /// The minimizer first, then the mountain-pass point when found.
    pub solutions: Vec<CriticalPoint>,
    /// `‖u¹‖₂` when a nontrivial minimizer was found.
    pub min_norm: Option<f64>,
    /// `J(u²)` when the mountain pass succeeded.
    pub mp_energy: Option<f64>,
    pub error: Option<SolverError>,
}

/// Least-squares fit of `log‖u¹‖₂` against `log λ` on the upper half of
/// the sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SlopeFit {
    pub slope: f64,
    pub r_squared: f64,
    pub points: usize,
    /// Growth exponent from the power-bound probe, when it passed.
    pub q: Option<f64>,
    /// `1/(1−q) + SLOPE_SLACK`.
    pub upper_bound: Option<f64>,
    pub within_bound: Option<bool>,
    /// `slope ≥ 0`: the minimizer does not shrink as `λ` grows.
    pub nonvanishing: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub records: Vec<SweepRecord>,
    pub slope_fit: Option<SlopeFit>,
}

/// Runs the two-solution search at each `λ`. Failures are recorded per
/// record; the minimizer is kept even when the mountain pass fails.
pub fn lambda_sweep(problem: &Problem, lambdas: &[f64], fit: bool, cfg: &SolverConfig) -> SweepResult {
    let t_star = max_rho(problem, &RhoSearch::default()).map(|r| r.t_star).unwrap_or(1.0);
    let mut records: Vec<SweepRecord> = lambdas.iter().map(|&l| sweep_one(problem, l, t_star, cfg)).collect();
    records.sort_by(|a, b| a.lambda.total_cmp(&b.lambda));
    let slope_fit = if fit { fit_slope(problem, &records) } else { None };
    SweepResult { records, slope_fit }
}

fn sweep_one(problem: &Problem, lambda: f64, t_star: f64, cfg: &SolverConfig) -> SweepRecord {
    let mut rec = SweepRecord { lambda, solutions: Vec::new(), min_norm: None, mp_energy: None, error: None };
    let model = EnergyModel::new(problem, lambda);
    let gm = match find_global_min(&model, Some(t_star), cfg) {
        Ok(gm) => gm,
        Err(e) => {
            rec.error = Some(e);
            return rec;
        }
    };
    if gm.best_is_trivial {
        rec.error = Some(SolverError::OnlyTrivialFound {
            best_energy: gm.candidates.iter().find(|c| c.nontrivial).map_or(f64::NAN, |c| c.energy),
        });
        return rec;
    }
    rec.min_norm = Some(gm.best.norm());
    match mountain_pass(&model, &gm.best.u, cfg) {
        Ok(u2) => {
            rec.mp_energy = Some(u2.energy);
            rec.solutions = alloc::vec![gm.best, u2];
        }
        Err(e) => {
            rec.solutions = alloc::vec![gm.best];
            rec.error = Some(e);
        }
    }
    rec
}

fn fit_slope(problem: &Problem, records: &[SweepRecord]) -> Option<SlopeFit> {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter_map(|r| r.min_norm.filter(|&m| m > 0.0).map(|m| (r.lambda.ln(), m.ln())))
        .collect();
    let upper: Vec<(f64, f64)> = pts[pts.len() / 2..].to_vec();
    if upper.len() < 2 {
        return None;
    }
    let m = upper.len() as f64;
    let (mx, my) = upper.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x / m, b + y / m));
    let (sxy, sxx, syy) = upper.iter().fold((0.0, 0.0, 0.0), |(a, b, c), &(x, y)| {
        (a + (x - mx) * (y - my), b + (x - mx) * (x - mx), c + (y - my) * (y - my))
    });
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    let probe = probe_hypotheses(problem.nonlinearity(), problem.matrix().lambda_min());
    let q = (probe.h1_star.verdict == Verdict::Pass).then_some(probe.h1_star.q.max(0.0));
    let upper_bound = q.map(|q| 1.0 / (1.0 - q) + SLOPE_SLACK);
    Some(SlopeFit {
        slope,
        r_squared,
        points: upper.len(),
        q,
        upper_bound,
        within_bound: upper_bound.map(|b| slope <= b),
        nonvanishing: slope >= 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdMatrix;
    use crate::nonlin::{catalog_make, CatalogParams};
    use alloc::vec;

    #[test]
    fn power_half_slope() {
        let f = catalog_make("power", &CatalogParams::with_n(1).number("q", 0.5).number("positive_part", 1.0))
            .unwrap();
        let p = Problem::new(SpdMatrix::identity(1), f).unwrap();
        let lambdas: Vec<f64> = (0..7).map(|k| (1u32 << k) as f64).collect();
        let res = lambda_sweep(&p, &lambdas, true, &SolverConfig::default());
        for r in &res.records {
            assert!((r.min_norm.unwrap() / (r.lambda * r.lambda) - 1.0).abs() < 1e-9);
        }
        let fit = res.slope_fit.unwrap();
        assert!((fit.slope - 2.0).abs() < 0.05);
        assert_eq!(fit.within_bound, Some(true));
    }

    #[test]
    fn rational_slope_near_one() {
        let f = catalog_make("rational_sq", &CatalogParams::with_n(1)).unwrap();
        let p = Problem::new(SpdMatrix::new(&[vec![2.0]]).unwrap(), f).unwrap();
        let res = lambda_sweep(&p, &[5.0, 10.0, 20.0, 40.0], true, &SolverConfig::default());
        let norms: Vec<f64> = res.records.iter().map(|r| r.min_norm.unwrap()).collect();
        assert!(norms.windows(2).all(|w| w[1] > w[0]));
        for r in &res.records {
            let l = r.lambda;
            assert!((r.min_norm.unwrap() - (l + (l * l - 16.0).sqrt()) / 4.0).abs() < 1e-9);
        }
        let slope = res.slope_fit.unwrap().slope;
        assert!((0.9..=1.1).contains(&slope), "{slope}");
        assert!(lambda_sweep(&p, &[], true, &SolverConfig::default()).records.is_empty());
    }
}
