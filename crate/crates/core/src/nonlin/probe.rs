//! Sampling diagnostics for the growth hypotheses on `f`.
//!
//! Limits cannot be decided from samples, so every check is three-valued.
//! A limit probe looks at `|ratio(s)|` on the two decades closest to the
//! limit point. It passes when the ratio is below [`PASS_MARGIN`] with
//! non-increasing decade maxima, or when it decays at least like
//! `|s|^TREND_EXPONENT` toward the limit point (log-log slope fit). It fails
//! when the ratio exceeds [`FAIL_MARGIN`] at the extreme grid point without
//! a strictly decreasing trend. Anything else is inconclusive: a ratio like
//! `1/|log s|` tends to zero but too slowly to tell from samples.

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::{Nonlinearity, ScalarFunction};

pub const PASS_MARGIN: f64 = 1e-3;
pub const FAIL_MARGIN: f64 = 1e-1;
pub const H2_NU0_CANDIDATES: [f64; 4] = [1.1, 1.5, 2.0, 3.0];
/// Relative margin around `λ₁/2` for the quadratic-growth probe.
pub const G3_MARGIN: f64 = 0.1;
/// Minimal log-log decay rate that counts as convergence to zero.
pub const TREND_EXPONENT: f64 = 0.1;

const PER_DECADE: usize = 64;
const DECADES: usize = 16;
const LOG_LO: f64 = -8.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Pass,
    Fail,
    Inconclusive,
}

impl Verdict {
    /// Fail dominates, then inconclusive.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::Pass, Verdict::Pass) => Verdict::Pass,
            _ => Verdict::Inconclusive,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

/// One limit probe, reported for the worst component.
#[derive(Debug, Clone, PartialEq)]
pub struct LimitProbe {
    pub verdict: Verdict,
    /// Largest `|ratio|` over the two decades nearest the limit point.
    pub band_max: f64,
    /// Maxima over the three decades nearest the limit point, outermost first.
    pub decade_maxima: [f64; 3],
    /// Fitted decay exponent of the ratio toward the limit point (positive
    /// means decaying); `None` when the ratio vanishes somewhere in the band.
    pub decay: Option<f64>,
    pub component: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct H2Probe {
    pub verdict: Verdict,
    /// The first candidate exponent that passed.
    pub nu0: Option<f64>,
    pub per_nu0: Vec<(f64, LimitProbe)>,
}

/// Fit of `|f(s)| ≤ c|s|^q`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerFit {
    pub verdict: Verdict,
    /// Least-squares slope of `log|f|` against `log|s|` on the top two decades.
    pub q: f64,
    /// `sup |f(s)|/|s|^q` over the probe grid, with `q` clamped into `(0, 1)`.
    pub c: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct G3Probe {
    pub verdict: Verdict,
    /// Largest `F_k(ξ)/ξ²` over `|ξ|` in the top two decades.
    pub estimate: f64,
    /// `λ₁/2`.
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HypothesisVerdict {
    pub h1: LimitProbe,
    pub h1_star: PowerFit,
    pub h2: H2Probe,
    pub h2_prime: LimitProbe,
    pub g3: G3Probe,
}

/// `10^(−8 + i/64)` for `i = 0..=1024`, i.e. `[1e-8, 1e8]`.
pub fn log_probe_grid() -> Vec<f64> {
    (0..=PER_DECADE * DECADES)
        .map(|i| 10f64.powf(LOG_LO + i as f64 / PER_DECADE as f64))
        .collect()
}

pub fn probe_hypotheses(nl: &Nonlinearity, lambda1: f64) -> HypothesisVerdict {
    let grid = log_probe_grid();
    let mut h1 = Vec::new();
    let mut h2p = Vec::new();
    let mut h2 = alloc::vec![Vec::new(); H2_NU0_CANDIDATES.len()];
    for (k, f) in nl.components().iter().enumerate() {
        let vals: Vec<(f64, f64, f64)> = grid.iter().map(|&s| (s, f.eval(s), f.eval(-s))).collect();
        let ratio = |nu: f64| -> Vec<f64> {
            vals.iter()
                .map(|&(s, p, m)| {
                    let d = s.powf(nu);
                    let (a, b) = ((p / d).abs(), (m / d).abs());
                    if a.is_nan() || b.is_nan() {
                        f64::INFINITY
                    } else {
                        a.max(b)
                    }
                })
                .collect()
        };
        let linear = ratio(1.0);
        h1.push(limit_probe(&linear, false, k));
        h2p.push(limit_probe(&linear, true, k));
        for (slot, &nu) in h2.iter_mut().zip(&H2_NU0_CANDIDATES) {
            slot.push(limit_probe(&ratio(nu), true, k));
        }
    }
    let per_nu0: Vec<(f64, LimitProbe)> =
        H2_NU0_CANDIDATES.iter().zip(h2).map(|(&nu, probes)| (nu, worst(probes))).collect();
    let h2 = match per_nu0.iter().find(|(_, p)| p.verdict == Verdict::Pass) {
        Some(&(nu, _)) => H2Probe { verdict: Verdict::Pass, nu0: Some(nu), per_nu0 },
        None => {
            let verdict = if per_nu0.iter().all(|(_, p)| p.verdict == Verdict::Fail) {
                Verdict::Fail
            } else {
                Verdict::Inconclusive
            };
            H2Probe { verdict, nu0: None, per_nu0 }
        }
    };
    HypothesisVerdict {
        h1: worst(h1),
        h1_star: power_fit(nl, &grid),
        h2,
        h2_prime: worst(h2p),
        g3: g3_probe(nl, &grid, lambda1),
    }
}

fn worst(probes: Vec<LimitProbe>) -> LimitProbe {
    let rank = |v: Verdict| match v {
        Verdict::Pass => 0,
        Verdict::Inconclusive => 1,
        Verdict::Fail => 2,
    };
    let mut out: Option<LimitProbe> = None;
    for p in probes {
        let replace = match &out {
            None => true,
            Some(o) => {
                (rank(p.verdict), p.band_max) > (rank(o.verdict), o.band_max)
                    || (rank(p.verdict) == rank(o.verdict) && p.band_max.is_nan())
            }
        };
        if replace {
            out = Some(p);
        }
    }
    out.expect("a nonlinearity has at least one component")
}

fn decade_max(values: &[f64], decade: usize) -> f64 {
    values[decade * PER_DECADE..=(decade + 1) * PER_DECADE]
        .iter()
        .fold(0.0, |m, &v| m.max(v))
}

/// `at_zero` selects the low end of the grid, otherwise the high end.
fn limit_probe(values: &[f64], at_zero: bool, component: usize) -> LimitProbe {
    // Decade indices ordered from the outside in toward the limit point.
    let decades: [usize; 3] = if at_zero { [2, 1, 0] } else { [DECADES - 3, DECADES - 2, DECADES - 1] };
    let decade_maxima = decades.map(|d| decade_max(values, d));
    let band_max = decade_maxima[1].max(decade_maxima[2]);
    let extreme = if at_zero { values[0] } else { values[values.len() - 1] };
    let non_increasing = decade_maxima.windows(2).all(|w| w[1] <= w[0]);
    let strictly_decreasing = decade_maxima.windows(2).all(|w| w[1] < w[0] * (1.0 - 1e-3));
    let band = if at_zero {
        &values[..=2 * PER_DECADE]
    } else {
        &values[values.len() - 1 - 2 * PER_DECADE..]
    };
    let first = if at_zero { 0 } else { values.len() - 1 - 2 * PER_DECADE };
    let decay = if band.iter().all(|&v| v > 0.0 && v.is_finite()) {
        let pts: Vec<(f64, f64)> = band
            .iter()
            .enumerate()
            .map(|(i, &v)| ((LOG_LO + (first + i) as f64 / PER_DECADE as f64), v.log10()))
            .collect();
        least_squares_slope(&pts).map(|slope| if at_zero { slope } else { -slope })
    } else {
        None
    };
    let verdict = if !band_max.is_finite() {
        Verdict::Fail
    } else if non_increasing && (band_max < PASS_MARGIN || decay.is_some_and(|d| d >= TREND_EXPONENT)) {
        Verdict::Pass
    } else if extreme > FAIL_MARGIN && !strictly_decreasing {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    LimitProbe { verdict, band_max, decade_maxima, decay, component }
}

fn power_fit(nl: &Nonlinearity, grid: &[f64]) -> PowerFit {
    let top = &grid[(DECADES - 2) * PER_DECADE..];
    let mut q_max = f64::NEG_INFINITY;
    for f in nl.components() {
        let pts: Vec<(f64, f64)> = top
            .iter()
            .flat_map(|&s| [(s, f.eval(s)), (s, f.eval(-s))])
            .filter(|&(_, v)| v != 0.0)
            .map(|(s, v)| (s.ln(), v.abs().ln()))
            .collect();
        let q = if pts.is_empty() {
            0.0
        } else {
            least_squares_slope(&pts).unwrap_or(f64::NAN)
        };
        q_max = if q.is_nan() { f64::NAN } else { q_max.max(q) };
    }
    let q_eff = q_max.clamp(1e-3, 1.0 - 1e-3);
    let c = nl
        .components()
        .iter()
        .flat_map(|f| grid.iter().map(move |&s| f.eval(s).abs().max(f.eval(-s).abs()) / s.powf(q_eff)))
        .fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) });
    let verdict = if q_max.is_nan() || !c.is_finite() || q_max >= 0.999 {
        Verdict::Fail
    } else if q_max < 0.95 {
        Verdict::Pass
    } else {
        Verdict::Inconclusive
    };
    PowerFit { verdict, q: q_max, c }
}

fn least_squares_slope(pts: &[(f64, f64)]) -> Option<f64> {
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    if sxx == 0.0 || !sxy.is_finite() {
        None
    } else {
        Some(sxy / sxx)
    }
}

fn g3_probe(nl: &Nonlinearity, grid: &[f64], lambda1: f64) -> G3Probe {
    let bound = lambda1 / 2.0;
    let top = &grid[(DECADES - 2) * PER_DECADE..];
    let mut estimate = f64::NEG_INFINITY;
    for f in nl.components() {
        match component_g3(f, top) {
            Some(v) => estimate = estimate.max(v),
            None => {
                return G3Probe { verdict: Verdict::Inconclusive, estimate: f64::NAN, bound };
            }
        }
    }
    let verdict = if estimate < (1.0 - G3_MARGIN) * bound {
        Verdict::Pass
    } else if estimate > (1.0 + G3_MARGIN) * bound {
        Verdict::Fail
    } else {
        Verdict::Inconclusive
    };
    G3Probe { verdict, estimate, bound }
}

fn component_g3(f: &ScalarFunction, top: &[f64]) -> Option<f64> {
    let ts: Vec<f64> = top.iter().flat_map(|&s| [s, -s]).collect();
    let values = f.primitive_values(&ts).ok()?;
    let best = ts
        .iter()
        .zip(&values)
        .map(|(&t, &v)| v / (t * t))
        .fold(f64::NEG_INFINITY, f64::max);
    best.is_finite().then_some(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlin::{catalog_make, CatalogParams};

    #[test]
    fn grid_shape() {
        let g = log_probe_grid();
        assert_eq!(g.len(), 1025);
        assert!((g[0] - 1e-8).abs() < 1e-22);
        assert!((g[1024] / 1e8 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rational_sq_passes() {
        let nl = catalog_make("rational_sq", &CatalogParams::with_n(2)).unwrap();
        let v = probe_hypotheses(&nl, 1.0);
        assert_eq!(v.h1.verdict, Verdict::Pass);
        assert_eq!(v.h2_prime.verdict, Verdict::Pass);
        assert_eq!(v.h2.verdict, Verdict::Pass);
        let at_15 = v.h2.per_nu0.iter().find(|(nu, _)| *nu == 1.5).unwrap();
        assert_eq!(at_15.1.verdict, Verdict::Pass);
        assert_eq!(v.g3.verdict, Verdict::Pass);
        assert_eq!(v.h1_star.verdict, Verdict::Pass);
    }

    #[test]
    fn linear_fails() {
        let nl = Nonlinearity::uniform(ScalarFunction::new("s", |s| s), 1).unwrap();
        let v = probe_hypotheses(&nl, 1.0);
        assert_eq!(v.h1.verdict, Verdict::Fail);
        assert_eq!(v.h2_prime.verdict, Verdict::Fail);
        assert_eq!(v.h2.verdict, Verdict::Fail);
        assert_eq!(v.h1_star.verdict, Verdict::Fail);
        assert!((v.h1_star.q - 1.0).abs() < 1e-9);
        // F(ξ)/ξ² = 1/2 sits inside the margin around λ₁/2 = 1/2.
        assert_eq!(v.g3.verdict, Verdict::Inconclusive);
    }

    #[test]
    fn power_fit_recovers_exponent() {
        for q in [0.2, 0.5, 0.8] {
            let nl = catalog_make("power", &CatalogParams::with_n(1).number("q", q)).unwrap();
            let v = probe_hypotheses(&nl, 1.0);
            assert_eq!(v.h1.verdict, Verdict::Pass, "q = {q}");
            assert!((v.h1_star.q - q).abs() < 0.05);
            assert_eq!(v.h1_star.verdict, Verdict::Pass);
        }
    }

    #[test]
    fn ex41_satisfies_weak_not_strong_condition_at_zero() {
        let nl = catalog_make("ex41_log", &CatalogParams::with_n(3)).unwrap();
        let v = probe_hypotheses(&nl, 1.0);
        assert_ne!(v.h2_prime.verdict, Verdict::Fail);
        assert_eq!(v.h2.verdict, Verdict::Fail);
        assert!(v.h2.per_nu0.iter().all(|(_, p)| p.verdict == Verdict::Fail));
    }

    #[test]
    fn verdict_combination() {
        assert_eq!(Verdict::Pass.and(Verdict::Pass), Verdict::Pass);
        assert_eq!(Verdict::Pass.and(Verdict::Inconclusive), Verdict::Inconclusive);
        assert_eq!(Verdict::Inconclusive.and(Verdict::Fail), Verdict::Fail);
    }
}
