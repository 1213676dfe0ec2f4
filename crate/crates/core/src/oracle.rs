//! Brute-force references used to cross-check the main build.
//!
//! Nothing here shares code paths with the solver or the primitive
//! evaluation of [`crate::nonlin`]: critical points come from an exhaustive
//! residual grid with finite-difference Newton refinement, primitives from a
//! fixed Gauss–Legendre rule, and `ρ` from a uniform scan.

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec;
use alloc::vec::Vec;
use thiserror::Error;

use crate::linalg::solve_dense;
use crate::nonlin::ScalarFunction;
use crate::problems::Problem;
use crate::quad::gauss_legendre_composite;
use crate::vecops::{axpy, dist2, norm_inf};

/// Largest grid the oracle will evaluate.
pub const GRID_BUDGET: usize = 10_000_000;
/// Grid residual minima above this are ignored.
pub const GRID_RESIDUAL_CUTOFF: f64 = 0.1;
/// Refinement target for `‖Au − λf(u)‖∞`.
pub const REFINE_TOL: f64 = 1e-8;
pub const DEDUPE_TOL: f64 = 1e-6;
pub const REFERENCE_PANELS: usize = 4096;
/// Dyadic levels used to resolve a kink at a panel end.
const KINK_LEVELS: usize = 48;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("grid of {points} points exceeds the budget of {GRID_BUDGET}")]
    BudgetExceeded { points: u128 },
    #[error("{steps} steps per axis is above the cap of {cap} for n = {n}")]
    TooManySteps { n: usize, steps: usize, cap: usize },
    #[error("grid oracle supports n ≤ 3, got n = {0}")]
    DimensionTooLarge(usize),
    #[error("bad grid: {0}")]
    BadGrid(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub radius: f64,
    pub steps: usize,
}

impl GridSpec {
    /// Per-axis cap for dimension `n`.
    pub fn max_steps(n: usize) -> usize {
        match n {
            1 => GRID_BUDGET,
            2 => 401,
            3 => 101,
            _ => 0,
        }
    }

    /// The finest grid allowed for `n`, with `n = 1` held at 20001 points.
    pub fn finest(n: usize, radius: f64) -> GridSpec {
        GridSpec { radius, steps: if n == 1 { 20_001 } else { Self::max_steps(n) } }
    }

    fn check(&self, n: usize) -> Result<(), OracleError> {
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(OracleError::BadGrid("radius must be positive and finite"));
        }
        if self.steps < 3 {
            return Err(OracleError::BadGrid("need at least 3 steps per axis"));
        }
        if n > 3 {
            return Err(OracleError::DimensionTooLarge(n));
        }
        let points = (self.steps as u128).pow(n as u32);
        if points > GRID_BUDGET as u128 {
            return Err(OracleError::BudgetExceeded { points });
        }
        let cap = Self::max_steps(n);
        if self.steps > cap {
            return Err(OracleError::TooManySteps { n, steps: self.steps, cap });
        }
        Ok(())
    }

    fn coord(&self, i: usize) -> f64 {
        -self.radius + 2.0 * self.radius * i as f64 / (self.steps - 1) as f64
    }

    fn spacing(&self) -> f64 {
        2.0 * self.radius / (self.steps - 1) as f64
    }
}

fn residual(problem: &Problem, lambda: f64, u: &[f64]) -> Vec<f64> {
    let au = problem.matrix().mul_vec(u);
    let fu = problem.nonlinearity().eval(u);
    au.iter().zip(&fu).map(|(a, f)| a - lambda * f).collect()
}

fn residual_inf(problem: &Problem, lambda: f64, u: &[f64]) -> f64 {
    let r = norm_inf(&residual(problem, lambda, u));
    if r.is_finite() { r } else { f64::INFINITY }
}

/// All zeros of `Au − λf(u)` that the grid over `[−R, R]ⁿ` can see, sorted
/// lexicographically.
pub fn grid_critical_points(problem: &Problem, lambda: f64, grid: GridSpec) -> Result<Vec<Vec<f64>>, OracleError> {
    let n = problem.dim();
    grid.check(n)?;
    let steps = grid.steps;
    let total = steps.pow(n as u32);
    let index_to_point = |mut idx: usize| -> Vec<f64> {
        let mut p = vec![0.0; n];
        for slot in p.iter_mut().rev() {
            *slot = grid.coord(idx % steps);
            idx /= steps;
        }
        p
    };
    let values: Vec<f64> = (0..total).map(|i| residual_inf(problem, lambda, &index_to_point(i))).collect();

    // Strict local minima alone miss a root sitting a cell or two from a
    // deeper one (its cell merges into the neighbour's basin), so every
    // point under the cutoff is refined, local minima first.
    let mut seeds: Vec<usize> = (0..total).filter(|&i| values[i] < GRID_RESIDUAL_CUTOFF).collect();
    seeds.sort_by_key(|&i| !is_local_min(&values, i, n, steps));
    let h = grid.spacing();
    let mut found: Vec<Vec<f64>> = Vec::new();
    for seed in seeds {
        let start = index_to_point(seed);
        // A seed already inside a found root's cell adds nothing.
        if found.iter().any(|q| norm_inf(&axpy(q, -1.0, &start)) < 0.5 * h) {
            continue;
        }
        let Some(root) = refine(problem, lambda, start, h) else { continue };
        if found.iter().all(|q| dist2(q, &root) > DEDUPE_TOL) {
            found.push(root);
        }
    }
    found.sort_by(|a, b| {
        a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(core::cmp::Ordering::Equal)
    });
    Ok(found)
}

/// `values[idx]` is no larger than any of its up-to-`3ⁿ − 1` neighbours, ties
/// going to the lexicographically first point.
fn is_local_min(values: &[f64], idx: usize, n: usize, steps: usize) -> bool {
    let mut multi = vec![0usize; n];
    let mut rem = idx;
    for slot in multi.iter_mut().rev() {
        *slot = rem % steps;
        rem /= steps;
    }
    let v = values[idx];
    (0..3usize.pow(n as u32)).all(|mut code| {
        let mut flat = 0usize;
        let mut moved = false;
        for &c in &multi {
            let d = (code % 3) as isize - 1;
            code /= 3;
            moved |= d != 0;
            let c = c as isize + d;
            if c < 0 || c >= steps as isize {
                return true;
            }
            flat = flat * steps + c as usize;
        }
        !moved || if flat < idx { v < values[flat] } else { v <= values[flat] }
    })
}

/// Coordinate bisection inside the seed's grid cell, then damped Newton with
/// a finite-difference Jacobian.
fn refine(problem: &Problem, lambda: f64, mut u: Vec<f64>, h: f64) -> Option<Vec<f64>> {
    let n = u.len();
    for _sweep in 0..4 {
        for k in 0..n {
            let comp = |x: f64, u: &mut Vec<f64>| {
                u[k] = x;
                residual(problem, lambda, u)[k]
            };
            let centre = u[k];
            let (mut lo, mut hi) = (centre - h, centre + h);
            let mut work = u.clone();
            let (glo, ghi) = (comp(lo, &mut work), comp(hi, &mut work));
            if !(glo * ghi < 0.0) {
                continue;
            }
            let neg_at_lo = glo < 0.0;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                if (comp(mid, &mut work) < 0.0) == neg_at_lo {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let candidate = 0.5 * (lo + hi);
            let mut trial = u.clone();
            trial[k] = candidate;
            if residual_inf(problem, lambda, &trial) <= residual_inf(problem, lambda, &u) {
                u = trial;
            }
        }
    }

    let mut r = residual_inf(problem, lambda, &u);
    for _ in 0..100 {
        if r < REFINE_TOL {
            return Some(u);
        }
        let g = residual(problem, lambda, &u);
        let mut jac = vec![0.0; n * n];
        for j in 0..n {
            let step = 1e-7 * (1.0 + u[j].abs());
            let mut plus = u.clone();
            let mut minus = u.clone();
            plus[j] += step;
            minus[j] -= step;
            let (gp, gm) = (residual(problem, lambda, &plus), residual(problem, lambda, &minus));
            for i in 0..n {
                jac[i * n + j] = (gp[i] - gm[i]) / (2.0 * step);
            }
        }
        let rhs: Vec<f64> = g.iter().map(|x| -x).collect();
        let d = solve_dense(n, &jac, &rhs).ok()?;
        let mut alpha = 1.0;
        let mut moved = false;
        for _ in 0..40 {
            let cand = axpy(&u, alpha, &d);
            let rc = residual_inf(problem, lambda, &cand);
            if rc < r {
                u = cand;
                r = rc;
                moved = true;
                break;
            }
            alpha /= 2.0;
        }
        if !moved {
            break;
        }
    }
    (r < REFINE_TOL).then_some(u)
}

/// `∫₀ᵗ f` by composite 5-point Gauss–Legendre on uniform panels, split at
/// the function's kinks; panels touching a kink are refined dyadically
/// towards it so algebraic singularities do not spoil the rule.
pub fn reference_primitive(f: &ScalarFunction, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    let (a, b) = if t > 0.0 { (0.0, t) } else { (t, 0.0) };
    let mut breaks = vec![a];
    let mut inner: Vec<f64> = f.kinks().iter().copied().filter(|&k| k > a && k < b).collect();
    inner.sort_by(f64::total_cmp);
    breaks.extend(inner);
    breaks.push(b);
    let kinked = |x: f64| f.kinks().contains(&x) || x == 0.0;

    let g = |s: f64| f.eval(s);
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let len = hi - lo;
        let panels = ((REFERENCE_PANELS as f64 * len / (b - a)).ceil() as usize).max(1);
        let h = len / panels as f64;
        let (mut start, mut end) = (lo, hi);
        if kinked(lo) && panels > 1 {
            total += graded(&g, lo, lo + h);
            start = lo + h;
        }
        if kinked(hi) && panels > 1 {
            total += graded(&g, hi, hi - h);
            end = hi - h;
        }
        let rest = panels - usize::from(start > lo) - usize::from(end < hi);
        total += gauss_legendre_composite(g, start, end, rest.max(1));
    }
    if t > 0.0 { total } else { -total }
}

/// `∫` from `from` to `to`, using panels that halve in length towards
/// `from`.
fn graded<F: Fn(f64) -> f64>(g: &F, from: f64, to: f64) -> f64 {
    let mut sum = 0.0;
    let mut far = to;
    for _ in 0..KINK_LEVELS {
        let near = from + 0.5 * (far - from);
        sum += gauss_legendre_composite(g, near, far, 1);
        far = near;
    }
    let signed = sum + gauss_legendre_composite(g, from, far, 1);
    if to > from { signed } else { -signed }
}

/// Uniform scan of `ρ(t) = Σ F_k(t)/t²` over `[lo, hi]` with the given step.
/// Primitives are accumulated panel by panel from a reference value at
/// `lo`; points within `1e-9` of zero are skipped. Returns the best point
/// and value, or `None` if every grid point was skipped.
pub fn dense_rho_scan(problem: &Problem, range: (f64, f64), step: f64) -> Option<(f64, f64)> {
    let (lo, hi) = range;
    if !(step > 0.0) || !(hi >= lo) {
        return None;
    }
    let count = ((hi - lo) / step).floor() as usize + 1;
    let comps = problem.nonlinearity().components();
    let mut prims: Vec<f64> = comps.iter().map(|f| reference_primitive(f, lo)).collect();
    let mut best: Option<(f64, f64)> = None;
    let mut prev = lo;
    for i in 0..count {
        let t = lo + step * i as f64;
        if i > 0 {
            for (p, f) in prims.iter_mut().zip(comps) {
                *p += panel_integral(f, prev, t);
            }
        }
        prev = t;
        if t.abs() < 1e-9 {
            continue;
        }
        let rho = prims.iter().sum::<f64>() / (t * t);
        if best.is_none_or(|(_, b)| rho > b) {
            best = Some((t, rho));
        }
    }
    best
}

/// One GL5 panel, split at any kink or at zero inside it.
fn panel_integral(f: &ScalarFunction, a: f64, b: f64) -> f64 {
    let mut cut: Vec<f64> = f.kinks().iter().copied().chain([0.0]).filter(|&k| k > a && k < b).collect();
    cut.sort_by(f64::total_cmp);
    let mut pts = vec![a];
    pts.extend(cut);
    pts.push(b);
    pts.windows(2).map(|w| gauss_legendre_composite(|s| f.eval(s), w[0], w[1], 1)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdMatrix;
    use crate::nonlin::{catalog_make, CatalogParams};
    use crate::problems::build_tridiagonal;

    fn benchmark() -> Problem {
        let f = catalog_make("rational_sq", &CatalogParams::with_n(1)).unwrap();
        Problem::new(SpdMatrix::new(&[vec![2.0]]).unwrap(), f).unwrap()
    }

    #[test]
    fn benchmark_roots() {
        let p = benchmark();
        let pts = grid_critical_points(&p, 5.0, GridSpec { radius: 5.0, steps: 1001 }).unwrap();
        assert_eq!(pts.len(), 3, "{pts:?}");
        for (got, want) in pts.iter().zip([0.0, 0.5, 2.0]) {
            assert!((got[0] - want).abs() < 1e-8);
        }
        let pts = grid_critical_points(&p, 3.0, GridSpec { radius: 5.0, steps: 1001 }).unwrap();
        assert_eq!(pts, vec![vec![0.0]]);
    }

    #[test]
    fn two_dimensional_tensor() {
        let f = catalog_make("rational_sq", &CatalogParams::with_n(2)).unwrap();
        let p = build_tridiagonal(2, -1.0, 2.0, f).unwrap();
        let pts = grid_critical_points(&p, 6.0, GridSpec { radius: 8.0, steps: 401 }).unwrap();
        for u in &pts {
            assert!(residual_inf(&p, 6.0, u) < REFINE_TOL);
        }
        // The origin and the symmetric pair on the diagonal: (λ ± √(λ²−4))/2.
        for t in [0.0, (6.0 - 32f64.sqrt()) / 2.0, (6.0 + 32f64.sqrt()) / 2.0] {
            assert!(pts.iter().any(|u| dist2(u, &[t, t]) < 1e-8), "{t} missing from {pts:?}");
        }
    }

    #[test]
    fn budget_guard() {
        let f = catalog_make("rational_sq", &CatalogParams::with_n(3)).unwrap();
        let p = build_tridiagonal(3, -1.0, 2.0, f).unwrap();
        assert!(matches!(
            grid_critical_points(&p, 1.0, GridSpec { radius: 1.0, steps: 300 }),
            Err(OracleError::BudgetExceeded { .. })
        ));
        assert!(matches!(
            grid_critical_points(&p, 1.0, GridSpec { radius: 1.0, steps: 150 }),
            Err(OracleError::TooManySteps { .. })
        ));
    }

    #[test]
    fn reference_primitive_matches_closed_forms() {
        let ex42 = catalog_make("ex42_logistic_log", &CatalogParams::with_n(1)).unwrap();
        assert!((reference_primitive(ex42.component(0), 1.0) - 0.263_943_507_354_842).abs() < 1e-8);
        let zero = ScalarFunction::new("0", |_| 0.0);
        assert_eq!(reference_primitive(&zero, 3.0), 0.0);
        let ex37 = catalog_make("ex37_sqrt", &CatalogParams::with_n(2)).unwrap();
        for t in [-10.0, 1.0, 2.5, 3.0, 10.0] {
            for f in ex37.components() {
                let closed = f.primitive_value(t).unwrap();
                assert!((reference_primitive(f, t) - closed).abs() < 1e-8, "t = {t}");
            }
        }
        let power = catalog_make("power", &CatalogParams::with_n(1).number("q", 0.5)).unwrap();
        let f = power.component(0);
        assert!((reference_primitive(f, 4.0) - reference_primitive(f, -4.0)).abs() < 1e-12);
    }

    #[test]
    fn rho_scans() {
        let lin = Problem::new(SpdMatrix::identity(1), crate::nonlin::Nonlinearity::uniform(
            ScalarFunction::new("s", |s| s),
            1,
        ).unwrap())
        .unwrap();
        let (_, rho) = dense_rho_scan(&lin, (-2.0, 2.0), 1e-3).unwrap();
        assert!((rho - 0.5).abs() < 1e-12);
        let ex37 = catalog_make("ex37_sqrt", &CatalogParams::with_n(2)).unwrap();
        let p = build_tridiagonal(2, -1.0, 2.0, ex37).unwrap();
        assert_eq!(dense_rho_scan(&p, (-10.0, 1.9), 1e-3).unwrap().1, 0.0);
    }
}
