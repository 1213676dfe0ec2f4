//! One-dimensional quadrature.
//!
//! [`adaptive_simpson`] is the production rule behind primitives without a
//! closed form. [`gauss_legendre_composite`] is a fixed rule kept for
//! cross-checking it.

use alloc::collections::BinaryHeap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("quadrature budget of {max_subdivisions} subdivisions exceeded (estimate {estimate:e}, error {error:e})")]
    BudgetExceeded { max_subdivisions: usize, estimate: f64, error: f64 },
    #[error("integrand is not finite at {at}")]
    NonFinite { at: f64 },
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    flm: f64,
    frm: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn simpson(h: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    h / 6.0 * (fa + 4.0 * fm + fb)
}

fn eval<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::NonFinite { at: x })
    }
}

fn make_panel<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
) -> Result<Panel, QuadError> {
    let m = 0.5 * (a + b);
    let flm = eval(f, 0.5 * (a + m))?;
    let frm = eval(f, 0.5 * (m + b))?;
    let whole = simpson(b - a, fa, fm, fb);
    let halves = simpson(m - a, fa, flm, fm) + simpson(b - m, fm, frm, fb);
    let diff = halves - whole;
    Ok(Panel { a, b, fa, fm, fb, flm, frm, value: halves + diff / 15.0, error: diff.abs() / 15.0 })
}

/// Globally adaptive Simpson quadrature of `f` over `[a, b]`.
///
/// Panels are split largest-error first until the summed error estimate is
/// below `tol` (or below the rounding floor `1e-14 · Σ|panel|`, whichever
/// is larger). `breakpoints` inside `(a, b)` are always panel edges, which
/// lets kinks of piecewise integrands sit on a panel boundary.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    tol: f64,
    max_subdivisions: usize,
    breakpoints: &[f64],
) -> Result<f64, QuadError> {
    if a == b {
        return Ok(0.0);
    }
    if b < a {
        return adaptive_simpson(f, b, a, tol, max_subdivisions, breakpoints).map(|v| -v);
    }
    let mut edges: Vec<f64> = Vec::with_capacity(breakpoints.len() + 2);
    edges.push(a);
    let mut inner: Vec<f64> = breakpoints.iter().copied().filter(|&x| x > a && x < b).collect();
    inner.sort_by(f64::total_cmp);
    inner.dedup();
    edges.extend(inner);
    edges.push(b);

    const INITIAL_PANELS: usize = 8;
    let mut heap = BinaryHeap::new();
    for w in edges.windows(2) {
        let h = (w[1] - w[0]) / INITIAL_PANELS as f64;
        for i in 0..INITIAL_PANELS {
            let lo = w[0] + h * i as f64;
            let hi = if i + 1 == INITIAL_PANELS { w[1] } else { lo + h };
            let fa = eval(&f, lo)?;
            let fm = eval(&f, 0.5 * (lo + hi))?;
            let fb = eval(&f, hi)?;
            heap.push(make_panel(&f, lo, hi, fa, fm, fb)?);
        }
    }

    let mut total_error: f64 = heap.iter().map(|p| p.error).sum();
    let mut total_abs: f64 = heap.iter().map(|p| p.value.abs()).sum();
    let mut subdivisions = 0usize;
    loop {
        let floor = 1e-14 * total_abs;
        if total_error <= tol.max(floor) {
            let exact: f64 = heap.iter().map(|p| p.error).sum();
            total_abs = heap.iter().map(|p| p.value.abs()).sum();
            if exact <= tol.max(1e-14 * total_abs) {
                break;
            }
            total_error = exact;
        }
        let worst = heap.pop().expect("heap is never empty");
        // Nothing left to gain once panels shrink to a few ulps.
        let m = 0.5 * (worst.a + worst.b);
        if !(m > worst.a && m < worst.b) {
            heap.push(Panel { error: 0.0, ..worst });
            total_error -= worst.error;
            continue;
        }
        subdivisions += 1;
        if subdivisions > max_subdivisions {
            heap.push(worst);
            let estimate = heap.iter().map(|p| p.value).sum();
            return Err(QuadError::BudgetExceeded {
                max_subdivisions,
                estimate,
                error: heap.iter().map(|p| p.error).sum(),
            });
        }
        let left = make_panel(&f, worst.a, m, worst.fa, worst.flm, worst.fm)?;
        let right = make_panel(&f, m, worst.b, worst.fm, worst.frm, worst.fb)?;
        total_error += left.error + right.error - worst.error;
        total_abs += left.value.abs() + right.value.abs() - worst.value.abs();
        heap.push(left);
        heap.push(right);
    }
    let mut panels = heap.into_vec();
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    Ok(panels.iter().map(|p| p.value).sum())
}

const GL5_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683,
    0.0,
    0.538_469_310_105_683,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_1,
    0.478_628_670_499_366_5,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_5,
    0.236_926_885_056_189_1,
];

/// Composite 5-point Gauss–Legendre rule on `panels` uniform panels.
pub fn gauss_legendre_composite<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    if a == b || panels == 0 {
        return 0.0;
    }
    let h = (b - a) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let mid = a + h * (p as f64 + 0.5);
        let half = 0.5 * h;
        let mut s = 0.0;
        for (x, w) in GL5_NODES.iter().zip(GL5_WEIGHTS.iter()) {
            s += w * f(mid + half * x);
        }
        total += half * s;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_exact() {
        let v = adaptive_simpson(|x| x * x * x - 2.0 * x, 0.0, 2.0, 1e-12, 1 << 20, &[]).unwrap();
        assert!((v - 0.0).abs() < 1e-12);
        let g = gauss_legendre_composite(|x| x.powi(9), 0.0, 1.0, 1);
        assert!((g - 0.1).abs() < 1e-14);
    }

    #[test]
    fn reversed_interval_flips_sign() {
        let fwd = adaptive_simpson(f64::exp, 0.0, 1.0, 1e-12, 1 << 20, &[]).unwrap();
        let bwd = adaptive_simpson(f64::exp, 1.0, 0.0, 1e-12, 1 << 20, &[]).unwrap();
        assert!((fwd + bwd).abs() < 1e-15);
        assert!((fwd - (core::f64::consts::E - 1.0)).abs() < 1e-11);
    }

    #[test]
    fn square_root_singularity() {
        let v = adaptive_simpson(|x| (x - 2.0).max(0.0).sqrt(), 0.0, 3.0, 1e-10, 1 << 20, &[]).unwrap();
        assert!((v - 2.0 / 3.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn budget_and_non_finite() {
        let err = adaptive_simpson(|x| (1.0 / x).sin(), 1e-6, 1.0, 1e-14, 16, &[]).unwrap_err();
        assert!(matches!(err, QuadError::BudgetExceeded { .. }));
        let err = adaptive_simpson(|x| 1.0 / (x - 0.5), 0.0, 1.0, 1e-10, 1 << 20, &[]).unwrap_err();
        assert!(matches!(err, QuadError::NonFinite { .. }));
    }
}
