//! Golden-section search and bracketed grid maximization.


const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes `f` on `[lo, hi]` by golden-section search, stopping when the
/// bracket width drops below `rel_tol · max(|x|, tiny)`. Returns `(x, f(x))`
/// for the best point seen, endpoints included.
pub fn golden_max<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, rel_tol: f64) -> (f64, f64) {
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut best = (a, f(a));
    let fb = f(b);
    if fb > best.1 {
        best = (b, fb);
    }
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let mut fc = f(c);
    let mut fd = f(d);
    for _ in 0..400 {
        let scale = c.abs().max(d.abs()).max(1e-300);
        if (b - a) <= rel_tol * scale {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    for (x, y) in [(c, fc), (d, fd)] {
        if y > best.1 {
            best = (x, y);
        }
    }
    best
}

/// Maximizes `f` on `[lo, hi]` by a uniform scan of `points` intervals
/// followed by golden refinement around the best grid point.
pub fn scan_and_refine<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, points: usize) -> (f64, f64) {
    if lo == hi || points == 0 {
        return (lo, f(lo));
    }
    let h = (hi - lo) / points as f64;
    let mut best_i = 0;
    let mut best_v = f64::NEG_INFINITY;
    for i in 0..=points {
        let x = if i == points { hi } else { lo + h * i as f64 };
        let v = f(x);
        if v > best_v {
            best_v = v;
            best_i = i;
        }
    }
    let x_best = if best_i == points { hi } else { lo + h * best_i as f64 };
    let a = if best_i == 0 { lo } else { lo + h * (best_i - 1) as f64 };
    let b = if best_i + 1 >= points { hi } else { lo + h * (best_i + 1) as f64 };
    let refined = golden_max(&f, a, b, 1e-12);
    if refined.1 > best_v {
        refined
    } else {
        (x_best, best_v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parabola_peak() {
        let (x, y) = golden_max(|x| -(x - 1.3) * (x - 1.3) + 2.0, 0.0, 4.0, 1e-12);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((y - 2.0).abs() < 1e-13);
    }

    #[test]
    fn endpoint_maximum() {
        let (x, _) = golden_max(|x| x, -1.0, 3.0, 1e-10);
        assert_eq!(x, 3.0);
    }

    #[test]
    fn scan_finds_global_of_bimodal() {
        let f = |x: f64| (-(x - 1.0).powi(2)).exp() + 1.5 * (-(x + 2.0).powi(2) * 4.0).exp();
        let (x, _) = scan_and_refine(f, -5.0, 5.0, 1024);
        assert!((x + 2.0).abs() < 1e-3);
    }
}
