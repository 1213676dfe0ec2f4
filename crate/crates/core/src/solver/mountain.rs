use alloc::vec::Vec;

use super::newton::{make_critical_point, newton_iterate};
use super::{CriticalPoint, EnergyModel, SolverConfig, SolverError};
use crate::search::golden_max;
use crate::vecops::{axpy, dist2, dot, norm2};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MountainPassConfig {
    /// Polyline vertices, endpoints included.
    pub points: usize,
    /// Stop when the perpendicular gradient at the path maximum drops below
    /// `tol · (1 + ‖u‖)`.
    pub tol: f64,
    /// Budget of single-vertex updates.
    pub max_updates: usize,
    /// Base step `step_scale / (1 + ‖∇J‖)`.
    pub step_scale: f64,
}

impl Default for MountainPassConfig {
    fn default() -> Self {
        MountainPassConfig { points: 41, tol: 1e-7, max_updates: 100_000, step_scale: 0.1 }
    }
}

/// Largest multiple of the base step the adaptive step may grow to.
const MAX_STEP_GROWTH: f64 = 100.0;

/// Path deformation from `0` to `endpoint`.
///
/// The highest interior vertex is moved along the component of `−∇J`
/// perpendicular to the path (Armijo-damped, base step
/// `step_scale/(1+‖∇J‖)`, doubled after each success up to 100×). Vertices
/// are redistributed by arclength whenever the spacing becomes uneven. Once
/// the perpendicular gradient is small, `J` is maximized along the two
/// path segments adjacent to the top vertex and the maximizer is polished
/// by Newton's method.
pub fn mountain_pass(
    model: &EnergyModel<'_>,
    endpoint: &[f64],
    cfg: &SolverConfig,
) -> Result<CriticalPoint, SolverError> {
    let n = model.dim();
    if endpoint.len() != n {
        return Err(SolverError::DimensionMismatch { expected: n, found: endpoint.len() });
    }
    let mp = cfg.mountain;
    let j_end = model.energy(endpoint)?;
    if !(j_end < 0.0) {
        return Err(SolverError::GeometryViolated { energy: j_end });
    }
    let count = mp.points.max(3);
    let straight = |end: &[f64]| -> Vec<Vec<f64>> {
        (0..count).map(|i| end.iter().map(|x| x * i as f64 / (count - 1) as f64).collect()).collect()
    };
    let mut path = straight(endpoint);
    let mut energies = path_energies(model, &path)?;
    if energies[1..count - 1].iter().all(|&e| e <= 0.0) {
        // The barrier around 0 is thinner than one segment: pull the end in
        // along the same ray to the last point that still has J < 0.
        let short = shortened_endpoint(model, endpoint)?.ok_or(SolverError::NoBarrier)?;
        path = straight(&short);
        energies = path_energies(model, &path)?;
        if energies[1..count - 1].iter().all(|&e| e <= 0.0) {
            return Err(SolverError::NoBarrier);
        }
    }

    let mut growth = 1.0;
    let mut updates = 0;
    let top = loop {
        let m = argmax_interior(&energies);
        let tangent = axpy(&path[m + 1], -1.0, &path[m - 1]);
        let tn = norm2(&tangent);
        let g = model.gradient(&path[m]);
        let perp = if tn > 0.0 {
            let along = dot(&g, &tangent) / (tn * tn);
            axpy(&g, -along, &tangent)
        } else {
            g.clone()
        };
        let pn = norm2(&perp);
        if pn < mp.tol * (1.0 + norm2(&path[m])) {
            break m;
        }
        if updates >= mp.max_updates {
            return Err(SolverError::MaxDeformationIterations { updates, residual: pn });
        }
        updates += 1;

        let mut alpha = growth * mp.step_scale / (1.0 + norm2(&g));
        let mut moved = false;
        for _ in 0..60 {
            let cand = axpy(&path[m], -alpha, &perp);
            let dj = model.energy_change(&path[m], &cand)?;
            if dj <= -1e-4 * alpha * pn * pn {
                energies[m] += dj;
                path[m] = cand;
                moved = true;
                break;
            }
            alpha /= 2.0;
            growth = (growth / 2.0).max(1.0 / 1024.0);
        }
        if !moved {
            // No perpendicular descent is possible at this resolution.
            break m;
        }
        growth = (growth * 2.0).min(MAX_STEP_GROWTH);
        if uneven(&path) {
            path = redistribute(&path);
            energies = path_energies(model, &path)?;
        }
    };

    let (a, b, c) = (&path[top - 1], &path[top], &path[top + 1]);
    let along = |s: f64| -> Vec<f64> {
        if s < 0.0 {
            axpy(b, -s, &axpy(a, -1.0, b))
        } else {
            axpy(b, s, &axpy(c, -1.0, b))
        }
    };
    let (s, _) = golden_max(|s| model.energy(&along(s)).unwrap_or(f64::NEG_INFINITY), -1.0, 1.0, 1e-12);
    let mut last_err = None;
    for start in [along(s), b.clone()] {
        let attempt = newton_iterate(model, &start, cfg).and_then(|(u, _)| make_critical_point(model, u, cfg));
        match attempt {
            Ok(cp) if cp.energy > 0.0 && dist2(&cp.u, endpoint) > cfg.dedupe_tol => return Ok(cp),
            Ok(cp) => last_err = Some(SolverError::DistinctnessFailed { distance: dist2(&cp.u, endpoint).min(cp.norm()) }),
            Err(e) => last_err = Some(e),
        }
    }
    Err(last_err.expect("at least one polish attempt"))
}

/// Halves `s` from 1 while `J(s·e) < 0` and returns the smallest such
/// `s·e`, or `None` if the ray never turns positive.
fn shortened_endpoint(model: &EnergyModel<'_>, endpoint: &[f64]) -> Result<Option<Vec<f64>>, SolverError> {
    let mut s = 1.0;
    for _ in 0..60 {
        let next: Vec<f64> = endpoint.iter().map(|x| x * s / 2.0).collect();
        if model.energy(&next)? >= 0.0 {
            return Ok(Some(endpoint.iter().map(|x| x * s).collect()));
        }
        s /= 2.0;
    }
    Ok(None)
}

fn path_energies(model: &EnergyModel<'_>, path: &[Vec<f64>]) -> Result<Vec<f64>, SolverError> {
    let mut out = Vec::with_capacity(path.len());
    out.push(0.0);
    for (i, w) in path.windows(2).enumerate() {
        out.push(out[i] + model.energy_change(&w[0], &w[1])?);
    }
    Ok(out)
}

fn argmax_interior(energies: &[f64]) -> usize {
    let mut best = 1;
    for i in 2..energies.len() - 1 {
        if energies[i] > energies[best] {
            best = i;
        }
    }
    best
}

fn segment_lengths(path: &[Vec<f64>]) -> Vec<f64> {
    path.windows(2).map(|w| dist2(&w[0], &w[1])).collect()
}

fn uneven(path: &[Vec<f64>]) -> bool {
    let lens = segment_lengths(path);
    let mean = lens.iter().sum::<f64>() / lens.len() as f64;
    lens.iter().any(|&l| l > 1.5 * mean || l < 0.5 * mean)
}

/// Places the same number of vertices at equal arclength along the path.
fn redistribute(path: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let lens = segment_lengths(path);
    let total: f64 = lens.iter().sum();
    let count = path.len();
    let mut out = Vec::with_capacity(count);
    out.push(path[0].clone());
    let mut seg = 0;
    let mut start = 0.0;
    for i in 1..count - 1 {
        let target = total * i as f64 / (count - 1) as f64;
        while seg + 1 < lens.len() && start + lens[seg] < target {
            start += lens[seg];
            seg += 1;
        }
        let frac = if lens[seg] > 0.0 { ((target - start) / lens[seg]).clamp(0.0, 1.0) } else { 0.0 };
        out.push(axpy(&path[seg], frac, &axpy(&path[seg + 1], -1.0, &path[seg])));
    }
    out.push(path[count - 1].clone());
    out
}
