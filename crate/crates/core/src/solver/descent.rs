#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::{EnergyModel, SolverError};
use crate::vecops::{axpy, dot, norm2};

const ARMIJO_C: f64 = 1e-4;
const MIN_STEP: f64 = 1e-20;

/// Steepest descent on `J` with Armijo backtracking (`c = 1e-4`, halving).
///
/// Stops when `‖∇J‖ < tol·(1 + ‖u‖)`, when no step decreases `J`, or after
/// `max_iter` iterations; returns the last iterate. Each accepted step
/// doubles the next trial step.
pub fn gradient_descent(
    model: &EnergyModel<'_>,
    u0: &[f64],
    tol: f64,
    max_iter: usize,
    divergence_norm: f64,
) -> Result<Vec<f64>, SolverError> {
    let mut u = u0.to_vec();
    let mut step = 1.0 / model.problem.matrix().lambda_max();
    for _ in 0..max_iter {
        let g = model.gradient(&u);
        let g2 = dot(&g, &g);
        if g2.sqrt() < tol * (1.0 + norm2(&u)) {
            break;
        }
        let mut t = step * 2.0;
        let accepted = loop {
            let cand = axpy(&u, -t, &g);
            let dj = model.energy_change(&u, &cand)?;
            if dj <= -ARMIJO_C * t * g2 {
                break Some(cand);
            }
            t /= 2.0;
            if t < MIN_STEP {
                break None;
            }
        };
        match accepted {
            Some(next) => {
                u = next;
                step = t;
            }
            None => break,
        }
        let norm = norm2(&u);
        if norm > divergence_norm {
            return Err(SolverError::Diverged { norm });
        }
    }
    Ok(u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::SpdMatrix;
    use crate::nonlin::{catalog_make, CatalogParams};
    use crate::problems::Problem;
    use alloc::vec;

    #[test]
    fn descends_into_nearest_minimum() {
        let f = catalog_make("rational_sq", &CatalogParams::with_n(1)).unwrap();
        let p = Problem::new(SpdMatrix::new(&[vec![2.0]]).unwrap(), f).unwrap();
        let m = EnergyModel::new(&p, 5.0);
        let u = gradient_descent(&m, &[1.0], 1e-10, 10_000, 1e8).unwrap();
        assert!((u[0] - 2.0).abs() < 1e-8);
        let u = gradient_descent(&m, &[0.3], 1e-10, 10_000, 1e8).unwrap();
        assert!(u[0].abs() < 1e-8);
    }
}
