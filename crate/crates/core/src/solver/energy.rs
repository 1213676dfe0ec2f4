#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::vec::Vec;

use super::SolverError;
use crate::nonlin::{LargeDerivative, NonlinError};
use crate::problems::Problem;
use crate::vecops::dot;

/// `J(u) = Φ(u) − λΨ(u)` for a fixed problem and `λ`.
#[derive(Debug, Clone, Copy)]
pub struct EnergyModel<'a> {
    pub problem: &'a Problem,
    pub lambda: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub phi: f64,
    pub psi: f64,
    pub j: f64,
    pub gradient: Vec<f64>,
    /// Row-major; `None` when some `f_k′(u_k)` is unbounded.
    pub hessian: Option<Vec<f64>>,
}

impl<'a> EnergyModel<'a> {
    pub fn new(problem: &'a Problem, lambda: f64) -> Self {
        EnergyModel { problem, lambda }
    }

    pub fn dim(&self) -> usize {
        self.problem.dim()
    }

    fn check(&self, u: &[f64]) -> Result<(), SolverError> {
        if u.len() != self.dim() {
            return Err(SolverError::DimensionMismatch { expected: self.dim(), found: u.len() });
        }
        Ok(())
    }

    pub fn phi(&self, u: &[f64]) -> f64 {
        self.problem.matrix().quadratic_form(u) / 2.0
    }

    pub fn psi(&self, u: &[f64]) -> Result<f64, NonlinError> {
        self.problem.nonlinearity().psi(u)
    }

    pub fn energy(&self, u: &[f64]) -> Result<f64, SolverError> {
        self.check(u)?;
        Ok(self.phi(u) - self.lambda * self.psi(u)?)
    }

    /// `J(v) − J(u)`, integrating `f_k` only over `[u_k, v_k]`.
    pub fn energy_change(&self, u: &[f64], v: &[f64]) -> Result<f64, SolverError> {
        let mut dpsi = 0.0;
        for ((f, &a), &b) in self.problem.nonlinearity().components().iter().zip(u).zip(v) {
            if a == b {
                continue;
            }
            dpsi += if f.has_closed_primitive() {
                f.primitive_value(b)? - f.primitive_value(a)?
            } else {
                f.integrate(a, b)?
            };
        }
        Ok(self.phi(v) - self.phi(u) - self.lambda * dpsi)
    }

    /// `Au − λf(u)`.
    pub fn gradient(&self, u: &[f64]) -> Vec<f64> {
        let au = self.problem.matrix().mul_vec(u);
        let fu = self.problem.nonlinearity().eval(u);
        au.iter().zip(&fu).map(|(a, f)| a - self.lambda * f).collect()
    }

    pub fn residual(&self, u: &[f64]) -> f64 {
        let g = self.gradient(u);
        dot(&g, &g).sqrt()
    }

    /// `A − λ diag(f′(u))`, row-major.
    pub fn hessian(&self, u: &[f64]) -> Result<Vec<f64>, LargeDerivative> {
        let n = self.dim();
        let mut h = self.problem.matrix().entries().to_vec();
        for (k, (f, &x)) in self.problem.nonlinearity().components().iter().zip(u).enumerate() {
            h[k * n + k] -= self.lambda * f.derivative_value(x)?;
        }
        Ok(h)
    }

    pub fn evaluate(&self, u: &[f64]) -> Result<Evaluation, SolverError> {
        self.check(u)?;
        let phi = self.phi(u);
        let psi = self.psi(u)?;
        Ok(Evaluation {
            phi,
            psi,
            j: phi - self.lambda * psi,
            gradient: self.gradient(u),
            hessian: self.hessian(u).ok(),
        })
    }
}
