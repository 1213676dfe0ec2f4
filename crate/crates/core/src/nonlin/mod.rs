//! Componentwise nonlinearities `f_k`, their primitives
//! `F_k(t) = ∫₀ᵗ f_k(s) ds` and derivatives.
//!
//! A [`ScalarFunction`] always has an evaluator; the primitive and the
//! derivative are optional closed forms. Missing primitives fall back to
//! adaptive quadrature, missing derivatives to finite differences.

mod catalog;
mod probe;

use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;
use thiserror::Error;

use crate::exprfn::ExprError;
use crate::quad::{adaptive_simpson, QuadError};

pub use catalog::{catalog_make, CatalogParams, ParamValue, CATALOG_NAMES};
pub use probe::{
    log_probe_grid, probe_hypotheses, G3Probe, H2Probe, HypothesisVerdict, LimitProbe, PowerFit,
    Verdict, H2_NU0_CANDIDATES,
};

/// Absolute tolerance for quadrature-backed primitives.
pub const PRIMITIVE_TOL: f64 = 1e-10;
/// Subdivision budget for quadrature-backed primitives.
pub const PRIMITIVE_MAX_SUBDIVISIONS: usize = 1 << 20;
/// Derivatives above this magnitude are reported as [`LargeDerivative`].
pub const LARGE_DERIVATIVE: f64 = 1e8;

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NonlinError {
    #[error("quadrature of `{label}` on [0, {t}] failed: {source}")]
    Quadrature { label: String, t: f64, source: QuadError },
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogName(String),
    #[error("bad catalog parameters: {0}")]
    BadParams(String),
    #[error("expression error in component {component}: {source}")]
    Expr { component: usize, source: ExprError },
    #[error("a nonlinearity needs at least one component")]
    Empty,
}

/// The derivative is unbounded or non-finite at the probe point.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
#[error("derivative is unbounded near s = {at}")]
pub struct LargeDerivative {
    pub at: f64,
}

/// One component `f_k`.
#[derive(Clone)]
pub struct ScalarFunction {
    eval: RealFn,
    primitive: Option<RealFn>,
    derivative: Option<RealFn>,
    label: String,
    kinks: Vec<f64>,
    validated: bool,
}

impl fmt::Debug for ScalarFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunction")
            .field("label", &self.label)
            .field("closed_primitive", &self.primitive.is_some())
            .field("closed_derivative", &self.derivative.is_some())
            .field("kinks", &self.kinks)
            .field("validated", &self.validated)
            .finish()
    }
}

impl ScalarFunction {
    pub fn new(label: impl Into<String>, eval: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        ScalarFunction {
            eval: Arc::new(eval),
            primitive: None,
            derivative: None,
            label: label.into(),
            kinks: Vec::new(),
            validated: true,
        }
    }

    pub fn with_primitive(mut self, primitive: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.primitive = Some(Arc::new(primitive));
        self
    }

    pub fn with_derivative(mut self, derivative: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        self.derivative = Some(Arc::new(derivative));
        self
    }

    /// Points where `f` is not smooth; used as quadrature breakpoints and to
    /// switch finite differences to one-sided stencils.
    pub fn with_kinks(mut self, kinks: Vec<f64>) -> Self {
        self.kinks = kinks;
        self
    }

    pub fn non_validated(mut self) -> Self {
        self.validated = false;
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn kinks(&self) -> &[f64] {
        &self.kinks
    }

    pub fn is_validated(&self) -> bool {
        self.validated
    }

    pub fn has_closed_primitive(&self) -> bool {
        self.primitive.is_some()
    }

    pub fn has_closed_derivative(&self) -> bool {
        self.derivative.is_some()
    }

    pub fn eval(&self, s: f64) -> f64 {
        (self.eval)(s)
    }

    /// `c · f`, keeping closed forms.
    pub fn scaled(&self, c: f64) -> ScalarFunction {
        let eval = self.eval.clone();
        let mut out = ScalarFunction::new(alloc::format!("{c} * ({})", self.label), move |s| c * eval(s));
        if let Some(p) = self.primitive.clone() {
            out.primitive = Some(Arc::new(move |t| c * p(t)));
        }
        if let Some(d) = self.derivative.clone() {
            out.derivative = Some(Arc::new(move |s| c * d(s)));
        }
        out.kinks = self.kinks.clone();
        out.validated = self.validated;
        out
    }

    /// `∫ₐᵇ f` by adaptive quadrature, ignoring any closed-form primitive.
    pub fn integrate(&self, a: f64, b: f64) -> Result<f64, NonlinError> {
        adaptive_simpson(
            |s| self.eval(s),
            a,
            b,
            PRIMITIVE_TOL,
            PRIMITIVE_MAX_SUBDIVISIONS,
            &self.kinks,
        )
        .map_err(|source| NonlinError::Quadrature { label: self.label.clone(), t: b, source })
    }

    /// `F(t)`: the closed form when present, quadrature otherwise.
    pub fn primitive_value(&self, t: f64) -> Result<f64, NonlinError> {
        if t == 0.0 {
            return Ok(0.0);
        }
        match &self.primitive {
            Some(p) => Ok(p(t)),
            None => self.integrate(0.0, t),
        }
    }

    /// `F` on many points. Without a closed form the integrals are chained
    /// outward from 0 along each sign, so each piece of the line is
    /// integrated once.
    pub fn primitive_values(&self, ts: &[f64]) -> Result<Vec<f64>, NonlinError> {
        if let Some(p) = &self.primitive {
            return Ok(ts.iter().map(|&t| if t == 0.0 { 0.0 } else { p(t) }).collect());
        }
        let mut out = alloc::vec![0.0; ts.len()];
        for positive in [true, false] {
            let mut idx: Vec<usize> = (0..ts.len())
                .filter(|&i| if positive { ts[i] > 0.0 } else { ts[i] < 0.0 })
                .collect();
            idx.sort_by(|&i, &j| ts[i].abs().total_cmp(&ts[j].abs()));
            let mut at = 0.0;
            let mut acc = 0.0;
            for i in idx {
                acc += self.integrate(at, ts[i])?;
                at = ts[i];
                out[i] = acc;
            }
        }
        Ok(out)
    }

    /// `f′(s)`: closed form when present, otherwise finite differences with
    /// step `h = max(1e-6, 1e-6·|s|)`. Within `2h` of a declared kink the
    /// stencil is one-sided, pointing away from the kink. A stencil whose
    /// value keeps growing as the step shrinks by 100× is treated as
    /// divergent.
    pub fn derivative_value(&self, s: f64) -> Result<f64, LargeDerivative> {
        let d = match &self.derivative {
            Some(d) => d(s),
            None => self.finite_difference(s)?,
        };
        if d.is_finite() && d.abs() <= LARGE_DERIVATIVE {
            Ok(d)
        } else {
            Err(LargeDerivative { at: s })
        }
    }

    fn finite_difference(&self, s: f64) -> Result<f64, LargeDerivative> {
        let h = 1e-6f64.max(1e-6 * s.abs());
        let near = self.kinks.iter().find(|&&k| (s - k).abs() < 2.0 * h).copied();
        let stencil = |h: f64| match near {
            Some(k) if s >= k => (self.eval(s + h) - self.eval(s)) / h,
            Some(_) => (self.eval(s) - self.eval(s - h)) / h,
            None => (self.eval(s + h) - self.eval(s - h)) / (2.0 * h),
        };
        let coarse = stencil(h);
        let fine = stencil(h / 100.0);
        if !coarse.is_finite() || !fine.is_finite() {
            return Err(LargeDerivative { at: s });
        }
        if fine.abs() > 100.0 && fine.abs() > 4.0 * coarse.abs() {
            return Err(LargeDerivative { at: s });
        }
        Ok(coarse)
    }
}

/// The vector field `f(u) = (f₁(u₁), …, f_n(u_n))`.
#[derive(Debug, Clone)]
pub struct Nonlinearity {
    components: Vec<ScalarFunction>,
}

impl Nonlinearity {
    pub fn new(components: Vec<ScalarFunction>) -> Result<Self, NonlinError> {
        if components.is_empty() {
            return Err(NonlinError::Empty);
        }
        Ok(Nonlinearity { components })
    }

    /// `n` copies of the same component.
    pub fn uniform(f: ScalarFunction, n: usize) -> Result<Self, NonlinError> {
        Self::new(alloc::vec![f; n])
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> &[ScalarFunction] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &ScalarFunction {
        &self.components[k]
    }

    pub fn eval(&self, u: &[f64]) -> Vec<f64> {
        self.components.iter().zip(u).map(|(f, &x)| f.eval(x)).collect()
    }

    /// `Ψ(u) = Σ_k F_k(u_k)`.
    pub fn psi(&self, u: &[f64]) -> Result<f64, NonlinError> {
        self.components.iter().zip(u).map(|(f, &x)| f.primitive_value(x)).sum()
    }

    /// `Σ_k F_k(t)`.
    pub fn diagonal_primitive(&self, t: f64) -> Result<f64, NonlinError> {
        self.components.iter().map(|f| f.primitive_value(t)).sum()
    }

    pub fn scaled(&self, c: f64) -> Nonlinearity {
        Nonlinearity { components: self.components.iter().map(|f| f.scaled(c)).collect() }
    }

    pub fn all_validated(&self) -> bool {
        self.components.iter().all(ScalarFunction::is_validated)
    }

    /// Sampled check that every `f_k ≥ 0`: the hypothesis probe grid on
    /// both signs plus a uniform grid on `[-10, 10]`.
    pub fn appears_nonnegative(&self) -> bool {
        let grid = log_probe_grid();
        let uniform = (0..=2000).map(|i| -10.0 + 0.01 * i as f64);
        let points: Vec<f64> = grid
            .iter()
            .flat_map(|&s| [s, -s])
            .chain(uniform)
            .chain(core::iter::once(0.0))
            .collect();
        self.components.iter().all(|f| points.iter().all(|&s| f.eval(s) >= 0.0))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn logistic_log() -> ScalarFunction {
        catalog_make("ex42_logistic_log", &CatalogParams::with_n(1)).unwrap().component(0).clone()
    }

    #[test]
    fn closed_form_logistic_log_at_one() {
        let f = logistic_log();
        let expect = 2f64.ln() - 2.0 + 2.0 * 1f64.atan();
        assert!((f.primitive_value(1.0).unwrap() - expect).abs() < 1e-15);
        assert!((expect - 0.263_943_507_354_842_5).abs() < 1e-15);
        let quad = f.integrate(0.0, 1.0).unwrap();
        assert!((quad - expect).abs() < 1e-10);
    }

    #[test]
    fn zero_upper_limit() {
        let f = ScalarFunction::new("exp", f64::exp);
        assert_eq!(f.primitive_value(0.0).unwrap(), 0.0);
    }

    #[test]
    fn derivative_closed_and_fd() {
        let rational = catalog_make("rational_sq", &CatalogParams::with_n(1)).unwrap();
        let d = rational.component(0).derivative_value(2.0).unwrap();
        assert!((d - 0.16).abs() < 1e-15);
        let linear = ScalarFunction::new("s", |s| s);
        for s in [-3.0, 0.0, 1e3, 7.5] {
            assert!((linear.derivative_value(s).unwrap() - 1.0).abs() < 1e-8);
        }
        let fd = ScalarFunction::new("s^2/(1+s^2)", |s| s * s / (1.0 + s * s));
        assert!((fd.derivative_value(2.0).unwrap() - 0.16).abs() < 1e-8);
    }

    #[test]
    fn sqrt_kink_is_large_derivative() {
        let ex37 = catalog_make("ex37_sqrt", &CatalogParams::with_n(2)).unwrap();
        assert!(ex37.component(0).derivative_value(2.0).is_err());
        assert_eq!(ex37.component(0).derivative_value(1.0), Ok(0.0));
        let bare = ScalarFunction::new("g1", |s: f64| if s >= 2.0 { (s - 2.0).sqrt() } else { 0.0 });
        assert!(bare.derivative_value(2.0).is_err());
        let kinked = bare.clone().with_kinks(vec![2.0]);
        assert!(kinked.derivative_value(2.0).is_err());
        assert!((kinked.derivative_value(6.0).unwrap() - 0.25).abs() < 1e-6);
        assert_eq!(kinked.derivative_value(1.9999999).unwrap(), 0.0);
    }

    #[test]
    fn primitive_values_chain_matches_direct() {
        let f = ScalarFunction::new("cos", f64::cos);
        let ts = [3.0, -1.0, 0.5, 0.0, -2.5, 1.0];
        let chained = f.primitive_values(&ts).unwrap();
        for (t, v) in ts.iter().zip(&chained) {
            assert!((v - t.sin()).abs() < 1e-9, "{t}: {v}");
        }
    }

    #[test]
    fn nonlinearity_basics() {
        assert!(matches!(Nonlinearity::new(vec![]), Err(NonlinError::Empty)));
        let nl = catalog_make("rational_sq", &CatalogParams::with_n(3)).unwrap();
        assert_eq!(nl.len(), 3);
        assert!(nl.appears_nonnegative());
        let psi = nl.psi(&[1.0, 0.0, -1.0]).unwrap();
        let one = 1.0 - 1f64.atan();
        assert!((psi - (one - one)).abs() < 1e-15);
        let neg = nl.scaled(-1.0);
        assert!(!neg.appears_nonnegative());
        assert!((neg.diagonal_primitive(2.0).unwrap() + 3.0 * (2.0 - 2f64.atan())).abs() < 1e-14);
    }
}
