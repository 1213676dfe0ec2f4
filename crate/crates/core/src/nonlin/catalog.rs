//! Named nonlinearity families.
//!
//! | name                | component `f_k(s)`                                   |
//! |---------------------|------------------------------------------------------|
//! | `ex37_sqrt`         | `k·√(s−2)` for `s ≥ 2`, else 0                       |
//! | `ex41_log`          | `−k s²` (s ≤ 0), `k s / log s` (0 < s ≤ eᵏ), `k/e`   |
//! | `ex42_logistic_log` | `log(1+s²)` for `s > 0`, else 0                      |
//! | `power`             | `sign(s)|s|^q` (or `max(s,0)^q` with `positive_part`) |
//! | `rational_sq`       | `s²/(1+s²)`                                          |
//! | `custom_expr`       | parsed from `expr` or `per_component`                |
//!
//! Every family takes `n` (component count) and an optional multiplier
//! `scale`. Component indices `k` are 1-based.

#[allow(unused_imports)] // resolved to inherent methods when std is linked
use num_traits::Float;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::E;

use super::{NonlinError, Nonlinearity, ScalarFunction};
use crate::exprfn;

pub const CATALOG_NAMES: [&str; 6] =
    ["ex37_sqrt", "ex41_log", "ex42_logistic_log", "power", "rational_sq", "custom_expr"];

/// Half-width of the band around `s = 1` where the `ex41_log` middle branch
/// is replaced by linear interpolation.
pub const EX41_GUARD: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum ParamValue {
    Number(f64),
    Text(String),
    List(Vec<String>),
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct CatalogParams(pub BTreeMap<String, ParamValue>);

impl CatalogParams {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_n(n: usize) -> Self {
        Self::new().number("n", n as f64)
    }

    pub fn number(mut self, key: &str, v: f64) -> Self {
        self.0.insert(key.to_string(), ParamValue::Number(v));
        self
    }

    pub fn text(mut self, key: &str, v: &str) -> Self {
        self.0.insert(key.to_string(), ParamValue::Text(v.to_string()));
        self
    }

    pub fn list(mut self, key: &str, v: Vec<String>) -> Self {
        self.0.insert(key.to_string(), ParamValue::List(v));
        self
    }

    fn get_number(&self, key: &str) -> Result<Option<f64>, NonlinError> {
        match self.0.get(key) {
            None => Ok(None),
            Some(ParamValue::Number(v)) if v.is_finite() => Ok(Some(*v)),
            Some(_) => Err(NonlinError::BadParams(format!("`{key}` must be a finite number"))),
        }
    }

    fn dimension(&self) -> Result<Option<usize>, NonlinError> {
        match self.get_number("n")? {
            None => Ok(None),
            Some(v) if v >= 1.0 && v.fract() == 0.0 => Ok(Some(v as usize)),
            Some(v) => Err(NonlinError::BadParams(format!("`n` must be a positive integer, got {v}"))),
        }
    }

    fn require_dimension(&self) -> Result<usize, NonlinError> {
        self.dimension()?.ok_or_else(|| NonlinError::BadParams("missing `n`".to_string()))
    }
}

pub fn catalog_make(name: &str, params: &CatalogParams) -> Result<Nonlinearity, NonlinError> {
    let components = match name {
        "ex37_sqrt" => (1..=params.require_dimension()?).map(ex37_sqrt).collect(),
        "ex41_log" => (1..=params.require_dimension()?).map(ex41_log).collect(),
        "ex42_logistic_log" => vec![logistic_log(); params.require_dimension()?],
        "rational_sq" => vec![rational_sq(); params.require_dimension()?],
        "power" => {
            let n = params.require_dimension()?;
            let q = params
                .get_number("q")?
                .ok_or_else(|| NonlinError::BadParams("`power` needs `q`".to_string()))?;
            if q <= 0.0 {
                return Err(NonlinError::BadParams(format!("`q` must be positive, got {q}")));
            }
            let positive = params.get_number("positive_part")?.unwrap_or(0.0) != 0.0;
            vec![power(q, positive); n]
        }
        "custom_expr" => custom_expr(params)?,
        other => return Err(NonlinError::UnknownCatalogName(other.to_string())),
    };
    let nl = Nonlinearity::new(components)?;
    match params.get_number("scale")? {
        Some(c) if c != 1.0 => Ok(nl.scaled(c)),
        _ => Ok(nl),
    }
}

fn custom_expr(params: &CatalogParams) -> Result<Vec<ScalarFunction>, NonlinError> {
    let compile = |k: usize, src: &str| {
        exprfn::parse(src)
            .map(|ast| exprfn::compile(&ast))
            .map_err(|source| NonlinError::Expr { component: k, source })
    };
    match (params.0.get("expr"), params.0.get("per_component")) {
        (Some(ParamValue::Text(src)), None) => {
            let n = params.require_dimension()?;
            let f = compile(0, src)?;
            Ok(vec![f; n])
        }
        (None, Some(ParamValue::List(srcs))) => {
            if let Some(n) = params.dimension()? {
                if n != srcs.len() {
                    return Err(NonlinError::BadParams(format!(
                        "`n` = {n} but {} expressions given",
                        srcs.len()
                    )));
                }
            }
            srcs.iter().enumerate().map(|(k, s)| compile(k, s)).collect()
        }
        _ => Err(NonlinError::BadParams(
            "`custom_expr` needs exactly one of `expr` (text) or `per_component` (list)".to_string(),
        )),
    }
}

fn ex37_sqrt(k: usize) -> ScalarFunction {
    let c = k as f64;
    ScalarFunction::new(format!("{k}*sqrt(s-2) for s >= 2, else 0"), move |s| {
        if s >= 2.0 {
            c * (s - 2.0).sqrt()
        } else {
            0.0
        }
    })
    .with_primitive(move |t| if t >= 2.0 { 2.0 * c / 3.0 * (t - 2.0).powf(1.5) } else { 0.0 })
    .with_derivative(move |s| {
        if s > 2.0 {
            c / (2.0 * (s - 2.0).sqrt())
        } else if s < 2.0 {
            0.0
        } else {
            f64::INFINITY
        }
    })
    .with_kinks(vec![2.0])
}

fn ex41_log(i: usize) -> ScalarFunction {
    let c = i as f64;
    let top = c.exp();
    let middle = move |u: f64| c * u / u.ln();
    let lo = 1.0 - EX41_GUARD;
    let hi = 1.0 + EX41_GUARD;
    let (f_lo, f_hi) = (middle(lo), middle(hi));
    ScalarFunction::new(format!("ex41 g_{i} (guarded at s = 1)"), move |u| {
        if u <= 0.0 {
            -c * u * u
        } else if u > top {
            c / E
        } else if (lo..=hi).contains(&u) {
            f_lo + (u - lo) * (f_hi - f_lo) / (hi - lo)
        } else {
            middle(u)
        }
    })
    .with_kinks(vec![0.0, lo, hi, top])
    .non_validated()
}

fn logistic_log() -> ScalarFunction {
    ScalarFunction::new("log(1+s^2) for s > 0, else 0", |s| if s > 0.0 { (s * s).ln_1p() } else { 0.0 })
        .with_primitive(|t| {
            if t <= 0.0 {
                0.0
            } else if t < 0.05 {
                // Σ (−1)^{m+1} t^{2m+1} / (m(2m+1)); the closed form cancels badly here.
                let t2 = t * t;
                t * t2 * (1.0 / 3.0 - t2 * (1.0 / 10.0 - t2 * (1.0 / 21.0 - t2 * (1.0 / 36.0 - t2 / 55.0))))
            } else {
                t * (t * t).ln_1p() - 2.0 * t + 2.0 * t.atan()
            }
        })
        .with_derivative(|s| if s > 0.0 { 2.0 * s / (1.0 + s * s) } else { 0.0 })
        .with_kinks(vec![0.0])
}

fn rational_sq() -> ScalarFunction {
    ScalarFunction::new("s^2/(1+s^2)", |s| s * s / (1.0 + s * s))
        .with_primitive(|t| {
            if t.abs() < 1e-3 {
                // t − atan t = t³/3 − t⁵/5 + t⁷/7 − …
                let t2 = t * t;
                t * t2 * (1.0 / 3.0 - t2 * (1.0 / 5.0 - t2 / 7.0))
            } else {
                t - t.atan()
            }
        })
        .with_derivative(|s| {
            let d = 1.0 + s * s;
            2.0 * s / (d * d)
        })
}

fn power(q: f64, positive_part: bool) -> ScalarFunction {
    let label = if positive_part {
        format!("max(s,0)^{q}")
    } else {
        format!("sign(s)|s|^{q}")
    };
    let kinks = if q < 1.0 { vec![0.0] } else { Vec::new() };
    ScalarFunction::new(label, move |s| {
        if positive_part && s <= 0.0 {
            0.0
        } else {
            s.signum() * s.abs().powf(q) * if s == 0.0 { 0.0 } else { 1.0 }
        }
    })
    .with_primitive(move |t| {
        if positive_part && t <= 0.0 {
            0.0
        } else {
            t.abs().powf(q + 1.0) / (q + 1.0)
        }
    })
    .with_derivative(move |s| {
        if positive_part && s < 0.0 {
            0.0
        } else if s == 0.0 {
            if q < 1.0 {
                f64::INFINITY
            } else if q == 1.0 {
                1.0
            } else {
                0.0
            }
        } else {
            q * s.abs().powf(q - 1.0)
        }
    })
    .with_kinks(kinks)
}
