//! JSON problem files.
//!
//! ```json
//! {
//!   "name": "ex42",
//!   "matrix": { "kind": "lattice", "rectangle": [2, 2] },
//!   "nonlinearity": { "kind": "ex42_logistic_log" }
//! }
//! ```
//!
//! Matrix kinds: `tridiagonal` (`n`, `a`, `b`), `fourth_order` (`n`),
//! `lattice` (`points` as `[[i, j], …]` or `rectangle` as `[m1, m2]`) and
//! `dense` (`rows`). The nonlinearity is a catalog entry with `params`, or
//! `"kind": "expr"` with either `expr` (shared by all components) or
//! `per_component`. `n` defaults to the matrix dimension.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;
use varalg_core::linalg::{tridiagonal_rows, SpdMatrix};
use varalg_core::nonlin::{catalog_make, CatalogParams, NonlinError, ParamValue};
use varalg_core::problems::{
    build_fourth_order, build_lattice, build_tridiagonal, fourth_order_rows, lattice_rows, rectangle_net, Net,
};
use varalg_core::{Problem, ProblemError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}:{column}: {message}")]
    Json { path: PathBuf, line: usize, column: usize, message: String },
    #[error("invalid matrix: {0}")]
    Matrix(String),
    #[error("invalid nonlinearity: {0}")]
    Nonlinearity(#[from] NonlinError),
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub name: Option<String>,
    pub matrix: MatrixSpec,
    pub nonlinearity: NonlinearitySpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum MatrixSpec {
    Tridiagonal { n: usize, a: f64, b: f64 },
    FourthOrder { n: usize },
    Lattice {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        points: Option<Vec<[i64; 2]>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rectangle: Option<[usize; 2]>,
    },
    Dense { rows: Vec<Vec<f64>> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NonlinearitySpec {
    pub kind: String,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub params: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub expr: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub per_component: Option<Vec<String>>,
}

impl MatrixSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            MatrixSpec::Tridiagonal { .. } => "tridiagonal",
            MatrixSpec::FourthOrder { .. } => "fourth_order",
            MatrixSpec::Lattice { .. } => "lattice",
            MatrixSpec::Dense { .. } => "dense",
        }
    }

    fn net(&self) -> Result<Option<Net>, InputError> {
        let MatrixSpec::Lattice { points, rectangle } = self else { return Ok(None) };
        let net = match (points, rectangle) {
            (Some(p), None) => Net::new(p.iter().map(|&[i, j]| (i, j)))?,
            (None, Some([m1, m2])) => rectangle_net(*m1, *m2)?,
            _ => return Err(InputError::Matrix("lattice needs exactly one of `points` and `rectangle`".into())),
        };
        Ok(Some(net))
    }

    /// Dimension without building the matrix.
    pub fn dim(&self) -> Result<usize, InputError> {
        Ok(match self {
            MatrixSpec::Tridiagonal { n, .. } | MatrixSpec::FourthOrder { n } => *n,
            MatrixSpec::Lattice { .. } => self.net()?.map_or(0, |net| net.len()),
            MatrixSpec::Dense { rows } => rows.len(),
        })
    }

    /// The matrix rows as they will be assembled.
    pub fn rows(&self) -> Result<Vec<Vec<f64>>, InputError> {
        Ok(match self {
            MatrixSpec::Tridiagonal { n, a, b } => tridiagonal_rows(*n, *a, *b),
            MatrixSpec::FourthOrder { n } => fourth_order_rows(*n),
            MatrixSpec::Lattice { .. } => lattice_rows(&self.net()?.expect("lattice")),
            MatrixSpec::Dense { rows } => rows.clone(),
        })
    }
}

impl NonlinearitySpec {
    fn catalog_params(&self, n: usize) -> Result<(String, CatalogParams), InputError> {
        let mut params = CatalogParams::new();
        for (key, value) in &self.params {
            let v = match value {
                Value::Number(x) => ParamValue::Number(x.as_f64().unwrap_or(f64::NAN)),
                Value::Bool(b) => ParamValue::Number(if *b { 1.0 } else { 0.0 }),
                Value::String(s) => ParamValue::Text(s.clone()),
                Value::Array(items) => ParamValue::List(
                    items
                        .iter()
                        .map(|i| i.as_str().map(str::to_owned))
                        .collect::<Option<Vec<_>>>()
                        .ok_or_else(|| InputError::Invalid(format!("param `{key}` must be a list of strings")))?,
                ),
                _ => return Err(InputError::Invalid(format!("param `{key}` has an unsupported type"))),
            };
            params.0.insert(key.clone(), v);
        }
        if !params.0.contains_key("n") {
            params = params.number("n", n as f64);
        }
        if let Some(e) = &self.expr {
            params = params.text("expr", e);
        }
        if let Some(list) = &self.per_component {
            params = params.list("per_component", list.clone());
        }
        let name = if self.kind == "expr" { "custom_expr".to_string() } else { self.kind.clone() };
        Ok((name, params))
    }
}

impl ProblemFile {
    pub fn from_json(text: &str, path: &Path) -> Result<ProblemFile, InputError> {
        serde_json::from_str(text).map_err(|e| InputError::Json {
            path: path.to_path_buf(),
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<ProblemFile, InputError> {
        let text = fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_path_buf(), source })?;
        Self::from_json(&text, path)
    }

    pub fn build(&self) -> Result<Problem, InputError> {
        let n = self.matrix.dim()?;
        let (name, params) = self.nonlinearity.catalog_params(n)?;
        let nl = catalog_make(&name, &params)?;
        let problem = match &self.matrix {
            MatrixSpec::Tridiagonal { n, a, b } => build_tridiagonal(*n, *a, *b, nl)?,
            MatrixSpec::FourthOrder { n } => build_fourth_order(*n, nl)?,
            MatrixSpec::Lattice { .. } => build_lattice(&self.matrix.net()?.expect("lattice"), nl)?,
            MatrixSpec::Dense { rows } => {
                let m = SpdMatrix::new(rows).map_err(|e| InputError::Matrix(e.to_string()))?;
                Problem::new(m, nl)?
            }
        };
        Ok(problem)
    }

    pub fn display_name(&self, path: &Path) -> String {
        self.name.clone().unwrap_or_else(|| {
            path.file_stem().map_or_else(|| "problem".to_string(), |s| s.to_string_lossy().into_owned())
        })
    }
}

/// Reads and assembles a problem file.
pub fn load_problem(path: &Path) -> Result<(ProblemFile, Problem), InputError> {
    let file = ProblemFile::load(path)?;
    let problem = file.build()?;
    Ok((file, problem))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse(text: &str) -> Result<Problem, InputError> {
        ProblemFile::from_json(text, Path::new("inline.json"))?.build()
    }

    #[test]
    fn lattice_rectangle_and_points_agree() {
        let a = parse(r#"{"matrix":{"kind":"lattice","rectangle":[2,2]},"nonlinearity":{"kind":"ex42_logistic_log"}}"#)
            .unwrap();
        let b = parse(
            r#"{"matrix":{"kind":"lattice","points":[[2,2],[1,1],[2,1],[1,2]]},
                "nonlinearity":{"kind":"ex42_logistic_log"}}"#,
        )
        .unwrap();
        assert_eq!(a.matrix().entries(), b.matrix().entries());
        assert_eq!(a.dim(), 4);
    }

    #[test]
    fn expression_components() {
        let p = parse(
            r#"{"matrix":{"kind":"dense","rows":[[2,0],[0,3]]},
                "nonlinearity":{"kind":"expr","per_component":["s/(1+s^2)","atan(s)"]}}"#,
        )
        .unwrap();
        assert!((p.nonlinearity().component(1).eval(1.0) - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
        let q = parse(r#"{"matrix":{"kind":"fourth_order","n":3},"nonlinearity":{"kind":"expr","expr":"s^2"}}"#)
            .unwrap();
        assert_eq!(q.nonlinearity().len(), 3);
    }

    #[test]
    fn errors_carry_positions() {
        let err = ProblemFile::from_json("{\n  \"matrix\": 3,\n}", Path::new("bad.json")).unwrap_err();
        let InputError::Json { line, .. } = err else { panic!("{err}") };
        assert_eq!(line, 2);
        assert!(matches!(
            parse(r#"{"matrix":{"kind":"dense","rows":[[1,2],[2,1]]},"nonlinearity":{"kind":"rational_sq"}}"#),
            Err(InputError::Matrix(_))
        ));
        assert!(matches!(
            parse(r#"{"matrix":{"kind":"fourth_order","n":2},"nonlinearity":{"kind":"nope"}}"#),
            Err(InputError::Nonlinearity(NonlinError::UnknownCatalogName(_)))
        ));
    }
}
