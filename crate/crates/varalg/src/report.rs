//! Serializable reports. Non-finite numbers are written as the strings
//! `"inf"`, `"-inf"` and `"nan"` so every output stays valid JSON.

use serde::{Serialize, Serializer};
use varalg_core::linalg::SignConditionVerdict;
use varalg_core::nonlin::{HypothesisVerdict, LimitProbe};
use varalg_core::problems::Origin;
use varalg_core::solver::{CriticalPoint, SweepResult, TwoSolutions};
use varalg_core::thresholds::{Abar, ThreeSolutionWindow, ThresholdReport};
use varalg_core::Problem;

/// `f64` that serializes `±∞` and NaN as strings.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let x = self.0;
        if x.is_finite() {
            s.serialize_f64(x)
        } else if x.is_nan() {
            s.serialize_str("nan")
        } else if x > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }
}

impl std::fmt::Display for Real {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.0.is_infinite() {
            f.write_str(if self.0 > 0.0 { "inf" } else { "-inf" })
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn reals(xs: &[f64]) -> Vec<Real> {
    xs.iter().copied().map(Real).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ProblemSummary {
    pub name: String,
    pub dim: usize,
    pub origin: String,
    pub nonlinearity: Vec<String>,
    pub labels: Vec<String>,
}

impl ProblemSummary {
    pub fn new(name: &str, problem: &Problem) -> Self {
        let origin = match problem.origin() {
            Origin::Generic => "dense".to_string(),
            Origin::SecondOrder { n, a, b } => format!("tridiagonal(n={n}, a={a}, b={b})"),
            Origin::FourthOrder { n } => format!("fourth_order(n={n})"),
            Origin::Lattice(net) => format!("lattice({} points)", net.len()),
        };
        ProblemSummary {
            name: name.to_string(),
            dim: problem.dim(),
            origin,
            nonlinearity: problem.nonlinearity().components().iter().map(|f| f.label().to_string()).collect(),
            labels: problem.labels().to_vec(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SignConditions {
    pub a1: bool,
    pub a2: bool,
}

impl From<&SignConditionVerdict> for SignConditions {
    fn from(v: &SignConditionVerdict) -> Self {
        SignConditions { a1: v.a1_holds, a2: v.a2_holds }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Spectrum {
    pub lambda1: Real,
    pub lambda_n: Real,
    pub ones_form: Real,
    pub sign_conditions: SignConditions,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitDto {
    pub verdict: &'static str,
    pub band_max: Real,
    pub decay: Option<Real>,
}

impl From<&LimitProbe> for LimitDto {
    fn from(p: &LimitProbe) -> Self {
        LimitDto { verdict: p.verdict.as_str(), band_max: Real(p.band_max), decay: p.decay.map(Real) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Hypotheses {
    pub h1: LimitDto,
    pub h1_star: PowerFitDto,
    pub h2: H2Dto,
    pub h2_prime: LimitDto,
    pub g3: G3Dto,
}

#[derive(Debug, Clone, Serialize)]
pub struct PowerFitDto {
    pub verdict: &'static str,
    pub q: Real,
    pub c: Real,
}

#[derive(Debug, Clone, Serialize)]
pub struct H2Dto {
    pub verdict: &'static str,
    pub nu0: Option<Real>,
}

#[derive(Debug, Clone, Serialize)]
pub struct G3Dto {
    pub verdict: &'static str,
    pub estimate: Real,
    pub bound: Real,
}

impl From<&HypothesisVerdict> for Hypotheses {
    fn from(v: &HypothesisVerdict) -> Self {
        Hypotheses {
            h1: (&v.h1).into(),
            h1_star: PowerFitDto { verdict: v.h1_star.verdict.as_str(), q: Real(v.h1_star.q), c: Real(v.h1_star.c) },
            h2: H2Dto { verdict: v.h2.verdict.as_str(), nu0: v.h2.nu0.map(Real) },
            h2_prime: (&v.h2_prime).into(),
            g3: G3Dto { verdict: v.g3.verdict.as_str(), estimate: Real(v.g3.estimate), bound: Real(v.g3.bound) },
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RhoDto {
    pub t_star: Real,
    pub rho_max: Real,
    pub range_suspect: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct AbarDto {
    pub abar: Real,
    pub epsilon: Real,
    pub varrho: Real,
    pub ratio: Real,
}

impl From<&Abar> for AbarDto {
    fn from(a: &Abar) -> Self {
        AbarDto { abar: Real(a.abar), epsilon: Real(a.epsilon), varrho: Real(a.varrho), ratio: Real(a.ratio) }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowDto {
    pub gamma: Real,
    pub delta: Real,
    pub h: Real,
    pub r: Real,
    pub phi_star: Real,
    pub eta: Real,
    pub s_gamma: Real,
    pub s_delta: Real,
    pub g1: bool,
    pub g2: bool,
    pub lambda1_star: Option<Real>,
    pub lambda2_star: Option<Real>,
    pub lambda3h_star: Option<Real>,
}

impl From<&ThreeSolutionWindow> for WindowDto {
    fn from(w: &ThreeSolutionWindow) -> Self {
        WindowDto {
            gamma: Real(w.gamma),
            delta: Real(w.delta),
            h: Real(w.h),
            r: Real(w.r),
            phi_star: Real(w.phi_star),
            eta: Real(w.eta),
            s_gamma: Real(w.s_gamma),
            s_delta: Real(w.s_delta),
            g1: w.g1_holds,
            g2: w.g2_holds,
            lambda1_star: w.lambda1_star.map(Real),
            lambda2_star: w.lambda2_star.map(Real),
            lambda3h_star: w.lambda3h_star.map(Real),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct AnalyzeReport {
    pub problem: ProblemSummary,
    pub spectrum: Spectrum,
    pub hypotheses: Hypotheses,
    pub rho: Option<RhoDto>,
    pub lambda_star: Option<Real>,
    pub abar: Option<AbarDto>,
    pub three_solutions: Option<WindowDto>,
    /// Threshold failures, in the order rho, ā, three-solution window.
    pub errors: Vec<String>,
}

impl AnalyzeReport {
    pub fn new(summary: ProblemSummary, problem: &Problem, r: &ThresholdReport, window: Option<&ThreeSolutionWindow>) -> Self {
        let mut errors = Vec::new();
        let rho = match &r.rho {
            Ok(x) => Some(RhoDto { t_star: Real(x.t_star), rho_max: Real(x.rho_max), range_suspect: x.range_suspect }),
            Err(e) => {
                errors.push(format!("rho: {e}"));
                None
            }
        };
        let abar = match &r.abar {
            Some(Ok(a)) => Some(a.into()),
            Some(Err(e)) => {
                errors.push(format!("abar: {e}"));
                None
            }
            None => None,
        };
        if let Some(Err(e)) = &r.three_solutions {
            errors.push(format!("three_solutions: {e}"));
        }
        AnalyzeReport {
            problem: summary,
            spectrum: Spectrum {
                lambda1: Real(r.lambda1),
                lambda_n: Real(r.lambda_n),
                ones_form: Real(r.ones_form),
                sign_conditions: (&problem.matrix().check_sign_conditions()).into(),
            },
            hypotheses: (&r.hypotheses).into(),
            rho,
            lambda_star: r.lambda_star.map(Real),
            abar,
            three_solutions: window.map(Into::into),
            errors,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PointDto {
    pub u: Vec<Real>,
    pub norm: Real,
    pub residual: Real,
    pub energy: Real,
    pub classification: &'static str,
    pub morse_index: Option<usize>,
    pub hessian_spectrum: Option<Vec<Real>>,
    pub nontrivial: bool,
    pub strictly_positive: bool,
}

impl From<&CriticalPoint> for PointDto {
    fn from(c: &CriticalPoint) -> Self {
        PointDto {
            u: reals(&c.u),
            norm: Real(c.norm()),
            residual: Real(c.residual),
            energy: Real(c.energy),
            classification: c.classification.as_str(),
            morse_index: c.classification.morse_index(),
            hessian_spectrum: c.hessian_spectrum.as_deref().map(reals),
            nontrivial: c.nontrivial,
            strictly_positive: c.strictly_positive,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveChecks {
    pub energy_order_ok: bool,
    pub below_threshold: bool,
    pub sign_conditions: SignConditions,
    pub f_nonnegative: bool,
    pub positivity_ok: Option<bool>,
}

impl From<&TwoSolutions> for SolveChecks {
    fn from(t: &TwoSolutions) -> Self {
        SolveChecks {
            energy_order_ok: t.energy_order_ok,
            below_threshold: t.below_threshold,
            sign_conditions: (&t.sign_conditions).into(),
            f_nonnegative: t.f_nonnegative,
            positivity_ok: t.positivity_ok,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ThreeReport {
    pub window: WindowDto,
    pub lambda_in_window: bool,
    pub critical_points: usize,
    pub nontrivial: usize,
    pub found_three: bool,
}

/// Shared by `solve` and `oracle` so the two can be diffed.
#[derive(Debug, Clone, Serialize)]
pub struct SolveReport {
    pub problem: ProblemSummary,
    pub method: &'static str,
    pub lambda: Real,
    pub lambda_star: Option<Real>,
    pub solutions: Vec<PointDto>,
    pub checks: Option<SolveChecks>,
    pub three: Option<ThreeReport>,
    pub error: Option<String>,
}

/// One CSV row per `λ`. `slope_fit` stays empty on data rows; the fit is
/// written as a trailing comment line.
#[derive(Debug, Clone, Serialize)]
pub struct SweepRow {
    pub lambda: f64,
    pub min_norm: Option<f64>,
    pub mp_energy: Option<f64>,
    pub n_solutions: usize,
    pub slope_fit: Option<f64>,
    pub status: String,
}

pub const SWEEP_HEADER: [&str; 6] = ["lambda", "min_norm", "mp_energy", "n_solutions", "slope_fit", "status"];

pub fn sweep_rows(result: &SweepResult) -> Vec<SweepRow> {
    result
        .records
        .iter()
        .map(|r| SweepRow {
            lambda: r.lambda,
            min_norm: r.min_norm,
            mp_energy: r.mp_energy,
            n_solutions: r.solutions.len(),
            slope_fit: None,
            status: r.error.as_ref().map_or_else(|| "ok".to_string(), |e| e.to_string()),
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct SlopeDto {
    pub slope: Real,
    pub r_squared: Real,
    pub points: usize,
    pub q: Option<Real>,
    pub upper_bound: Option<Real>,
    pub within_bound: Option<bool>,
    pub nonvanishing: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SweepReport {
    pub problem: ProblemSummary,
    pub rows: Vec<SweepRow>,
    pub slope_fit: Option<SlopeDto>,
}

impl SweepReport {
    pub fn new(problem: ProblemSummary, result: &SweepResult) -> Self {
        SweepReport {
            problem,
            rows: sweep_rows(result),
            slope_fit: result.slope_fit.as_ref().map(|f| SlopeDto {
                slope: Real(f.slope),
                r_squared: Real(f.r_squared),
                points: f.points,
                q: f.q.map(Real),
                upper_bound: f.upper_bound.map(Real),
                within_bound: f.within_bound,
                nonvanishing: f.nonvanishing,
            }),
        }
    }
}

/// Sweep rows as CSV with a trailing `# slope_fit …` comment line.
pub fn sweep_csv(report: &SweepReport) -> Result<String, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    if report.rows.is_empty() {
        w.write_record(SWEEP_HEADER)?;
    }
    for row in &report.rows {
        w.serialize(row)?;
    }
    let mut out = String::from_utf8(w.into_inner().map_err(|e| e.into_error())?).expect("csv output is UTF-8");
    if let Some(f) = &report.slope_fit {
        out.push_str(&format!(
            "# slope_fit slope={} r_squared={} points={} upper_bound={} within_bound={} nonvanishing={}\n",
            f.slope,
            f.r_squared,
            f.points,
            f.upper_bound.map_or("none".to_string(), |b| b.to_string()),
            f.within_bound.map_or("none".to_string(), |b| b.to_string()),
            f.nonvanishing
        ));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_reals_are_strings() {
        let v = serde_json::to_string(&[Real(1.5), Real(f64::INFINITY), Real(f64::NEG_INFINITY), Real(f64::NAN)]).unwrap();
        assert_eq!(v, r#"[1.5,"inf","-inf","nan"]"#);
    }

    #[test]
    fn empty_sweep_is_header_only() {
        let report = SweepReport {
            problem: ProblemSummary { name: "x".into(), dim: 1, origin: "dense".into(), nonlinearity: vec![], labels: vec![] },
            rows: vec![],
            slope_fit: None,
        };
        assert_eq!(sweep_csv(&report).unwrap(), "lambda,min_norm,mp_energy,n_solutions,slope_fit,status\n");
    }
}
