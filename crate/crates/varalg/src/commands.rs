//! Subcommand runners. Each returns the rendered output; `main` only
//! writes it out and maps errors to exit codes.

use std::fmt::Write as _;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use thiserror::Error;
use varalg_core::oracle::{grid_critical_points, GridSpec, OracleError};
use varalg_core::solver::{
    a_priori_radius, critical_set, find_two_solutions, lambda_sweep, make_critical_point, CriticalPoint,
    EnergyModel, SolverConfig, SolverError,
};
use varalg_core::thresholds::{analyze, three_solution_report, AnalyzeOptions, RhoSearch, ThresholdError};
use varalg_core::Problem;

use crate::problem_file::{load_problem, InputError};
use crate::report::{
    sweep_csv, AnalyzeReport, PointDto, ProblemSummary, Real, SolveReport, SweepReport, ThreeReport,
};

#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Input(#[from] InputError),
    #[error("invalid argument: {0}")]
    Usage(String),
    /// The report is still rendered; only the exit code changes.
    #[error("infeasible thresholds: {message}")]
    Infeasible { message: String, output: String },
    #[error("no nontrivial solutions: {message}")]
    NoSolutions { message: String, output: String },
    #[error("{failed} verification check(s) failed")]
    VerifyFailed { failed: usize, output: String },
    #[error("oracle: {0}")]
    Oracle(#[from] OracleError),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CommandError {
    /// 0 success, 1 input error, 2 infeasible thresholds, 3 no nontrivial
    /// solutions, 4 failed verification.
    pub fn exit_code(&self) -> u8 {
        match self {
            CommandError::Input(_) | CommandError::Usage(_) | CommandError::Output(_) | CommandError::Oracle(_) => 1,
            CommandError::Infeasible { .. } => 2,
            CommandError::NoSolutions { .. } => 3,
            CommandError::VerifyFailed { .. } => 4,
        }
    }

    /// Report text produced before the failure, if any.
    pub fn output(&self) -> Option<&str> {
        match self {
            CommandError::Infeasible { output, .. }
            | CommandError::NoSolutions { output, .. }
            | CommandError::VerifyFailed { output, .. } => Some(output),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Table,
}

/// `lo:hi:count`, geometric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaRange {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl LambdaRange {
    pub fn values(&self) -> Vec<f64> {
        match self.count {
            0 => Vec::new(),
            1 => vec![self.lo],
            m => {
                // powi of the common ratio keeps doubling ranges exact.
                let ratio = (self.hi / self.lo).powf(1.0 / (m - 1) as f64);
                (0..m).map(|i| if i == m - 1 { self.hi } else { self.lo * ratio.powi(i as i32) }).collect()
            }
        }
    }
}

impl FromStr for LambdaRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, count] = parts[..] else {
            return Err(format!("expected lo:hi:count, got {s:?}"));
        };
        let lo: f64 = lo.parse().map_err(|e| format!("lo: {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("hi: {e}"))?;
        let count: usize = count.parse().map_err(|e| format!("count: {e}"))?;
        if !(lo > 0.0 && hi >= lo && hi.is_finite()) {
            return Err(format!("need 0 < lo <= hi < inf, got {lo}:{hi}"));
        }
        Ok(LambdaRange { lo, hi, count })
    }
}

/// `lo:hi` magnitudes for the `ρ` search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TRange(pub f64, pub f64);

impl FromStr for TRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let (lo, hi) = s.split_once(':').ok_or_else(|| format!("expected lo:hi, got {s:?}"))?;
        let lo: f64 = lo.parse().map_err(|e| format!("lo: {e}"))?;
        let hi: f64 = hi.parse().map_err(|e| format!("hi: {e}"))?;
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(format!("need 0 < lo < hi < inf, got {lo}:{hi}"));
        }
        Ok(TRange(lo, hi))
    }
}

#[derive(Debug, Parser)]
#[command(name = "varalg", version, about = "Thresholds and multiple solutions of Au = λf(u)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum, hypothesis probes, λ*, ā and the three-solution window.
    Analyze(AnalyzeArgs),
    /// Minimizer and mountain-pass solution at one λ.
    Solve(SolveArgs),
    /// Two-solution search over a geometric λ range.
    Sweep(SweepArgs),
    /// Grid-search critical points; same JSON shape as `solve`.
    Oracle(SolveArgs),
    /// Runs the built-in check suite and prints PASS/FAIL per check.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    #[arg(long)]
    pub problem: PathBuf,
    /// Defaults to csv for `sweep` and json otherwise.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct WindowArgs {
    #[arg(long, requires = "delta")]
    pub gamma: Option<f64>,
    #[arg(long, requires = "gamma")]
    pub delta: Option<f64>,
    #[arg(long, default_value_t = 2.0)]
    pub h: f64,
}

impl WindowArgs {
    fn triple(&self) -> Option<(f64, f64, f64)> {
        Some((self.gamma?, self.delta?, self.h))
    }
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[command(flatten)]
    pub common: Common,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Also compute ā for this ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long)]
    pub t_range: Option<TRange>,
    #[arg(long)]
    pub grid_per_decade: Option<usize>,
    /// Relative tolerance of the ρ refinement.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = SolverConfig::default().multistart.seed)]
    pub seed: u64,
    #[arg(long)]
    pub tol_residual: Option<f64>,
}

impl SolverArgs {
    pub fn config(&self) -> SolverConfig {
        let mut cfg = SolverConfig::default();
        cfg.multistart.seed = self.seed;
        if let Some(t) = self.tol_residual {
            cfg.residual_tol = t;
        }
        cfg
    }
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: f64,
    #[command(flatten)]
    pub window: WindowArgs,
    /// Look for three critical points inside the (γ, δ) window.
    #[arg(long, requires = "gamma")]
    pub three: bool,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub lambdas: LambdaRange,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub out: Option<PathBuf>,
}

impl Command {
    pub fn out(&self) -> Option<&PathBuf> {
        match self {
            Command::Analyze(a) => a.common.out.as_ref(),
            Command::Solve(a) | Command::Oracle(a) => a.common.out.as_ref(),
            Command::Sweep(a) => a.common.out.as_ref(),
            Command::Verify(a) => a.out.as_ref(),
        }
    }
}

pub fn run(cmd: &Command) -> Result<String, CommandError> {
    match cmd {
        Command::Analyze(a) => run_analyze(a),
        Command::Solve(a) => run_solve(a),
        Command::Sweep(a) => run_sweep(a),
        Command::Oracle(a) => run_oracle(a),
        Command::Verify(_) => crate::verify::run_verify(),
    }
}

fn to_json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}

fn no_csv(what: &str) -> CommandError {
    CommandError::Usage(format!("{what} has no CSV form; use json or table"))
}

fn load(common: &Common) -> Result<(ProblemSummary, Problem), CommandError> {
    let (file, problem) = load_problem(&common.problem)?;
    let summary = ProblemSummary::new(&file.display_name(&common.problem), &problem);
    Ok((summary, problem))
}

pub fn run_analyze(args: &AnalyzeArgs) -> Result<String, CommandError> {
    let (summary, problem) = load(&args.common)?;
    let mut search = RhoSearch::default();
    if let Some(TRange(lo, hi)) = args.t_range {
        search.t_min = lo;
        search.t_max = hi;
    }
    if let Some(k) = args.grid_per_decade {
        search.per_decade = k;
    }
    if let Some(t) = args.tol {
        search.rel_tol = t;
    }
    let opts = AnalyzeOptions { search, epsilon: args.epsilon, window: args.window.triple() };
    let report = analyze(&problem, &opts);
    let window = match &report.three_solutions {
        Some(Ok(w)) => Some(w),
        _ => None,
    };
    let dto = AnalyzeReport::new(summary, &problem, &report, window);
    let output = match args.common.format.unwrap_or(Format::Json) {
        Format::Json => to_json(&dto),
        Format::Table => analyze_table(&dto),
        Format::Csv => return Err(no_csv("analyze")),
    };
    if dto.errors.is_empty() {
        Ok(output)
    } else {
        Err(CommandError::Infeasible { message: dto.errors.join("; "), output })
    }
}

fn opt(x: Option<Real>) -> String {
    x.map_or_else(|| "-".to_string(), |r| r.to_string())
}

fn analyze_table(r: &AnalyzeReport) -> String {
    let mut s = String::new();
    let mut row = |k: &str, v: String| writeln!(s, "{k:<22} {v}").expect("writing to a String");
    row("problem", format!("{} (n = {}, {})", r.problem.name, r.problem.dim, r.problem.origin));
    row("lambda_1", r.spectrum.lambda1.to_string());
    row("lambda_n", r.spectrum.lambda_n.to_string());
    row("ones_form", r.spectrum.ones_form.to_string());
    row("sign conditions", format!("a1={} a2={}", r.spectrum.sign_conditions.a1, r.spectrum.sign_conditions.a2));
    let h = &r.hypotheses;
    row(
        "hypotheses",
        format!(
            "h1={} h1*={} (q={}) h2={} h2'={} g3={}",
            h.h1.verdict, h.h1_star.verdict, h.h1_star.q, h.h2.verdict, h.h2_prime.verdict, h.g3.verdict
        ),
    );
    if let Some(rho) = &r.rho {
        row("t_star", rho.t_star.to_string());
        row("rho_max", format!("{}{}", rho.rho_max, if rho.range_suspect { " (range suspect)" } else { "" }));
    }
    row("lambda_star", opt(r.lambda_star));
    if let Some(a) = &r.abar {
        row("abar", format!("{} (epsilon {})", a.abar, a.epsilon));
    }
    if let Some(w) = &r.three_solutions {
        row("window g1/g2", format!("{}/{}", w.g1, w.g2));
        row("lambda1_star", opt(w.lambda1_star));
        row("lambda2_star", opt(w.lambda2_star));
        row("lambda3h_star", opt(w.lambda3h_star));
    }
    for e in &r.errors {
        row("error", e.clone());
    }
    s
}

fn solve_output(report: &SolveReport, format: Format) -> Result<String, CommandError> {
    match format {
        Format::Json => Ok(to_json(report)),
        Format::Table => Ok(solve_table(report)),
        Format::Csv => Err(no_csv(report.method)),
    }
}

fn solve_table(r: &SolveReport) -> String {
    let mut s = String::new();
    writeln!(s, "{} {} at lambda = {} (lambda_star {})", r.method, r.problem.name, r.lambda, opt(r.lambda_star))
        .expect("writing to a String");
    writeln!(s, "{:<14} {:>14} {:>12} {:>10}  u", "class", "energy", "residual", "norm").expect("writing to a String");
    for p in &r.solutions {
        let u: Vec<String> = p.u.iter().map(|x| format!("{:.10}", x.0)).collect();
        writeln!(s, "{:<14} {:>14.8e} {:>12.3e} {:>10.6}  [{}]", p.classification, p.energy.0, p.residual.0, p.norm.0, u.join(", "))
            .expect("writing to a String");
    }
    if let Some(t) = &r.three {
        writeln!(s, "three: in_window={} points={} nontrivial={} found={}", t.lambda_in_window, t.critical_points, t.nontrivial, t.found_three)
            .expect("writing to a String");
    }
    if let Some(e) = &r.error {
        writeln!(s, "error: {e}").expect("writing to a String");
    }
    s
}

fn lambda_star_of(problem: &Problem) -> Option<f64> {
    varalg_core::thresholds::lambda_star(problem, &RhoSearch::default()).ok()
}

fn check_lambda(lambda: f64) -> Result<(), CommandError> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(CommandError::Usage(format!("--lambda must be positive and finite, got {lambda}")))
    }
}

fn three_report(
    problem: &Problem,
    lambda: f64,
    (gamma, delta, h): (f64, f64, f64),
    cfg: &SolverConfig,
) -> Result<Result<ThreeReport, SolverError>, ThresholdError> {
    let window = three_solution_report(problem, gamma, delta, h)?;
    let in_window = window.interval().is_some_and(|(lo, hi)| lo < lambda && lambda < hi);
    Ok(critical_set(problem, lambda, cfg).map(|points| {
        let nontrivial = points.iter().filter(|c| c.nontrivial).count();
        ThreeReport {
            window: (&window).into(),
            lambda_in_window: in_window,
            critical_points: points.len(),
            nontrivial,
            found_three: points.len() >= 3 && nontrivial >= 2,
        }
    }))
}

pub fn run_solve(args: &SolveArgs) -> Result<String, CommandError> {
    check_lambda(args.lambda)?;
    let (summary, problem) = load(&args.common)?;
    let cfg = args.solver.config();
    let mut report = SolveReport {
        problem: summary,
        method: "solve",
        lambda: Real(args.lambda),
        lambda_star: lambda_star_of(&problem).map(Real),
        solutions: Vec::new(),
        checks: None,
        three: None,
        error: None,
    };
    let mut failure = None;
    match find_two_solutions(&problem, args.lambda, &cfg) {
        Ok(two) => {
            report.solutions = vec![PointDto::from(&two.u1), PointDto::from(&two.u2)];
            report.checks = Some((&two).into());
        }
        Err(SolverError::InvalidLambda(l)) => return Err(CommandError::Usage(format!("invalid lambda {l}"))),
        Err(e) => failure = Some(e.to_string()),
    }
    if args.three {
        let triple = args.window.triple().expect("clap requires gamma and delta with --three");
        match three_report(&problem, args.lambda, triple, &cfg) {
            Ok(Ok(t)) => report.three = Some(t),
            Ok(Err(e)) => failure = failure.or(Some(format!("three-solution search: {e}"))),
            Err(e) => {
                report.error = Some(e.to_string());
                let output = solve_output(&report, args.common.format.unwrap_or(Format::Json))?;
                return Err(CommandError::Infeasible { message: e.to_string(), output });
            }
        }
    }
    report.error = failure.clone();
    let output = solve_output(&report, args.common.format.unwrap_or(Format::Json))?;
    match failure {
        None => Ok(output),
        Some(message) => Err(CommandError::NoSolutions { message, output }),
    }
}

/// Grid radius for the oracle: the a-priori ball when it exists, else
/// `4√n·max(|t*|, 1)`.
pub fn oracle_radius(problem: &Problem, lambda: f64) -> f64 {
    a_priori_radius(problem, lambda).unwrap_or_else(|| {
        let t = varalg_core::thresholds::max_rho(problem, &RhoSearch::default()).map_or(1.0, |r| r.t_star.abs());
        4.0 * (problem.dim() as f64).sqrt() * t.max(1.0)
    })
}

pub fn oracle_points(problem: &Problem, lambda: f64, cfg: &SolverConfig) -> Result<Vec<CriticalPoint>, CommandError> {
    let grid = GridSpec::finest(problem.dim(), oracle_radius(problem, lambda));
    let roots = grid_critical_points(problem, lambda, grid)?;
    let model = EnergyModel::new(problem, lambda);
    let mut points: Vec<CriticalPoint> = roots
        .into_iter()
        // Oracle roots are accepted at the grid tolerance, not the solver's.
        .map(|u| make_critical_point(&model, u, &SolverConfig { residual_tol: f64::INFINITY, ..*cfg }))
        .collect::<Result<_, _>>()
        .map_err(|e| CommandError::Output(format!("classifying oracle roots: {e}")))?;
    points.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(points)
}

pub fn run_oracle(args: &SolveArgs) -> Result<String, CommandError> {
    check_lambda(args.lambda)?;
    let (summary, problem) = load(&args.common)?;
    let cfg = args.solver.config();
    let points = oracle_points(&problem, args.lambda, &cfg)?;
    let report = SolveReport {
        problem: summary,
        method: "oracle",
        lambda: Real(args.lambda),
        lambda_star: lambda_star_of(&problem).map(Real),
        solutions: points.iter().map(PointDto::from).collect(),
        checks: None,
        three: None,
        error: None,
    };
    let output = solve_output(&report, args.common.format.unwrap_or(Format::Json))?;
    if points.iter().any(|c| c.nontrivial) {
        Ok(output)
    } else {
        Err(CommandError::NoSolutions { message: "the grid holds only the trivial root".to_string(), output })
    }
}

pub fn run_sweep(args: &SweepArgs) -> Result<String, CommandError> {
    let (summary, problem) = load(&args.common)?;
    let result = lambda_sweep(&problem, &args.lambdas.values(), true, &args.solver.config());
    let report = SweepReport::new(summary, &result);
    match args.common.format.unwrap_or(Format::Csv) {
        Format::Csv => sweep_csv(&report).map_err(|e| CommandError::Output(e.to_string())),
        Format::Json => Ok(to_json(&report)),
        Format::Table => {
            let csv = sweep_csv(&report).map_err(|e| CommandError::Output(e.to_string()))?;
            Ok(csv.replace(',', "\t"))
        }
    }
}
