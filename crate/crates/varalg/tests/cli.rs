use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Retrieve, Uri, Validator};
use serde_json::Value;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn problem(name: &str) -> String {
    root().join("problems").join(name).to_string_lossy().into_owned()
}

fn varalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_varalg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 stdout")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

/// Resolves `$ref`s to sibling schema files by their last path segment.
struct SchemaDir;

impl Retrieve for SchemaDir {
    fn retrieve(&self, uri: &Uri<String>) -> Result<Value, Box<dyn std::error::Error + Send + Sync>> {
        let name = uri.path().as_str().rsplit('/').next().unwrap_or_default().to_string();
        let text = std::fs::read_to_string(root().join("schemas").join(name))?;
        Ok(serde_json::from_str(&text)?)
    }
}

fn schema(name: &str) -> Validator {
    let text = std::fs::read_to_string(root().join("schemas").join(name)).expect("schema file");
    let value: Value = serde_json::from_str(&text).expect("schema is JSON");
    jsonschema::options().with_retriever(SchemaDir).build(&value).expect("schema compiles")
}

fn assert_valid(validator: &Validator, doc: &Value) {
    let errors: Vec<String> = validator.iter_errors(doc).map(|e| format!("{} at {}", e, e.instance_path())).collect();
    assert!(errors.is_empty(), "{errors:#?}\n{doc:#}");
}

#[test]
fn shipped_problem_files_match_schema() {
    let v = schema("problem.schema.json");
    for entry in std::fs::read_dir(root().join("problems")).unwrap() {
        let path = entry.unwrap().path();
        let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
        assert_valid(&v, &doc);
    }
}

#[test]
fn analyze_lattice_example() {
    let o = varalg(&["analyze", "--problem", &problem("ex42.json")]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_valid(&schema("analyze_report.schema.json"), &doc);
    let lambda_star = doc["lambda_star"].as_f64().unwrap();
    assert!((lambda_star - 2.640398).abs() < 1e-5 * 2.640398);
    assert_eq!(doc["spectrum"]["ones_form"].as_f64(), Some(8.0));
}

#[test]
fn analyze_three_solution_window() {
    let o = varalg(&["analyze", "--problem", &problem("ex37_n2.json"), "--gamma", "2", "--delta", "3", "--epsilon", "0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_valid(&schema("analyze_report.schema.json"), &doc);
    let w = &doc["three_solutions"];
    assert_eq!(w["lambda1_star"].as_f64(), Some(4.5));
    assert_eq!(w["lambda2_star"], "inf");
    assert!(doc["abar"]["abar"].as_f64().unwrap() > doc["lambda_star"].as_f64().unwrap());
}

#[test]
fn infeasible_window_exits_2() {
    let o = varalg(&["analyze", "--problem", &problem("ex37_n2.json"), "--gamma", "3", "--delta", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let doc = json(&o);
    assert_valid(&schema("analyze_report.schema.json"), &doc);
    assert!(doc["errors"][0].as_str().unwrap().contains("first condition"));
}

#[test]
fn input_errors_exit_1() {
    let o = varalg(&["analyze", "--problem", "/nonexistent/problem.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("cannot read"));

    let dir = std::env::temp_dir().join(format!("varalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, "{\n  \"matrix\": {\"kind\": \"dense\", \"rows\": [[1]]},\n  \"nonlinearity\": 7\n}").unwrap();
    let o = varalg(&["solve", "--problem", bad.to_str().unwrap(), "--lambda", "2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"), "{}", String::from_utf8_lossy(&o.stderr));

    let o = varalg(&["solve", "--problem", &problem("ex42.json"), "--lambda", "-1"]);
    assert_eq!(o.status.code(), Some(1));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn solve_lattice_example() {
    let o = varalg(&["solve", "--problem", &problem("ex42.json"), "--lambda", "3"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_valid(&schema("solve_report.schema.json"), &doc);
    let sols = doc["solutions"].as_array().unwrap();
    assert_eq!(sols.len(), 2);
    for s in sols {
        assert!(s["strictly_positive"].as_bool().unwrap());
        assert!(s["residual"].as_f64().unwrap() < 1e-8);
    }
    assert_eq!(doc["checks"]["positivity_ok"], true);
}

#[test]
fn solve_below_threshold_exits_3() {
    let o = varalg(&["solve", "--problem", &problem("ex42.json"), "--lambda", "1"]);
    assert_eq!(o.status.code(), Some(3));
    let doc = json(&o);
    assert_valid(&schema("solve_report.schema.json"), &doc);
    assert!(doc["error"].as_str().unwrap().contains("trivial"));
}

#[test]
fn solve_and_oracle_agree_on_benchmark() {
    let args = |cmd| vec![cmd, "--problem", "", "--lambda", "5"];
    let path = problem("rational_sq_n1.json");
    let run = |cmd| {
        let mut a = args(cmd);
        a[2] = &path;
        let o = varalg(&a);
        assert_eq!(o.status.code(), Some(0));
        let doc = json(&o);
        assert_valid(&schema("solve_report.schema.json"), &doc);
        let mut us: Vec<f64> = doc["solutions"].as_array().unwrap().iter().map(|s| s["u"][0].as_f64().unwrap()).collect();
        us.sort_by(f64::total_cmp);
        us
    };
    let solve = run("solve");
    assert_eq!(solve.len(), 2);
    assert!((solve[0] - 0.5).abs() < 1e-8 && (solve[1] - 2.0).abs() < 1e-8);
    let oracle = run("oracle");
    assert_eq!(oracle.len(), 3);
    for (got, want) in oracle.iter().zip([0.0, 0.5, 2.0]) {
        assert!((got - want).abs() < 1e-8, "{oracle:?}");
    }
}

#[test]
fn solve_three_inside_window() {
    let o = varalg(&[
        "solve", "--problem", &problem("ex37_n2.json"), "--lambda", "5", "--gamma", "2", "--delta", "3", "--three",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_valid(&schema("solve_report.schema.json"), &doc);
    assert_eq!(doc["three"]["lambda_in_window"], true);
    assert_eq!(doc["three"]["found_three"], true);
}

fn slope_from_csv(csv: &str) -> f64 {
    let line = csv.lines().last().unwrap();
    assert!(line.starts_with("# slope_fit "), "{csv}");
    line.split_whitespace().find_map(|kv| kv.strip_prefix("slope=")).unwrap().parse().unwrap()
}

#[test]
fn sweep_power_scaling() {
    let o = varalg(&["sweep", "--problem", &problem("power_half.json"), "--lambdas", "1:64:7"]);
    assert_eq!(o.status.code(), Some(0));
    let csv = stdout(&o);
    assert_eq!(csv.lines().next(), Some("lambda,min_norm,mp_energy,n_solutions,slope_fit,status"));
    assert_eq!(csv.lines().count(), 1 + 7 + 1);
    assert!((slope_from_csv(&csv) - 2.0).abs() <= 0.05);
}

#[test]
fn sweep_empty_range_is_header_only() {
    let o = varalg(&["sweep", "--problem", &problem("ex42.json"), "--lambdas", "3:48:0"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "lambda,min_norm,mp_energy,n_solutions,slope_fit,status\n");
}

#[test]
fn sweep_lattice_norms_increase() {
    let o = varalg(&["sweep", "--problem", &problem("ex42.json"), "--lambdas", "3:48:5", "--format", "json"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = json(&o);
    assert_valid(&schema("sweep_report.schema.json"), &doc);
    let norms: Vec<f64> = doc["rows"].as_array().unwrap().iter().map(|r| r["min_norm"].as_f64().unwrap()).collect();
    assert_eq!(norms.len(), 5);
    assert!(norms.windows(2).all(|w| w[1] > w[0]), "{norms:?}");
    // Frozen from a reference run.
    assert!((norms[0] - 9.446577308010337).abs() < 1e-8);
}

#[test]
fn fixed_seed_output_is_byte_identical() {
    for args in [
        vec!["solve", "--problem", &problem("ex42.json"), "--lambda", "4", "--seed", "7"],
        vec!["sweep", "--problem", &problem("ex42.json"), "--lambdas", "3:12:3", "--seed", "7"],
    ] {
        let (a, b) = (varalg(&args), varalg(&args));
        assert_eq!(a.status.code(), Some(0));
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn out_flag_writes_file() {
    let path = std::env::temp_dir().join(format!("varalg-out-{}.json", std::process::id()));
    let o = varalg(&["analyze", "--problem", &problem("ex42.json"), "--out", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_valid(&schema("analyze_report.schema.json"), &doc);
    std::fs::remove_file(path).unwrap();
}

#[test]
fn csv_is_rejected_for_json_reports() {
    let o = varalg(&["analyze", "--problem", &problem("ex42.json"), "--format", "csv"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn usage_errors_exit_1() {
    assert_eq!(varalg(&["solve", "--problem", &problem("ex42.json")]).status.code(), Some(1));
    assert_eq!(varalg(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(varalg(&["--help"]).status.code(), Some(0));
}
