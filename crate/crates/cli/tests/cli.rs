use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;
use toric_period::{gkz_operator, SpectralParams, ToricData, XSpaceOperator};

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, body).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toric-period")).args(args).output().unwrap()
}

fn run_with(command: &str, config: &Path, extra: &[&str]) -> Output {
    let mut args = vec![command, "--config", config.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

const P1: &str = r#"{
  "schema_version": 1,
  "charge_matrix": [[1, 1]],
  "lambda": [0.0, 0.0],
  "x_points": [[0.0]]
}"#;

#[test]
fn kernel_of_p2() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "p2.json",
        r#"{"schema_version": 1, "charge_matrix": [[1, 1, 1]], "lambda": [0, 0, 0]}"#,
    );
    let output = run_with("kernel", &config, &[]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["kernel"], serde_json::json!([[1, 0, -1], [0, 1, -1]]));
    assert_eq!(report["jacobian"], 1.0);
    assert_eq!(report["integrable"], true);
}

#[test]
fn bessel_check_spot_value() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "p1.json", P1);
    let output = run_with("bessel-check", &config, &[]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers = reader.headers().unwrap().clone();
    let row = reader.records().next().unwrap().unwrap();
    let field = |name: &str| -> f64 { row[headers.iter().position(|h| h == name).unwrap()].parse().unwrap() };
    assert!((field("re_quad") - 0.2277877).abs() < 1e-7);
    assert!((field("re_oracle") - 0.2277877).abs() < 1e-7);
    assert!(field("rel_err") <= 1e-6);
    assert_eq!(&row[8], "true");
}

#[test]
fn corrupted_sign_exits_with_verification_failure() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "p1.json", P1);
    assert_eq!(run_with("verify-annihilator", &config, &[]).status.code(), Some(0));
    let output = run_with("verify-annihilator", &config, &["--corrupt-sign"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stdout(&output).contains("\"annihilates\": false"));
}

#[test]
fn emit_ops_round_trips() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "product.json",
        r#"{"schema_version": 1, "charge_matrix": [[1, 1, 1, 0], [0, 0, 1, 1]],
            "lambda": [0.3, -0.2, 0.1, 0.7], "c": 1.5}"#,
    );
    let out = dir.path().join("out");
    let output = run_with("emit-ops", &config, &["--out", out.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(0));
    let parsed: Vec<XSpaceOperator> =
        serde_json::from_str(&fs::read_to_string(out.join("ops.json")).unwrap()).unwrap();
    let data = ToricData::new(&[vec![1, 1, 1, 0], vec![0, 0, 1, 1]]).unwrap();
    let params = SpectralParams::new(vec![0.3, -0.2, 0.1, 0.7], 1.5).unwrap();
    let expected: Vec<XSpaceOperator> =
        (0..2).map(|alpha| gkz_operator(&data.charge, &params, alpha).unwrap()).collect();
    assert_eq!(parsed, expected);
}

#[test]
fn eval_csv_is_byte_identical_across_runs_and_thread_counts() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "grid.json",
        r#"{"schema_version": 1, "charge_matrix": [[1, 1, 1]], "lambda": [0.3, -0.2, 0.1],
            "grid": {"min": [-1.0], "max": [1.0], "step": 0.25},
            "quadrature": {"abs_tol": 1e-8, "rel_tol": 1e-8}}"#,
    );
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    assert_eq!(run_with("eval", &config, &["--out", a.to_str().unwrap(), "--threads", "1"]).status.code(), Some(0));
    assert_eq!(run_with("eval", &config, &["--out", b.to_str().unwrap(), "--threads", "4"]).status.code(), Some(0));
    let first = fs::read(a.join("eval.csv")).unwrap();
    assert_eq!(first, fs::read(b.join("eval.csv")).unwrap());
    let text = String::from_utf8(first).unwrap();
    assert!(!text.contains('\r'));
    assert_eq!(text.lines().next().unwrap(), "x1,re_psi,im_psi,error");
    assert_eq!(text.lines().count(), 10);
}

#[test]
fn eval_at_matrix_element_points() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "y.json",
        r#"{"schema_version": 1, "charge_matrix": [[1, 1]], "lambda": [0, 0], "y_points": [[0.5, -0.5]]}"#,
    );
    let output = run_with("eval", &config, &[]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "y1,y2,x1,re_psi,im_psi,error");
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row[2], 0.0);
    assert!((row[3] - 0.2277877454990669).abs() < 1e-9);
}

#[test]
fn csv_numbers_round_trip() {
    let dir = TempDir::new().unwrap();
    let config = write_config(dir.path(), "p1.json", P1);
    let text = stdout(&run_with("eval", &config, &[]));
    let value = text.lines().nth(1).unwrap().split(',').nth(1).unwrap();
    let mantissa = value.split('e').next().unwrap();
    assert_eq!(mantissa.chars().filter(char::is_ascii_digit).count(), 17);
}

#[test]
fn verify_pde_on_p1() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "pde.json",
        r#"{"schema_version": 1, "charge_matrix": [[1, 1]], "lambda": [0, 0],
            "grid": {"min": [-1.0], "max": [1.0], "step": 0.01},
            "quadrature": {"abs_tol": 1e-12, "rel_tol": 1e-12}}"#,
    );
    let output = run_with("verify-pde", &config, &["--threads", "2"]);
    assert_eq!(output.status.code(), Some(0));
    let text = stdout(&output);
    assert_eq!(
        text.lines().next().unwrap(),
        "x1,alpha,h,re_residual,im_residual,normalizer,normalized_residual,pass"
    );
    assert_eq!(text.lines().count(), 202);
    assert!(text.lines().skip(1).all(|l| l.ends_with(",true")));
}

#[test]
fn series_json() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "series.json",
        r#"{"schema_version": 1, "charge_matrix": [[1, 1]], "lambda": [0, 0], "dmax": [20], "x_points": [[0.0]]}"#,
    );
    let output = run_with("series", &config, &[]);
    assert_eq!(output.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&stdout(&output)).unwrap();
    assert_eq!(report["coefficients"].as_array().unwrap().len(), 21);
    let value = report["evaluations"][0]["re"].as_f64().unwrap();
    assert!((value - 2.2795853023360673).abs() < 1e-12);
}

#[test]
fn input_errors_exit_with_one() {
    let dir = TempDir::new().unwrap();
    let config = write_config(
        dir.path(),
        "bad.json",
        "{\n  \"schema_version\": 1,\n  \"charge_matrix\": [[1, 1]],\n  \"lambda\": [0, 0, 0]\n}",
    );
    let output = run_with("kernel", &config, &[]);
    assert_eq!(output.status.code(), Some(1));
    let message = String::from_utf8(output.stderr).unwrap();
    assert!(message.contains("line 4"), "{message}");
    assert!(message.contains("lambda"), "{message}");

    let missing = dir.path().join("missing.json");
    assert_eq!(run_with("kernel", &missing, &[]).status.code(), Some(1));

    let not_integrable = write_config(
        dir.path(),
        "zero_column.json",
        r#"{"schema_version": 1, "charge_matrix": [[1, 0]], "lambda": [0, 0], "x_points": [[0.0]]}"#,
    );
    assert_eq!(run_with("eval", &not_integrable, &[]).status.code(), Some(1));
}
