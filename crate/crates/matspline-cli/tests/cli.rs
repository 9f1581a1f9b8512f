//! End-to-end checks of the binary: exit codes, error prefixes, problem
//! files, and CSV output.

use std::path::Path;
use std::process::{Command, Output};

fn matspline(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_matspline"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn write_problem(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_string_lossy().into_owned()
}

const STIFF_PROBLEM: &str = r#"{
    "a": 0.0, "b": 1.0, "n": 2,
    "Y0": [[0]], "Y1": [[1]],
    "rhs": {"kind": "linear_constant", "C": [[-25]]}
}"#;

#[test]
fn validate_step_accepts_the_reference_setup() {
    let out = matspline(&["validate-step", "--problem", "paper-example", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("1.45647"), "{text}");
    assert!(text.contains("h = 0.1"), "{text}");
    assert!(text.contains("accept"), "{text}");
}

#[test]
fn validate_step_rejects_oversized_steps() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_problem(dir.path(), "stiff.json", STIFF_PROBLEM);
    let out = matspline(&["validate-step", "--problem", &path]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("reject"));
}

#[test]
fn solve_rejects_the_step_and_the_override_permits_it() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_problem(dir.path(), "stiff.json", STIFF_PROBLEM);

    let rejected = matspline(&["solve", "--problem", &path]);
    assert_eq!(rejected.status.code(), Some(2));
    assert!(
        stderr(&rejected).starts_with("error[step-bound]:"),
        "{}",
        stderr(&rejected)
    );

    let forced = matspline(&["solve", "--problem", &path, "--override-step-check"]);
    assert_eq!(forced.status.code(), Some(0), "{}", stderr(&forced));
}

#[test]
fn singular_coefficient_system_is_a_solver_error() {
    // With h = 1 and C = 6I the system I - (h^2/6) C is exactly singular;
    // reachable only past the step bound, so force the override.
    let dir = tempfile::tempdir().unwrap();
    let problem = write_problem(
        dir.path(),
        "singular.json",
        r#"{
            "a": 0.0, "b": 1.0, "n": 1,
            "Y0": [[0]], "Y1": [[1]],
            "rhs": {"kind": "linear_constant", "C": [[6]]}
        }"#,
    );
    let out = matspline(&["solve", "--problem", &problem, "--override-step-check"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(
        stderr(&out).starts_with("error[solver]:"),
        "{}",
        stderr(&out)
    );
}

#[test]
fn unknown_problem_is_a_usage_error() {
    let out = matspline(&["solve", "--problem", "missing-problem"]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.starts_with("error[usage]:"), "{err}");
    assert!(err.contains("paper-example"), "{err}");
}

#[test]
fn bad_flags_exit_with_usage_code() {
    let out = matspline(&["solve", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[usage]:"));
}

#[test]
fn solve_prints_reference_polynomials() {
    let out = matspline(&["solve", "--problem", "paper-example", "--n", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("- 0.1664 x^3"), "{text}");
    assert!(text.contains("- 0.4986 x^3"), "{text}");
    assert!(text.contains("[0.9, 1]"), "{text}");
}

#[test]
fn solve_writes_an_error_csv_for_builtin_problems() {
    let dir = tempfile::tempdir().unwrap();
    let csv_path = dir.path().join("table.csv");
    let out = matspline(&[
        "solve",
        "--problem",
        "scalar-sine",
        "--n",
        "10",
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    assert!(csv.starts_with("interval_left,interval_right,max_error,c0_00"));
    assert_eq!(csv.lines().count(), 11);
}

#[test]
fn solve_without_oracle_writes_coefficients_only() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write_problem(
        dir.path(),
        "custom.json",
        r#"{
            "a": 0.0, "b": 1.0, "n": 4,
            "Y0": [[1, 2], [3, 4]], "Y1": [[0, 0], [0, 0]],
            "rhs": {"kind": "linear_constant", "C": [[0, 0], [0, 0]]}
        }"#,
    );
    let csv_path = dir.path().join("coeffs.csv");
    let out = matspline(&[
        "solve",
        "--problem",
        &problem,
        "--output",
        csv_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = std::fs::read_to_string(&csv_path).unwrap();
    // max_error column exists but is empty for every row
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[2], "");
    }
}

#[test]
fn solve_uses_the_file_subinterval_count() {
    let dir = tempfile::tempdir().unwrap();
    let problem = write_problem(
        dir.path(),
        "sine.json",
        r#"{
            "a": 0.0, "b": 1.0, "n": 5,
            "Y0": [[0]], "Y1": [[1]],
            "rhs": {"kind": "builtin", "name": "scalar-sine"}
        }"#,
    );
    let out = matspline(&["solve", "--problem", &problem]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("n = 5"), "{}", stdout(&out));
}

#[test]
fn convergence_needs_an_exact_solution() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_problem(dir.path(), "stiff.json", STIFF_PROBLEM);
    let out = matspline(&["convergence", "--problem", &path]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).starts_with("error[usage]:"));
}

#[test]
fn convergence_prints_the_order_table() {
    let out = matspline(&["convergence", "--problem", "free-motion", "--levels", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("represented exactly"));
}

#[test]
fn reproduce_example_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let first = dir.path().join("a.csv");
    let second = dir.path().join("b.csv");
    let out1 = matspline(&["reproduce-example", "--output", first.to_str().unwrap()]);
    assert_eq!(out1.status.code(), Some(0), "{}", stderr(&out1));
    assert!(stdout(&out1).contains("all 10 rows within 2%"));
    let out2 = matspline(&["reproduce-example", "--output", second.to_str().unwrap()]);
    assert_eq!(out2.status.code(), Some(0));
    assert_eq!(
        std::fs::read(&first).unwrap(),
        std::fs::read(&second).unwrap()
    );
}
