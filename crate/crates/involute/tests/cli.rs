//! End-to-end tests of the command-line interface: exit codes, report
//! shapes, config-file handling, and input validation through real
//! process invocations.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_involute")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin())
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn write_file(path: &Path, text: &str) {
    let mut f = std::fs::File::create(path).unwrap();
    f.write_all(text.as_bytes()).unwrap();
}

/// A degree-4 surface violating the slice condition: both cross terms have
/// weight 3, so the alternating sum is 6, not 0.
const INVALID_SURFACE: &str = r#"{
  "trunc": 4,
  "terms": [
    {"i": 3, "j": 1, "c": {"re": ["1", "1"], "im": ["0", "1"]}},
    {"i": 1, "j": 3, "c": {"re": ["1", "1"], "im": ["0", "1"]}}
  ]
}"#;

#[test]
fn validate_accepts_the_builtin_family() {
    let out = run(&["validate", "--degree", "8", "--epsilon", "1/2"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    assert_eq!(v["valid"], serde_json::json!(true));
    assert_eq!(v["trunc"], serde_json::json!(8));
    assert_eq!(v["epsilon"], serde_json::json!(["1", "2"]));
}

#[test]
fn validate_rejects_a_bad_surface_with_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    write_file(&path, INVALID_SURFACE);
    let out = run(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let v = stdout_json(&out);
    assert_eq!(v["valid"], serde_json::json!(false));
    assert!(!v["violations"].as_array().unwrap().is_empty());
}

#[test]
fn other_commands_reject_a_bad_surface_before_working() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    write_file(&path, INVALID_SURFACE);
    let out = run(&[
        "normalize",
        "--input",
        path.to_str().unwrap(),
        "--degree",
        "4",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error:"), "stderr: {err}");
}

#[test]
fn normalize_reports_the_transform_at_the_requested_degree() {
    let out = run(&["normalize", "--degree", "8", "--epsilon", "1/2"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["degree"], serde_json::json!(8));
    assert_eq!(v["transform"]["residual_degree"], serde_json::json!(9));
    assert!(v["transform"]["u"]["terms"].as_array().is_some());
}

#[test]
fn involutions_certification_is_reported() {
    let out = run(&["involutions", "--degree", "6"]);
    assert!(out.status.success());
    let v = stdout_json(&out);
    let cert = &v["pair"]["certification"];
    assert_eq!(cert["involutive_tau1"], serde_json::json!(true));
    assert_eq!(cert["involutive_tau2"], serde_json::json!(true));
}

#[test]
fn linearize_cross_checks_the_operator_route() {
    let out = run(&["linearize", "--degree", "8"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["k_route_consistent"], serde_json::json!(true));
    assert!(!v["a"]["terms"].as_array().unwrap().is_empty());
    assert!(!v["u"]["terms"].as_array().unwrap().is_empty());
}

#[test]
fn certificate_csv_has_one_row_per_degree() {
    let out = run(&[
        "certify-divergence",
        "--degree",
        "12",
        "--output-format",
        "csv",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    // Header plus one row for each n in 2..=12.
    assert_eq!(lines.len(), 12, "unexpected CSV:\n{text}");
    assert_eq!(lines[0], "n,s_root");
    assert!(lines[1].starts_with("2,"));
    assert!(lines[11].starts_with("12,"));
}

#[test]
fn certificate_json_is_identical_across_thread_counts() {
    let a = run(&["certify-divergence", "--degree", "12", "--threads", "1"]);
    let b = run(&["certify-divergence", "--degree", "12", "--threads", "2"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["pass"], serde_json::json!(true));
    assert_eq!(v["N"], serde_json::json!(12));
}

#[test]
fn certificate_rejects_surface_input() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("surface.json");
    write_file(&path, r#"{"trunc": 4, "terms": []}"#);
    let out = run(&["certify-divergence", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn perturb_failure_is_exit_one_and_names_the_degree() {
    let out = run(&["perturb", "--seed-degrees", "5,7"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("degree 7"), "stderr: {err}");
}

#[test]
fn perturb_single_stage_succeeds_and_reports_the_surface() {
    let out = run(&["perturb", "--seed-degrees", "5"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    assert_eq!(v["changed"], serde_json::json!(true));
    assert_eq!(v["stages"], serde_json::json!([5]));
    assert!(!v["surface"]["terms"].as_array().unwrap().is_empty());
}

#[test]
fn config_file_supplies_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    write_file(
        &path,
        r#"{"command": "normalize", "degree": 6, "epsilon": "1/2"}"#,
    );
    // Degree from the file.
    let out = run(&["normalize", "--config", path.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["degree"], serde_json::json!(6));
    // Explicit flag beats the file.
    let out = run(&[
        "normalize",
        "--config",
        path.to_str().unwrap(),
        "--degree",
        "7",
    ]);
    assert!(out.status.success());
    assert_eq!(stdout_json(&out)["degree"], serde_json::json!(7));
}

#[test]
fn config_file_command_must_match_the_subcommand() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    write_file(&path, r#"{"command": "validate"}"#);
    let out = run(&["normalize", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn config_file_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cfg.json");
    write_file(&path, r#"{"command": "validate", "degre": 6}"#);
    let out = run(&["validate", "--config", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn env_var_sets_threads_without_changing_results() {
    let with_env = Command::new(bin())
        .args(["certify-divergence", "--degree", "12"])
        .env("INVOLUTE_THREADS", "2")
        .output()
        .unwrap();
    let plain = run(&["certify-divergence", "--degree", "12"]);
    assert!(with_env.status.success());
    assert_eq!(with_env.stdout, plain.stdout);
}

#[test]
fn bad_flags_and_bad_values_exit_one() {
    let out = run(&["certify-divergence", "--no-such-flag"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["normalize", "--degree", "3"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["normalize", "--epsilon", "0"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["normalize", "--epsilon", "abc"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["certify-divergence", "--threads", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn output_flag_writes_the_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "validate",
        "--degree",
        "6",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["valid"], serde_json::json!(true));
}

#[test]
fn profile_reports_all_phases_with_hashes() {
    let out = run(&["profile", "--degree", "10"]);
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let v = stdout_json(&out);
    let phases = v["phases"].as_array().unwrap();
    let names: Vec<&str> = phases
        .iter()
        .map(|p| p["phase"].as_str().unwrap())
        .collect();
    assert_eq!(names, ["parse", "involutions", "normalize", "certify"]);
    for p in phases {
        assert!(p["wall_ms"].as_f64().unwrap() >= 0.0);
        assert_eq!(p["result_hash"].as_str().unwrap().len(), 64);
        assert!(p["peak_coeff_bits"].as_u64().unwrap() > 0);
    }
}

#[test]
fn profile_hashes_are_deterministic_across_runs() {
    let hashes = |out: &Output| -> Vec<String> {
        stdout_json(out)["phases"]
            .as_array()
            .unwrap()
            .iter()
            .map(|p| p["result_hash"].as_str().unwrap().to_string())
            .collect()
    };
    let a = run(&["profile", "--degree", "10"]);
    let b = run(&["profile", "--degree", "10"]);
    assert!(a.status.success() && b.status.success());
    assert_eq!(hashes(&a), hashes(&b));
}
