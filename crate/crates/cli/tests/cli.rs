//! End-to-end tests of the command-line surface: subcommands, file formats,
//! and the exit-code contract (0 ok, 1 usage, 2 parse, 3 precondition,
//! 4 verification).

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_pastwalk"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf()
}

fn fixture_certificate() -> PathBuf {
    workspace_root().join("crates/core/tests/data/certified_bound_deg1.json")
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pastwalk-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn usage_error_is_exit_1() {
    let out = run(&["no-such-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&[]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn parse_error_is_exit_2() {
    let walk = temp_file("broken.walk", "q1 = n^\nq2 = -n\np = 0.5\ny0 = 1\n");
    let out = run(&["simulate", walk.to_str().unwrap(), "--samples", "10", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("syntax error"), "stderr: {stderr}");

    let bad_p = temp_file("badp.walk", "q1 = n\nq2 = -n\np = 1.5\ny0 = 1\n");
    let out = run(&["simulate", bad_p.to_str().unwrap(), "--samples", "10", "--cap", "10"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn precondition_failure_is_exit_3() {
    // drift degree equals the walk degree: the analyzer must refuse
    let walk = temp_file("drifty.walk", "q1 = n\nq2 = 3n\np = 0.5\ny0 = 1\n");
    let out = run(&[
        "analyze",
        walk.to_str().unwrap(),
        "--generations",
        "2",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let report: serde_json::Value =
        serde_json::from_slice(&out.stdout).expect("report is JSON");
    assert_eq!(report["verdict"], "precondition-failed");
}

#[test]
fn verify_accepts_reference_certificate() {
    let out = run(&["verify", fixture_certificate().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("inductive"));
}

#[test]
fn verify_rejects_tampered_certificate() {
    let text = std::fs::read_to_string(fixture_certificate()).unwrap();
    let mut cert: serde_json::Value = serde_json::from_str(&text).unwrap();
    // raising the conditioning fraction beyond the bound's strength
    cert["epsilon"] = serde_json::json!(0.20);
    let tampered = temp_file("tampered.json", &cert.to_string());
    let out = run(&["verify", tampered.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
}

#[test]
fn analyze_emits_verifiable_certificate() {
    let walk = workspace_root().join("walks/linear_drift.walk");
    let out = run(&[
        "analyze",
        walk.to_str().unwrap(),
        "--mode",
        "exponent-only",
        "--generations",
        "12",
        "--seed",
        "5",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let verdict = report["verdict"].as_str().unwrap();
    assert!(verdict == "past-proven" || verdict == "inconclusive");
    if verdict == "past-proven" {
        assert!(report["exponent"].as_f64().unwrap() < -1.0);
        let cert = temp_file("emitted.json", &report["certificate"].to_string());
        let verify = run(&["verify", cert.to_str().unwrap()]);
        assert_eq!(verify.status.code(), Some(0));
    }
}

#[test]
fn analyze_is_deterministic() {
    let walk = workspace_root().join("walks/linear_drift.walk");
    let args = [
        "analyze",
        walk.to_str().unwrap(),
        "--generations",
        "8",
        "--seed",
        "42",
    ];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.status.code(), b.status.code());
}

#[test]
fn simulate_writes_json_and_csv() {
    // sure decrease by 1 each step from 5: stops at exactly 5
    let walk = temp_file("sure.walk", "q1 = -1\nq2 = -1\np = 0.5\ny0 = 5\n");
    let csv = temp_file("survival.csv", "");
    let out = run(&[
        "simulate",
        walk.to_str().unwrap(),
        "--samples",
        "100",
        "--cap",
        "50",
        "--seed",
        "1",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let result: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(result["stop_times"]["mean"], 5.0);
    assert_eq!(result["censored"], 0);
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = csv_text.lines();
    assert_eq!(lines.next(), Some("n,survival,stderr"));
    assert!(lines.next().unwrap().starts_with("1,1,"));
}

#[test]
fn bound_prints_certificate_or_infeasible() {
    let out = run(&[
        "bound", "--epsilon", "0.1", "--d", "3.0", "--c0", "0.001", "--C1", "1.0", "--delta1",
        "0", "--g", "2", "--s", "1.0", "--c", "3.0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let cert: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(cert["a"].as_array().unwrap().len(), 2);
    assert!(cert["b"][0].as_f64().unwrap() >= 0.1);

    let out = run(&[
        "bound", "--epsilon", "0.5", "--d", "0.01", "--g", "3", "--s", "1.0", "--c", "2.0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("INFEASIBLE"));
}

#[test]
fn compare_reports_soundness() {
    let walk = workspace_root().join("walks/symmetric_quadratic.walk");
    let out = run(&[
        "compare",
        walk.to_str().unwrap(),
        "--samples",
        "20000",
        "--cap",
        "100000",
        "--generations",
        "15",
        "--seed",
        "2",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    let joint: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(joint["soundness"]["survival_dominated"], true);
}

#[test]
fn pretty_rendering_is_human_readable() {
    let walk = workspace_root().join("walks/linear_drift.walk");
    let out = run(&[
        "analyze",
        walk.to_str().unwrap(),
        "--generations",
        "6",
        "--seed",
        "3",
        "--pretty",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("verdict"));
    assert!(text.contains("exponent"));
}

#[test]
fn fractional_walk_is_accepted() {
    let walk = workspace_root().join("walks/fractional.walk");
    let out = run(&[
        "simulate",
        walk.to_str().unwrap(),
        "--samples",
        "500",
        "--cap",
        "10000",
        "--seed",
        "9",
    ]);
    assert_eq!(out.status.code(), Some(0));
}
