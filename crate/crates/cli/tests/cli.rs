//! Runs the `acdc-mopf` binary end to end and checks outputs and exit codes.

use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_acdc-mopf")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn data_rows(path: &Path) -> usize {
    let mut r = csv::Reader::from_path(path).expect("csv");
    r.records().count()
}

/// Small optimization run whose pareto.csv feeds the `decide` tests.
fn optimized(dir: &Path) {
    let out = dir.to_str().unwrap();
    let o = run(&["optimize", "--case", "case14_2t", "--pop", "20", "--subswarms", "4", "--iters", "8", "--out", out]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn pf_writes_state_and_reports_objectives() {
    let dir = TempDir::new().unwrap();
    let o = run(&["pf", "--case", "case14_2t", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("F [$/h]"));
    let state: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("state.json")).unwrap()).unwrap();
    assert_eq!(state["converged"], serde_json::Value::Bool(true));
}

#[test]
fn pf_missing_case_file_is_a_usage_error() {
    let o = run(&["pf", "--case", "/nonexistent/grid.json"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("file not found"), "{}", stderr(&o));
}

#[test]
fn pf_unreachable_setpoint_reports_non_convergence() {
    let dir = TempDir::new().unwrap();
    let o = run(&["pf", "--case", "case14_2t", "--set", "converter.1.p_s=5.0", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("non-convergence"));
}

#[test]
fn pf_rejects_unknown_override() {
    let o = run(&["pf", "--case", "case14_2t", "--set", "converter.9.p_s=0.1"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn optimize_writes_result_files() {
    let dir = TempDir::new().unwrap();
    optimized(dir.path());
    for f in ["pareto.csv", "pareto.json", "stats.json", "front.dat"] {
        assert!(dir.path().join(f).exists(), "{f} missing");
    }
    assert!(data_rows(&dir.path().join("pareto.csv")) >= 1);
    let stats: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("stats.json")).unwrap()).unwrap();
    assert_eq!(stats["evaluations"], serde_json::json!(20 * 9));
}

#[test]
fn optimize_rejects_indivisible_population() {
    let o = run(&["optimize", "--case", "case14_2t", "--pop", "10", "--subswarms", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("pop not divisible by subswarms"), "{}", stderr(&o));
}

#[test]
fn decide_picks_one_compromise_per_cluster() {
    let dir = TempDir::new().unwrap();
    optimized(dir.path());
    let pareto = dir.path().join("pareto.csv");
    assert!(data_rows(&pareto) >= 2, "seed-42 run should leave several solutions");
    let balanced = dir.path().join("balanced");
    let o = run(&["decide", "--pareto", pareto.to_str().unwrap(), "--out", balanced.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(data_rows(&balanced.join("compromise.csv")), 2);
    assert!(balanced.join("decision.json").exists());
    assert!(balanced.join("front_clustered.dat").exists());

    let skewed = dir.path().join("skewed");
    let o = run(&[
        "decide",
        "--pareto",
        pareto.to_str().unwrap(),
        "--weights",
        "0.9,0.1",
        "--out",
        skewed.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(data_rows(&skewed.join("compromise.csv")), 2);
    let read_d = |p: &Path| -> Vec<String> {
        let mut r = csv::Reader::from_path(p).unwrap();
        r.records().map(|rec| rec.unwrap()[3].to_string()).collect()
    };
    assert_ne!(read_d(&balanced.join("compromise.csv")), read_d(&skewed.join("compromise.csv")));
}

#[test]
fn decide_needs_two_solutions() {
    let dir = TempDir::new().unwrap();
    let file = dir.path().join("one.csv");
    std::fs::write(&file, "f_cost_usd_per_h,v_dev_pu2,violation\n8200.0,0.01,0\n").unwrap();
    let o = run(&["decide", "--pareto", file.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unknown_study_is_a_usage_error() {
    let o = run(&["study", "case999-nothing"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unknown study"));
}

#[test]
fn validate_accepts_shipped_and_rejects_broken_cases() {
    let o = run(&["validate", "--case", "case118_3t"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert!(stdout(&o).contains("valid"));

    let dir = TempDir::new().unwrap();
    let file = dir.path().join("broken.json");
    let mut case: serde_json::Value = serde_json::to_value(acdc_mopf::shipped_case("case14_2t").unwrap()).unwrap();
    case["branches"][0]["to"] = serde_json::json!(999);
    std::fs::write(&file, serde_json::to_string(&case).unwrap()).unwrap();
    let o = run(&["validate", "--case", file.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_flag_is_a_usage_error() {
    assert_eq!(run(&["pf", "--nope"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
