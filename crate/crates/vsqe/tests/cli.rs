//! End-to-end tests of the `vsqe` binary: answers, exit codes, residual
//! printing, batch mode, and error reporting.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn benchmarks_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../benchmarks")
}

fn vsqe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vsqe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

#[test]
fn sat_problem_exits_zero() {
    let path = benchmarks_dir().join("lin_pos_sat.smt2");
    let out = vsqe(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "sat");
}

#[test]
fn unsat_problem_exits_zero() {
    let path = benchmarks_dir().join("lin_contradiction_unsat.smt2");
    let out = vsqe(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "unsat");
}

#[test]
fn cubic_is_unknown_with_residual() {
    let path = benchmarks_dir().join("cubic_root_sat.smt2");
    let out = vsqe(&[path.to_str().unwrap(), "--print-residual"]);
    assert_eq!(out.status.code(), Some(1));
    let text = stdout(&out);
    assert!(text.starts_with("unknown"));
    assert!(text.contains("residual: ExQ"));
}

#[test]
fn parse_error_exits_two() {
    let path = write_temp("vsqe_bad.smt2", "(assert (= (/ x 2) 0))");
    let out = vsqe(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn check_negation_reports_consistency() {
    let path = benchmarks_dir().join("quad_sqrt2_sat.smt2");
    let out = vsqe(&[path.to_str().unwrap(), "--check-negation"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.contains("sat"));
    assert!(text.contains("negation: unsat"));
    assert!(text.contains("negation-check: consistent"));
}

#[test]
fn native_format_file() {
    let path = write_temp("vsqe_native.vs", "ExQ (Atom (Eq (Var 0 - Const 3)))");
    let out = vsqe(&[path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).trim(), "sat");
}

#[test]
fn algorithm_flag_selects_algorithm() {
    let path = benchmarks_dir().join("lin_eq_sat.smt2");
    for algo in ["lucky", "equality", "equality3", "general", "general3", "leg"] {
        let out = vsqe(&[path.to_str().unwrap(), "--algorithm", algo]);
        assert_eq!(out.status.code(), Some(0), "algorithm {algo}");
        assert_eq!(stdout(&out).trim(), "sat", "algorithm {algo}");
    }
}

#[test]
fn bench_mode_emits_csv() {
    let dir = benchmarks_dir();
    let out = vsqe(&["--bench", dir.to_str().unwrap(), "--timeout", "10"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("name,algorithm,answer,ms,residual_nodes"));
    assert!(text.lines().count() >= 36);
    assert!(text.contains("cubic_root_sat,leg,unknown,"));
    let summary = String::from_utf8_lossy(&out.stderr);
    assert!(summary.contains("solved"));
}

#[test]
fn bench_mode_emits_json() {
    let dir = benchmarks_dir();
    let out = vsqe(&["--bench", dir.to_str().unwrap(), "--timeout", "10", "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let records: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let arr = records.as_array().unwrap();
    assert!(arr.len() >= 36);
    assert!(arr.iter().all(|r| r.get("answer").is_some()));
}
