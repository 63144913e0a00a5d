use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

fn ornstein(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ornstein"))
        .args(args)
        .env_remove("ORNSTEIN_SEED")
        .env_remove("ORNSTEIN_GRID")
        .env_remove("ORNSTEIN_OUT")
        .env_remove("ORNSTEIN_CONFIG")
        .output()
        .expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = ornstein(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn analyze(file: &str) -> Value {
    report(&["analyze", data(file).to_str().unwrap()])
}

#[test]
fn analyze_three_variable() {
    let r = analyze("three_variable.ops");
    assert_eq!(r["command"], "analyze");
    assert_eq!(r["result"]["pattern"]["display"], "(3,2,6;12)");
    assert_eq!(r["result"]["parity"], "mixed");
    assert_eq!(r["result"]["dim_e"], 5);
    assert!(r["result"]["rank_one_span"].is_null());
    assert_eq!(r["result"]["dependence"]["verdict"], "none");
}

#[test]
fn analyze_gradient() {
    let r = analyze("gradient.ops");
    assert_eq!(r["result"]["pattern"]["display"], "(1,1;1)");
    assert_eq!(r["result"]["parity"], "odd");
    assert_eq!(r["result"]["rank_one_span"], 2);
}

#[test]
fn analyze_dependent_family() {
    let r = analyze("laplacian.ops");
    assert_eq!(r["result"]["pattern"]["display"], "(1,1;2)");
    assert_eq!(r["result"]["dependence"]["verdict"], "inequality holds trivially");
    assert_eq!(r["result"]["dependence"]["ratio_bound"], "2");
}

#[test]
fn spectral_needs_even_grid() {
    let out = ornstein(&[
        "disprove",
        data("hessian.ops").to_str().unwrap(),
        "--scheme",
        "spectral",
        "--grid",
        "33",
        "--budget",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(ornstein(&["analyze"]).status.code(), Some(2));
    assert_eq!(ornstein(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(ornstein(&["--help"]).status.code(), Some(0));
    assert_eq!(ornstein(&["analyze", "/nonexistent/file.ops"]).status.code(), Some(2));
}

#[test]
fn reports_are_reproducible() {
    let strip = |mut v: Value| {
        v.as_object_mut().unwrap().remove("timing");
        v
    };
    let ops = data("hessian.ops");
    let args = ["disprove", ops.to_str().unwrap(), "--grid", "16", "--budget", "40", "--stages", "2"];
    let a = strip(report(&args));
    let b = strip(report(&args));
    assert_eq!(serde_json::to_string(&a).unwrap(), serde_json::to_string(&b).unwrap());
    assert_eq!(a["config"]["seed"], 0);
    assert_eq!(a["config_hash"].as_str().unwrap().len(), 64);
}

#[test]
fn output_dir_is_not_overwritten() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let ops = data("gradient.ops");
    let run = |extra: &[&str]| {
        let mut args = vec!["--quiet", "--out", out, "analyze", ops.to_str().unwrap()];
        args.extend_from_slice(extra);
        ornstein(&args)
    };
    assert!(run(&[]).status.success());
    let first = std::fs::read(dir.path().join("analyze.json")).unwrap();
    let again = run(&[]);
    assert_eq!(again.status.code(), Some(2));
    assert_eq!(std::fs::read(dir.path().join("analyze.json")).unwrap(), first);
    assert!(run(&["--overwrite"]).status.success());
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("config.json");
    std::fs::write(&cfg, r#"{"analyze": {"samples": 9, "seed": 4}}"#).unwrap();
    let ops = data("gradient.ops");
    let r = report(&["--config", cfg.to_str().unwrap(), "analyze", ops.to_str().unwrap(), "--seed", "5"]);
    assert_eq!(r["config"]["samples"], 9);
    assert_eq!(r["config"]["seed"], 5);
    std::fs::write(&cfg, r#"{"analyze": {"bogus": 1}}"#).unwrap();
    let out = ornstein(&["--config", cfg.to_str().unwrap(), "analyze", ops.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn martingale_and_r4_commands() {
    let r = report(&["martingale", "--depths", "6,8", "--trials", "4"]);
    let entries = r["result"]["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 2);
    let r = report(&["r4check", "--points", "20"]);
    assert!(r["result"].is_object());
}

#[test]
fn fast_suite_passes() {
    let out = ornstein(&["suite", "--fast", "--filter", "pattern"]);
    assert!(out.status.success());
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.lines().next().unwrap().starts_with("PASS [ 1] pattern"));
}
