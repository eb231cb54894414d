//! End-to-end runs of the `ballneedlets` binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ballneedlets"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ballneedlets-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn cubature_envelope_and_fields() {
    let v = json(&run(&["--seed", "5", "cubature", "--n", "4", "--mu", "0.5"]));
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["seed"], 5);
    assert!(v["command_line"].as_array().unwrap().len() >= 5);
    assert!(v["residual_max"].as_f64().unwrap() < 1e-8);
    assert!(v["weight_ratio_bounds"].is_array());
    let w = v["weights"].as_array().unwrap();
    assert!(w.iter().all(|x| x.as_f64().unwrap() > 0.0));
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["cubature", "--n", "8", "--mu", "1"];
    let a = run(&args);
    let b = bin().args(args).env("BALLNEEDLETS_THREADS", "1").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn points_payload() {
    let v = json(&run(&["points", "--epsilon", "0.5", "--mu", "0"]));
    let m = v["m"].as_u64().unwrap() as usize;
    assert_eq!(v["points"].as_array().unwrap().len(), 4 * m * m);
}

#[test]
fn csv_headers() {
    let k = run(&["kernel", "--n", "4", "--grid", "5"]);
    assert!(k.status.success());
    let text = String::from_utf8(k.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "x1,x2,y1,y2,distance,value");

    let c = run(&["christoffel", "--n", "4", "--grid", "4"]);
    let text = String::from_utf8(c.stdout).unwrap();
    assert_eq!(text.lines().next().unwrap(), "radius,lambda,scale,ratio");
    assert_eq!(text.lines().count(), 6);
}

#[test]
fn analyze_then_synthesize_reproduces_polynomial() {
    let coeffs = scratch("coeffs.csv");
    let poly = "1:0,0 -0.5:2,1 0.25:0,3";
    let a = run(&["needlet", "analyze", "-J", "4", "--poly", poly, "-o", coeffs.to_str().unwrap()]);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    let s = run(&["needlet", "synthesize", "-J", "4", "--coeffs", coeffs.to_str().unwrap(), "--grid", "7"]);
    assert!(s.status.success(), "{}", String::from_utf8_lossy(&s.stderr));
    let text = String::from_utf8(s.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "x1,x2,value");
    let mut count = 0;
    for line in lines {
        let v: Vec<f64> = line.split(',').map(|t| t.parse().unwrap()).collect();
        let exact = 1.0 - 0.5 * v[0] * v[0] * v[1] + 0.25 * v[1].powi(3);
        assert!((v[2] - exact).abs() < 1e-9, "{line}");
        count += 1;
    }
    assert!(count > 20);
}

#[test]
fn parseval_report() {
    let v = json(&run(&["needlet", "parseval", "-J", "4", "--random-degree", "3"]));
    assert_eq!(v["seed"], 20240601);
    let text = v.to_string();
    assert!(text.contains("gap") || text.contains("norm"), "{text}");
}

#[test]
fn verify_subset_passes() {
    let out = run(&["verify", "--only", "metric", "--only", "1"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["criteria"].as_array().unwrap().len(), 2);
    let lines = String::from_utf8(out.stderr).unwrap();
    assert_eq!(lines.lines().filter(|l| l.starts_with("[PASS]")).count(), 2);
}

#[test]
fn config_file_overrides_and_validation() {
    let cfg = scratch("run.cfg");
    std::fs::write(&cfg, "# test\nseed = 99\nmu = 0.5\n").unwrap();
    let v = json(&run(&["--config", cfg.to_str().unwrap(), "cubature", "--n", "4"]));
    assert_eq!(v["seed"], 99);

    std::fs::write(&cfg, "tol = 0\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "verify", "--only", "metric"]).status.code(), Some(2));
    std::fs::write(&cfg, "colour = red\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "verify"]).status.code(), Some(2));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["verify", "--only", "nonsense"]).status.code(), Some(2));
    let out = bin()
        .args(["verify", "--only", "metric"])
        .env("BALLNEEDLETS_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(run(&["cubature", "--n", "4", "--solver", "magic"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    assert_eq!(run(&["kernel", "--n", "4", "--x", "2,2"]).status.code(), Some(1));
}
