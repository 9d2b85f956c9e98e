#![allow(clippy::excessive_precision)]

use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_graphmerge"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn pivot_reports_reconstruction() {
    let dir = tempfile::tempdir().unwrap();
    let m = write(&dir, "gamma.txt", "1 0 1\n0 1 1\n1 1 0\n");
    let out = run(&["pivot", "--in", m.to_str().unwrap(), "--deterministic"]);
    assert!(out.status.success());
    let v = json(&out);
    assert_eq!(v["r"], 2);
    assert_eq!(v["reconstructed"], true);
    assert!(v.get("generated_at").is_none());
}

#[test]
fn merge_oracle_over_all_branches() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(&dir, "tri.g", "3\n0 1\n1 2\n0 2\n");
    for backend in ["tableau", "statevector"] {
        let out = run(&[
            "merge",
            "--graph",
            g.to_str().unwrap(),
            "--honest",
            "0,1",
            "--enumerate",
            "--oracle",
            "--backend",
            backend,
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        let v = json(&out);
        assert_eq!(v["verified"], true);
        assert!((v["total_probability"].as_f64().unwrap() - 1.0).abs() < 1e-9);
    }
}

#[test]
fn sv_cap_env_is_honoured() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(&dir, "p.g", "3\n0 1\n1 2\n");
    let out = bin()
        .args([
            "merge",
            "--graph",
            g.to_str().unwrap(),
            "--honest",
            "0",
            "--backend",
            "statevector",
        ])
        .env("GRAPHMERGE_SV_CAP", "4")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn deterministic_output_replays() {
    let args = [
        "verify-ghz",
        "--n",
        "3",
        "--S",
        "3",
        "--theta",
        "0.5",
        "--trials",
        "2000",
        "--seed",
        "5",
        "--deterministic",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json(&a);
    let tau = v["tau"].as_f64().unwrap();
    assert!((v["predicted"].as_f64().unwrap() - tau * tau / 4.0).abs() < 1e-15);
}

#[test]
fn bounds_subcommands() {
    let v = json(&run(&["bounds", "ghz", "--n", "3", "--S", "20"]));
    assert_eq!(v["exact"], "13/1024");
    let v = json(&run(&["bounds", "ghz", "--n", "1", "--S", "0"]));
    assert_eq!(v["out_of_range"], true);
    assert!(v["realization_epsilon"].is_null());
    let v = json(&run(&[
        "bounds", "graph", "--J", "16", "--lambda", "100", "--c", "1", "--m", "1", "--n", "4",
    ]));
    assert!((v["epsilon"].as_f64().unwrap() - 0.19823645484916583713).abs() < 1e-13);
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(
        run(&["bounds", "ghz", "--n", "3", "--S", "20", "--bogus"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(run(&["pivot", "--in", "/nonexistent/file"]).status.code(), Some(2));
}

#[test]
fn twirl_check_and_impossibility() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(&dir, "star.g", "4\n0 1\n0 2\n0 3\n");
    let v = json(&run(&["twirl-check", "--graph", g.to_str().unwrap()]));
    assert_eq!(v["verified"], true);
    assert_eq!(v["partitions"], 16);
    let v = json(&run(&["impossibility-demo", "--trials", "2000", "--seed", "3"]));
    assert_eq!(v["real_equal_rate"], 1.0);
}

#[test]
fn pretty_output_is_a_table() {
    let out = run(&["bounds", "ghz", "--n", "3", "--S", "20", "--pretty", "--deterministic"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("exact") && l.ends_with("13/1024")));
}
