use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_chromacount"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("chromacount-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn gen_then_verdict() {
    let path = scratch("book100.g");
    let p = path.to_str().unwrap();
    let out = run(&["gen", "--family", "book", "--params", "k=100", "--out", p]);
    assert!(out.status.success());
    let v = json(&run(&["verdict", "--graph", p, "--pattern", "triangle"]));
    assert_eq!(v["classification"], "clt_precluded");
    assert_eq!(v["rule"], "influential_edge_bounded_vertices");
}

#[test]
fn gen_round_trip() {
    let path = scratch("windmill.g");
    let p = path.to_str().unwrap();
    assert!(run(&["gen", "--family", "windmill", "--params", "k=5", "--out", p])
        .status
        .success());
    let text = std::fs::read_to_string(&path).unwrap();
    let g = chromacount::graph::parse_edge_list(&text).unwrap().graph;
    assert_eq!(g.edges(), chromacount::families::windmill(5).edges());
    assert_eq!(g.to_edge_list(), text);
}

#[test]
fn closed_form_moments() {
    let v = json(&run(&[
        "moments",
        "--family",
        "disjoint_triangles",
        "--params",
        "n=100",
        "--pattern",
        "triangle",
        "--method",
        "closed-form",
    ]));
    assert_eq!(v["method"], "closed-form");
    assert_eq!(v["fourth"]["num"], "449");
    assert_eq!(v["fourth"]["den"], "150");
    assert_eq!(v["discrepancy"]["num"], "-1");
    assert_eq!(v["discrepancy"]["den"], "150");
    assert!((v["fourth_float"].as_f64().unwrap() - (3.0 - 1.0 / 150.0)).abs() < 1e-12);
}

#[test]
fn bruteforce_moments_k4() {
    let v = json(&run(&[
        "moments", "--family", "complete", "--params", "n=4", "--method", "bruteforce",
    ]));
    assert_eq!(v["normalized"][2]["exact"]["num"], "14");
    assert_eq!(v["normalized"][2]["exact"]["den"], "3");
}

#[test]
fn usage_errors_exit_2() {
    let path = scratch("k3.g");
    std::fs::write(&path, "0 1\n1 2\n0 2\n").unwrap();
    let p = path.to_str().unwrap();
    let out = run(&["simulate", "--graph", p, "--pattern", "triangle", "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "usage");
    assert_eq!(run(&["verdict", "--graph", p, "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["verdict", "--graph", p, "--family", "book"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["verdict"]).status.code(), Some(2));
    assert_eq!(
        run(&["gen", "--family", "book", "--params", "n=3"]).status.code(),
        Some(2)
    );
}

#[test]
fn capability_exit_3() {
    let out = run(&["joins", "--family", "complete", "--params", "n=300"]);
    assert_eq!(out.status.code(), Some(3));
    let err: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "capability");
}

#[test]
fn deterministic_analyze() {
    let args = [
        "analyze",
        "--family",
        "windmill",
        "--params",
        "k=6",
        "--deterministic",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["schema"], "chromacount/1");
    assert!(v.get("timings_ms").is_none());
}

#[test]
fn simulate_independent_of_threads() {
    let base = [
        "simulate", "--family", "book", "--params", "k=8", "--samples", "3000", "--seed", "7",
    ];
    let one = run(&[&base[..], &["--threads", "1"]].concat());
    let four = run(&[&base[..], &["--threads", "4"]].concat());
    let mut a = json(&one);
    let mut b = json(&four);
    assert_eq!(a["workers"], 1);
    assert_eq!(b["workers"], 4);
    a["workers"] = Value::Null;
    b["workers"] = Value::Null;
    assert_eq!(a, b);
    let env = bin()
        .args(base)
        .env("CHROMACOUNT_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(json(&env)["workers"], 2);
}

#[test]
fn csv_outputs() {
    let out = run(&[
        "simulate", "--family", "complete", "--params", "n=5", "--samples", "100", "--format",
        "csv", "--bins", "5",
    ]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("bin_left,bin_right,count\n"));
    assert_eq!(text.lines().count(), 6);
    let out = run(&["analyze", "--family", "book", "--params", "k=5", "--format", "csv"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 2);
}

#[test]
fn spectrum_with_mixture() {
    let v = json(&run(&[
        "spectrum",
        "--family",
        "book",
        "--params",
        "k=100",
        "--condition",
        "0,1",
    ]));
    let means: Vec<f64> = v["mixture"]["components"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["mean"].as_f64().unwrap())
        .collect();
    assert_eq!(means.len(), 4);
    assert!(means.iter().all(|m| (m.abs() - 0.990).abs() < 1e-3));
}
