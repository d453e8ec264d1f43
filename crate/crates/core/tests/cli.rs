use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn fracgeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fracgeo"))
        .args(args)
        .env("FRACGEO_THREADS", "1")
        .output()
        .unwrap()
}

fn column(csv: &str, name: &str) -> Vec<f64> {
    let mut lines = csv.lines();
    let idx = lines.next().unwrap().split(',').position(|h| h == name).unwrap();
    lines.map(|l| l.split(',').nth(idx).unwrap().parse().unwrap()).collect()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn sphere_document_gives_a_constant_column() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "sphere.json", r#"{"kind":"sphere","center":[0,0,0],"radius":1}"#);
    let out = fracgeo(&["nmc", "--surface", &s, "--alpha", "0.5", "--points", "12"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let h = column(&csv, "nmc");
    let err: f64 = column(&csv, "quad_err").iter().chain(&column(&csv, "tail_err")).sum();
    assert_eq!(h.len(), 12);
    let spread = h.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - h.iter().cloned().fold(f64::INFINITY, f64::min);
    assert!(spread <= err + 1e-12 && h[0] > 0.0);
}

#[test]
fn json_output_mirrors_the_table() {
    let out = fracgeo(&["perimeter", "--format", "json", "--alpha", "0.4"]);
    assert!(out.status.success());
    let doc: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["schema"], serde_json::json!(["term", "value", "quad_err", "tail_err"]));
    assert_eq!(doc["rows"][0][0], "total");
    assert_eq!(doc["metadata"]["settings"]["alpha"], 0.4);
    assert_eq!(doc["metadata"]["settings"]["quad"]["rel_tol"], 1e-6);
}

#[test]
fn invalid_inputs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let extra = write(dir.path(), "s.json", r#"{"kind":"sphere","center":[0,0],"radius":1,"color":"red"}"#);
    let mismatch = write(dir.path(), "m.json", r#"{"kind":"sphere","center":[0,0],"radius":1}"#);
    for args in [
        vec!["nmc", "--surface", extra.as_str()],
        vec!["nmc", "--surface", mismatch.as_str(), "--dim", "3"],
        vec!["nmc", "--alpha", "0"],
        vec!["nmc", "--format", "xml"],
        vec!["lattice", "--radii", "1.5"],
        vec!["verify", "--suite", "unknown"],
    ] {
        let out = fracgeo(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
    let out = Command::new(env!("CARGO_BIN_EXE_fracgeo")).args(["nmc"]).env("FRACGEO_THREADS", "zero").output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn numerical_failure_writes_a_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "cfg.json", r#"{"quad":{"max_subdivisions":1,"rel_tol":1e-12}}"#);
    let target = dir.path().join("p.csv");
    let out = fracgeo(&["perimeter", "--config", &cfg, "--output", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(!target.exists());
    let diag: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(diag["operation"], "frac_perimeter");
    assert!(dir.path().join("p.csv.diagnostic.json").exists());
}

#[test]
fn verify_reports_every_property() {
    let out = fracgeo(&["verify", "--suite", "scaling"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    assert_eq!(csv.lines().next(), Some("suite,property,measured,tolerance,pass"));
    assert_eq!(csv.lines().count(), 5);
    assert!(csv.lines().skip(1).all(|l| l.starts_with("scaling,") && l.ends_with(",true")));
}

#[test]
fn limit_extrapolates_to_one() {
    let out = fracgeo(&["limit", "--dim", "3"]);
    assert!(out.status.success());
    let csv = String::from_utf8(out.stdout).unwrap();
    let a = column(&csv, "alpha");
    let h = column(&csv, "normalized_nmc");
    assert_eq!(a.last(), Some(&1.0));
    assert!((h.last().unwrap() - 1.0).abs() < 0.02);
}

#[test]
fn branch_resumes_from_a_checkpoint() {
    let dir = tempfile::tempdir().unwrap();
    let ck = dir.path().join("ck.json");
    let ck = ck.to_str().unwrap();
    let args = ["branch", "--a-max", "0.04", "--steps", "2", "--modes", "8", "--quad-rel-tol", "1e-6", "--checkpoint", ck];
    let full = fracgeo(&args);
    assert!(full.status.success(), "{}", String::from_utf8_lossy(&full.stderr));
    let csv = String::from_utf8(full.stdout.clone()).unwrap();
    assert_eq!(csv.lines().count(), 4);
    assert!(column(&csv, "residual").iter().all(|r| *r < 1e-6));

    // drop the last point as if the run had been interrupted
    let mut state: Value = serde_json::from_str(&std::fs::read_to_string(ck).unwrap()).unwrap();
    assert_eq!(state["points"].as_array().unwrap().len(), 3);
    state["points"].as_array_mut().unwrap().pop();
    std::fs::write(ck, serde_json::to_string(&state).unwrap()).unwrap();
    let resumed = fracgeo(&args);
    assert!(resumed.status.success());
    assert_eq!(resumed.stdout, full.stdout);

    let other = fracgeo(&["branch", "--a-max", "0.05", "--steps", "2", "--modes", "8", "--checkpoint", ck]);
    assert_eq!(other.status.code(), Some(2));
}
