use std::path::PathBuf;
use std::process::{Command, Output};

use hyperstate::bellcontext::{b3_scenario, bell_value_exact, lhv_min};
use hyperstate::entangle::em_geometric;
use hyperstate::hgqec::{detect_check, enumerate_codes, tuple_codewords, CodeTuple};
use hyperstate::hgraph::make_complete;
use hyperstate::simkit::build_state;
use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hyperstate")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = run(args);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn entangle_em_k33() {
    let r = json(&["entangle", "--em", &path("k33.json")]);
    assert_eq!(r["E_M"], 0.25);
    let lib = em_geometric(&build_state(&make_complete(3, &[3]).unwrap()).unwrap()).unwrap();
    assert!((r["E_M"].as_f64().unwrap() - lib).abs() < 1e-12);
}

#[test]
fn bell_b3_k33() {
    let r = json(&["bell", "--b3", &path("k33.json")]);
    assert_eq!(r["value"], -0.1875);
    assert_eq!(r["lhv_bound"], 0.0);
    assert_eq!(r["value"].to_string(), "-0.1875");
    assert_eq!(r["lhv_bound"].to_string(), "0.0");
    let sc = b3_scenario();
    assert_eq!(r["exact"], bell_value_exact(&make_complete(3, &[3]).unwrap(), &sc).unwrap().to_string());
    assert_eq!(lhv_min(&sc).unwrap(), 0.into());
}

#[test]
fn provenance_fields() {
    let r = json(&["entangle", "--seed", "42", "--em", &path("k33.json")]);
    let p = &r["provenance"];
    assert_eq!(p["seed"], 42);
    assert_eq!(p["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(p["input_sha256"].as_str().unwrap().len(), 64);
}

fn census_rows(csv: &str) -> Vec<(usize, u64, usize, bool)> {
    csv.lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[0].parse().unwrap(), f[1].parse().unwrap(), f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect()
}

#[test]
fn census_golden_n4() {
    let out = run(&["qec-search", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let golden = std::fs::read_to_string(data("census_n4.csv")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
    // every golden row detects all single-qubit errors by direct Knill-Laflamme evaluation
    for (n, m, l, _) in census_rows(&golden) {
        let weights: Vec<usize> = (0..64).filter(|j| m >> j & 1 == 1).collect();
        let t = CodeTuple::new(n, weights, l).unwrap();
        assert!(detect_check(&tuple_codewords(&t).unwrap(), 1).unwrap().pass);
    }
}

#[test]
fn census_n8_has_genuine_code() {
    let out = run(&["qec-search", "--n", "8"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text, std::fs::read_to_string(data("census_n8.csv")).unwrap());
    let rows = census_rows(&text);
    assert!(rows.iter().any(|r| r.3));
    assert_eq!(rows.len(), enumerate_codes(8).unwrap().len());
}

#[test]
fn qec_search_json_format() {
    let r = json(&["qec-search", "--n", "5", "--format", "json"]);
    assert_eq!(r["count"].as_u64().unwrap() as usize, enumerate_codes(5).unwrap().len());
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["bell", &path("k33.json")]).status.code(), Some(1));
    assert_eq!(run(&["entangle", "--em", &path("does-not-exist.json")]).status.code(), Some(2));
    assert_eq!(run(&["mermin", &path("k33.json")]).status.code(), Some(2));
    assert_eq!(run(&["entangle", "--em", "--budget", "nodes=2", &path("k33.json")]).status.code(), Some(3));
    assert_eq!(run(&["magic", "--count", "3", "--format", "dot"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn seeded_runs_reproduce() {
    let a = run(&["randomize", "--scaling", "6,2", "--samples", "50", "--seed", "9"]);
    let b = run(&["randomize", "--scaling", "6,2", "--samples", "50", "--seed", "9"]);
    assert_eq!(a.stdout, b.stdout);
    let c = run(&["randomize", "--scaling", "6,2", "--samples", "50", "--seed", "10"]);
    assert_ne!(a.stdout, c.stdout);
}

#[test]
fn mermin_triangle() {
    let r = json(&["mermin", &path("k3.json")]);
    assert_eq!(r["quantum_value"], 4.0);
    assert_eq!(r["noncontextual_bound"], 2.0);
}

#[test]
fn cv_cell_pipeline() {
    let r = json(&["cv", &path("cell.json"), "--op", "measure-q:5:1/2", "--op", "measure-p:4:7/3"]);
    assert_eq!(r["simplified"], true);
    assert_eq!(r["survivors"], serde_json::json!([1, 2, 3]));
    let doc = &r["document"];
    let edges = doc["edges"].as_array().unwrap();
    let k = edges.iter().position(|e| *e == serde_json::json!([1, 2, 3])).expect("3-edge on survivors");
    assert_eq!(doc["weights"][k], "-4/3");
}

#[test]
fn qudit_closed_form_matches() {
    let r = json(&["qudit", &path("qutrit_k33.json")]);
    assert_eq!(r["E_M"], r["E_M_closed"]);
    assert_eq!(r["stabilizers_verified"], true);
}

#[test]
fn export_dot_and_out_file() {
    let out = run(&["export-dot", &path("k33.json")]);
    let dot = String::from_utf8(out.stdout).unwrap();
    assert!(dot.starts_with("graph hypergraph {"));
    assert_eq!(dot.matches("shape=square").count(), 1);
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("r.json");
    let out = run(&["stab", &path("k33.json"), "--out", target.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(target).unwrap()).unwrap();
    assert_eq!(r["verified"], true);
    assert_eq!(r["generators"][0], "X1 CZ(2,3)");
}

#[test]
fn rewrite_matches_library() {
    let r = json(&["rewrite", &path("k33.json"), "--rule", "x", "--vertex", "1"]);
    let lib = hyperstate::rewrite::rw_x(&make_complete(3, &[3]).unwrap(), 1).unwrap();
    assert_eq!(r["sign"], lib.sign);
    let edges: Vec<Vec<usize>> = serde_json::from_value(r["document"]["edges"].clone()).unwrap();
    assert_eq!(hyperstate::Hypergraph::from_edges(3, &edges).unwrap(), lib.h);
}

#[test]
fn threads_env_is_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_hyperstate"))
        .env("HYPERSTATE_THREADS", "1")
        .args(["qec-search", "--n", "6"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}
