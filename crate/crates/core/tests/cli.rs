use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;
use su3paths::cells::CELLS_DIR_ENV;
use su3paths::graphs::builtin_graph;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_su3paths"));
    c.env_remove(CELLS_DIR_ENV);
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is json")
}

#[test]
fn fusion_table_succeeds() {
    let o = run(&["fusion", "table", "a2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(!o.stdout.is_empty());
}

#[test]
fn essential_mixed_fundamental_pair() {
    let o = run(&["essential", "a2", "--type", "1,1", "--from", "3", "--to", "3", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["dim"], 2);
    let words: Vec<_> = v["words"].as_array().unwrap().iter().map(|w| w["word"].as_str().unwrap()).collect();
    assert_eq!(words, ["sb", "bs"]);
}

#[test]
fn report_is_deterministic() {
    let a = run(&["report", "a2", "--json"]);
    let b = run(&["report", "a2", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json(&a)["passed"], true);
}

#[test]
fn unknown_command_prints_usage() {
    let o = run(&["bogus"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("Usage"));
}

fn cell_file(cells: Value) -> String {
    serde_json::json!({ "graph": "a2", "cells": cells, "residuals": {}, "seed": 0 }).to_string()
}

#[test]
fn zero_cells_break_the_relations() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("zero.json");
    let cells = ["1 3 3b", "3b 8 6b", "3b 8 3", "3 6 8"]
        .iter()
        .map(|t| {
            let tri: Vec<_> = t.split(' ').collect();
            serde_json::json!({ "tri": tri, "re": 0.0, "im": 0.0 })
        })
        .collect::<Vec<_>>();
    std::fs::write(&f, cell_file(Value::from(cells))).unwrap();
    let o = run(&["report", "a2", "--cells", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("H1"));
}

#[test]
fn e5_keeps_every_relation_but_h1() {
    let o = run(&["verify", "tl", "e5", "--json"]);
    assert_eq!(o.status.code(), Some(1));
    let v = json(&o);
    for r in v["relations"].as_array().unwrap() {
        let name = r["name"].as_str().unwrap();
        let passed = r["passed"].as_bool().unwrap();
        match name {
            "H1" => assert!(!passed),
            "H3" | "H4" | "cup_cap" => assert!(passed, "{name}"),
            _ => {}
        }
    }
}

fn solve_to(dir: &Path, name: &str) -> std::path::PathBuf {
    let f = dir.join(format!("{name}.json"));
    let o = run(&["cells", "solve", name, "--seed", "0", "--out", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    f
}

#[test]
fn cells_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let f = solve_to(dir.path(), "a2");
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("cells/a2.json");
    assert_eq!(std::fs::read(&f).unwrap(), std::fs::read(shipped).unwrap());
    let o = run(&["cells", "verify", "a2", "--in", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));

    let mut v: Value = serde_json::from_slice(&std::fs::read(&f).unwrap()).unwrap();
    v["cells"][0]["re"] = Value::from(1.5);
    std::fs::write(&f, v.to_string()).unwrap();
    let o = run(&["cells", "verify", "a2", "--in", f.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("checksum"));
}

#[test]
fn graph_file_matches_builtin() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("g.json");
    let g = builtin_graph("a2").unwrap();
    std::fs::write(&f, serde_json::to_string(&g.to_file()).unwrap()).unwrap();
    let a = run(&["--graph-file", f.to_str().unwrap(), "graphs", "show", "--json"]);
    let b = run(&["graphs", "show", "a2", "--json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(json(&a), json(&b));

    let o = run(&["--graph-file", f.to_str().unwrap(), "graphs", "show", "e5"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cells_dir_override() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("a2.json");
    std::fs::write(&f, cell_file(Value::Array(vec![]))).unwrap();
    let o = bin()
        .args(["verify", "tl", "a2"])
        .env(CELLS_DIR_ENV, dir.path())
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("missing cells"));
    let o = run(&["verify", "tl", "a2"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn paths_csv() {
    let o = run(&["paths", "enumerate", "a2", "--from", "1", "--to", "1", "--word", "sb", "--format", "csv"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("index,path"));
    assert_eq!(lines.next(), Some("0,(1 3 1)"));
    assert_eq!(lines.next(), None);
}

#[test]
fn factorize_json() {
    let o = run(&["factorize", "a2", "--path", "1,3,8,6b", "--word", "sbs", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["core"], "(1 3 8 6b)");
    assert_eq!(v["replay"]["reconstructed"], true);

    let o = run(&["factorize", "a2", "--path", "1,3,3b,1", "--word", "sss", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    assert_eq!(v["replay"]["reconstructed"], true);
    assert!(!v["peels"].as_array().unwrap().is_empty());
}
