use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn radolab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_radolab")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let out = radolab(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("json report")
}

#[test]
fn decide_density_not_regular() {
    let r = report(&["decide", "--poly", "0,0,1", "--coeffs", "1,1,1,-1,-1", "--b", "0", "--mode", "dr"]);
    assert_eq!(r["result"]["status"], "NotRegular");
    assert_eq!(r["schema_version"], 1);
    assert_eq!(r["config"]["command"], "decide");
}

#[test]
fn aux_and_roots_examples() {
    let r = report(&["aux", "--poly", "-1,0,1", "--D", "3"]);
    assert_eq!(r["result"]["lambda"], 3);
    assert_eq!(r["result"]["r"], -2);
    assert_eq!(r["result"]["PD"], "1,-4,3");
    let r = report(&["roots", "--poly", "-1,0,1", "--mod", "15"]);
    assert_eq!(r["result"]["count"], 4);
}

#[test]
fn exit_codes() {
    assert_eq!(radolab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(radolab(&["roots", "--poly", "-1,0,1"]).status.code(), Some(2));
    let out = radolab(&["aux", "--poly", "1,0,1", "--D", "2"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no p-adic zero"));
    assert_eq!(radolab(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_persist_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let args = ["--out", out, "moments", "--poly", "0,0,1", "--T", "2", "--X", "40", "--parseval"];
    let first = report(&args);
    let second = report(&args);
    assert_eq!(first["config_hash"], second["config_hash"]);
    let hash = first["config_hash"].as_str().unwrap();
    let path = dir.path().join(format!("{hash}.jsonl"));
    let text = fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().count(), 2);

    let replay = report(&["replay", "--report", path.to_str().unwrap()]);
    assert_eq!(replay["replayed"], 2);

    let tampered = text.replacen("\"count\":\"", "\"count\":\"1", 1);
    let bad = dir.path().join("bad.jsonl");
    fs::write(&bad, tampered).unwrap();
    let out = radolab(&["replay", "--report", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn csv_output() {
    let out = radolab(&["--format", "csv", "aux", "--poly", "-1,0,1", "--D", "3"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("key,value\n"));
    assert!(text.contains("lambda,3\n"));
    assert!(text.contains("PD,\"1,-4,3\"\n"));
}

#[test]
fn bohr_bitmask_and_growth() {
    let dir = tempfile::tempdir().unwrap();
    let mask = dir.path().join("mask.txt");
    let r = report(&["bohr", "--poly", "0,1", "--theta", "1/2", "--rho", "0.26", "--Z", "10", "--bitmask", mask.to_str().unwrap()]);
    assert_eq!(r["result"]["size"], 5);
    assert_eq!(fs::read_to_string(&mask).unwrap().trim(), "0101010101");
    let r = report(&["bohr", "--poly", "0,0,1", "--rho", "0.1", "--Z", "10", "--eta", "1/2", "--D", "1", "--M", "10"]);
    assert_eq!(r["result"]["lhs"], "25");
    assert_eq!(r["result"]["rhs"], "400");
    assert_eq!(r["result"]["holds"], true);
}

#[test]
fn count_over_colouring_file() {
    let dir = tempfile::tempdir().unwrap();
    let col = dir.path().join("col.csv");
    let rows: String = (1..=30).map(|n| format!("{n},{}\n", n % 2 + 1)).collect();
    fs::write(&col, format!("n,class\n{rows}")).unwrap();
    let r = report(&["count", "--poly", "0,0,1", "--coeffs", "1,-1", "--colouring-file", col.to_str().unwrap()]);
    assert_eq!(r["result"]["counts"], serde_json::json!(["15", "15"]));
    let r = report(&["count", "--poly", "0,0,1", "--coeffs", "1,1,-1", "--N", "20", "--filter", "distinct"]);
    // Pythagorean triples up to 20, both orders of the legs
    assert_eq!(r["result"]["count"], "12");
}

#[test]
fn experiments() {
    let r = report(&["experiment", "--kind", "diagonal", "--poly", "0,0,1", "--coeffs", "1,1,-1,-1,1", "--N", "20,40,80", "--equal", "1,2"]);
    assert_eq!(r["result"]["decreasing"], true);
    let r = report(&["experiment", "--kind", "sharpness", "--poly", "0,0,1", "--N", "256", "--l1", "1,-1", "--l2", "2"]);
    assert_eq!(r["result"]["counts"], serde_json::json!(["0", "22"]));
    let r = report(&[
        "experiment", "--kind", "supersaturation", "--poly", "0,0,1", "--coeffs", "1,1,1,-1,-1,-1", "--N", "30", "--trials", "3", "--seed", "5",
    ]);
    assert!(r["result"]["min_ratio"].as_f64().unwrap() > 0.0);
    let out = radolab(&["experiment", "--kind", "supersaturation", "--poly", "0,0,1", "--coeffs", "1,1,-1", "--N", "30"]);
    assert_eq!(out.status.code(), Some(1));
}
