//! End-to-end tests of the binary: golden files, exit codes, determinism.

use std::process::Command;

fn q2() -> Command {
    Command::new(env!("CARGO_BIN_EXE_q2"))
}

fn stdout_of(args: &[&str]) -> (String, Option<i32>) {
    let out = q2().args(args).output().expect("binary runs");
    (String::from_utf8(out.stdout).unwrap(), out.status.code())
}

#[test]
fn golden_chart_t0_t16() {
    let (text, code) = stdout_of(&["e2", "--t-min", "0", "--t-max", "16", "--format", "text"]);
    assert_eq!(code, Some(0));
    let golden = include_str!("golden/chart_t0_t16.txt");
    assert_eq!(text, golden);
    // the headline cell: Z/3 + Z/3 at (s,t) = (1,4)
    assert!(text.contains("3+3"));
}

#[test]
fn golden_delta_weight13() {
    let (text, code) = stdout_of(&[
        "delta", "--eps", "1", "--m", "13", "--window", "12", "--format", "csv",
    ]);
    assert_eq!(code, Some(0));
    let golden = include_str!("golden/delta_eps1_m13.csv");
    assert_eq!(text, golden);
    // printed matrix spot checks mod 81
    assert!(text.contains("\"B[13,1]:3^4\",8,21,17,72,0"));
    assert!(text.contains("\"B[13,3]:3^4\",0,62,56,19,27"));
    assert!(text.contains("\"B[13,5]:3^4\",0,0,0,26,54"));
    assert!(text.contains("# kernel: Z/81<54*D[13,3]+D[13,4]>"));
}

#[test]
fn delta_negative_weight_echelon() {
    let (text, code) = stdout_of(&[
        "delta", "--eps", "0", "--m", "-4", "--window", "8", "--format", "json",
    ]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["echelon_verified"], true);
    assert_eq!(v["kernel"]["summands"].as_array().unwrap().len(), 0);
    assert_eq!(v["kernel_stable"], true);
}

#[test]
fn determinism_byte_identical() {
    let a = stdout_of(&["e2", "--t-min", "-6", "--t-max", "10", "--format", "json"]);
    let b = stdout_of(&["e2", "--t-min", "-6", "--t-max", "10", "--format", "json"]);
    assert_eq!(a, b);
    let a = stdout_of(&[
        "verify",
        "--suite",
        "snf-oracle",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    let b = stdout_of(&[
        "verify",
        "--suite",
        "snf-oracle",
        "--seed",
        "7",
        "--format",
        "json",
    ]);
    assert_eq!(a.0, b.0);
    assert_eq!(a.1, Some(0));
}

#[test]
fn exit_code_contract() {
    // config errors exit 2
    let (_, code) = stdout_of(&["e2", "--t-min", "5", "--t-max", "1"]);
    assert_eq!(code, Some(2));
    let (_, code) = stdout_of(&[
        "e2",
        "--t-min",
        "0",
        "--t-max",
        "1",
        "--window-columns",
        "4",
    ]);
    assert_eq!(code, Some(2));
    let (_, code) = stdout_of(&["delta", "--eps", "0", "--m", "0"]);
    assert_eq!(code, Some(2));
    let (_, code) = stdout_of(&["delta", "--eps", "2", "--m", "5"]);
    assert_eq!(code, Some(2));
    let (_, code) = stdout_of(&["greek", "--family", "gamma", "--max-i", "3"]);
    assert_eq!(code, Some(2));
    let (_, code) = stdout_of(&["verify", "--suite", "bogus"]);
    assert_eq!(code, Some(2));
    // verification failures exit 1: the weight-13 suite carries the honest
    // red relation clause
    let (_, code) = stdout_of(&["verify", "--suite", "m13"]);
    assert_eq!(code, Some(1));
    // passing suites exit 0
    let (_, code) = stdout_of(&["verify", "--suite", "adic"]);
    assert_eq!(code, Some(0));
}

#[test]
fn verify_reports_are_machine_readable() {
    let (text, code) = stdout_of(&["verify", "--suite", "jpow", "--format", "json"]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v["schema"], "anss-q2/v1");
    assert_eq!(v["passed"], true);
    assert!(v["suites"][0]["checks"].as_array().unwrap().len() >= 2);
}

#[test]
fn greek_tables() {
    let (text, code) = stdout_of(&["greek", "--family", "alpha", "--max-i", "3"]);
    assert_eq!(code, Some(0));
    assert!(text.contains("alpha_1"));
    assert!(text.contains("C[1,0]"));
    assert!(text.contains("D[1,0]"));
    // empty table for max-i 0
    let (text, code) = stdout_of(&["greek", "--family", "alpha", "--max-i", "0"]);
    assert_eq!(code, Some(0));
    assert_eq!(text.lines().count(), 1, "header only");
    let (text, code) = stdout_of(&["greek", "--family", "beta", "--max-i", "9"]);
    assert_eq!(code, Some(0));
    for want in [
        "beta_1",
        "beta_6/3,1",
        "theta_3",
        "beta_7/1,1",
        "beta_9/3,2",
        "3*B[10,0]",
    ] {
        assert!(text.contains(want), "{want}");
    }
}

#[test]
fn u_flagged_entry_at_t54() {
    let (text, code) = stdout_of(&[
        "e2", "--t-min", "54", "--t-max", "54", "--s-max", "2", "--format", "json",
    ]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let entries = v["entries"].as_array().unwrap();
    let e1 = entries.iter().find(|e| e["s"] == 1).unwrap();
    assert_eq!(e1["u_flag"], true);
    assert_eq!(e1["provenance"], "window-stable");
    let e2 = entries.iter().find(|e| e["s"] == 2).unwrap();
    assert_eq!(e2["u_flag"], true);
    // the undetermined leftover carries the split B[13,0], B[13,1] summands
    let comps = e2["components"].as_array().unwrap();
    let u2 = comps.iter().find(|c| c["origin"] == "u2-window").unwrap();
    let gens: Vec<String> = u2["group"]["summands"]
        .as_array()
        .unwrap()
        .iter()
        .map(|s| s["gen"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(gens, vec!["B[13,0]", "B[13,1]"]);
}

#[test]
fn odd_degrees_are_empty() {
    let (text, code) = stdout_of(&["e2", "--t-min", "1", "--t-max", "1", "--format", "csv"]);
    assert_eq!(code, Some(0));
    // no s<=1 entries at odd t; only the symbolic higher rows appear
    for line in text.lines().skip(1) {
        let s: i64 = line.split(',').next().unwrap().parse().unwrap();
        assert!(s >= 2, "{line}");
    }
}

#[test]
fn ext_data_ingestion() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ext.json");
    std::fs::write(
        &path,
        r#"{"2,42": [{"order_exp": 1, "label": "Delta^3*beta"}]}"#,
    )
    .unwrap();
    let (text, code) = stdout_of(&[
        "e2",
        "--t-min",
        "42",
        "--t-max",
        "42",
        "--s-max",
        "2",
        "--format",
        "json",
        "--ext-data",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code, Some(0));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let e2 = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .find(|e| e["s"] == 2)
        .unwrap();
    // the ingested class resolves the symbolic summand
    let comps = e2["components"].as_array().unwrap();
    let ext = comps.iter().find(|c| c["origin"] == "ext").unwrap();
    assert!(ext["symbolic"].is_null());
    assert_eq!(ext["group"]["summands"][0]["order"], 1);
}

#[test]
fn out_dir_env_var() {
    let dir = tempfile::tempdir().unwrap();
    let out = q2()
        .args(["e2", "--t-min", "0", "--t-max", "4", "--out", "chart.txt"])
        .env("Q2_OUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read_to_string(dir.path().join("chart.txt")).unwrap();
    assert!(written.contains("3+3"));
}
