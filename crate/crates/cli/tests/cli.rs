use std::process::{Command, Output};

use serde_json::{json, Value};

fn kinstrata(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kinstrata")).args(args).output().expect("binary runs")
}

fn json_out(args: &[&str]) -> Value {
    let out = kinstrata(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn scratch(name: &str) -> std::path::PathBuf {
    let dir = std::env::temp_dir().join(format!("kinstrata-cli-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

#[test]
fn exit_codes_and_error_json() {
    let missing = kinstrata(&["classify", "/definitely/not/here.json"]);
    assert_eq!(missing.status.code(), Some(2));
    let err: serde_json::Value = serde_json::from_slice(&missing.stderr).unwrap();
    assert_eq!(err["code"], "io");

    let dir = std::env::temp_dir().join(format!("kinstrata-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let bad = dir.join("bad.json");
    std::fs::write(&bad, r#"{"n": 2, "mode": "exact", "upper": ["1", "0", "1"]}"#).unwrap();
    let out = kinstrata(&["classify", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["witness"].is_object(), "{err}");

    let out = kinstrata(&["check", bad.to_str().unwrap(), "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let verdict: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(verdict["mandelstam"], false);
    std::fs::remove_dir_all(&dir).unwrap();

    let n4 = kinstrata(&["examples", "n4", "--point", "-1", "-1", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&n4.stdout).unwrap();
    assert_eq!(v["classification"]["signs"], serde_json::json!({"1": "+", "2": "-", "3": "+", "4": "-"}));
    assert_eq!(v["classification"]["r"], 3);

    let a = kinstrata(&["dim-verify", "--n", "5", "--r", "4", "--mmc", "--format", "csv"]);
    let b = kinstrata(&["dim-verify", "--n", "5", "--r", "4", "--mmc", "--format", "csv"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn sample_output_classifies_back() {
    let dir = scratch("sample");
    let label = dir.join("label.json");
    std::fs::write(&label, r#"{"n": 5, "parts": [[1, 2], [3], [4, 5]], "signs": {"1": "+", "2": "-", "3": "+", "4": "+", "5": "-"}, "r": 3}"#)
        .unwrap();
    let sampled = json_out(&["sample", label.to_str().unwrap(), "--format", "json", "--seed", "4"]);
    let matrix = dir.join("gram.json");
    std::fs::write(&matrix, sampled["gram"].to_string()).unwrap();
    let classified = json_out(&["classify", matrix.to_str().unwrap(), "--format", "json"]);
    assert_eq!(classified["parts"], json!([[1, 2], [3], [4, 5]]));
    assert_eq!(classified["r"], 3);
    let again = json_out(&["sample", label.to_str().unwrap(), "--format", "json", "--seed", "4"]);
    assert_eq!(sampled, again);
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn seed_from_environment() {
    let dir = scratch("env");
    let label = dir.join("label.json");
    std::fs::write(&label, r#"{"n": 4, "parts": [[1], [2], [3], [4]], "signs": {"1": "+", "2": "+", "3": "+", "4": "+"}, "r": 3}"#)
        .unwrap();
    let run = |seed: &str| {
        Command::new(env!("CARGO_BIN_EXE_kinstrata"))
            .args(["sample", label.to_str().unwrap(), "--format", "json"])
            .env("STRATA_SEED", seed)
            .output()
            .unwrap()
            .stdout
    };
    assert_eq!(run("12"), run("12"));
    assert_ne!(run("12"), run("13"));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn poset_ideal_below_two_blocks() {
    let below = r#"{"n": 4, "parts": [[1, 2], [3, 4]], "signs": {"1": "+", "2": "+", "3": "+", "4": "+"}}"#;
    let poset = json_out(&["poset", "--n", "4", "--r", "2", "--region", "lorentzian", "--below", below, "--format", "json"]);
    assert_eq!(poset["vertices"].as_array().unwrap().len(), 9);
    assert_eq!(poset["edges"].as_array().unwrap().len(), 12);
}

#[test]
fn five_particle_census_and_boundary() {
    let census = json_out(&["examples", "n5", "--census", "--format", "json"]);
    assert_eq!(census["region_count"], 332);
    assert_eq!(census["consistent_count"], 10);
    let boundary = json_out(&["examples", "n5", "--boundary", "--format", "json"]);
    assert_eq!(boundary["quartic"], "0");
    assert_eq!(boundary["rank"], 3);
}

#[test]
fn count_reports_empty_cells() {
    let out = kinstrata(&["count", "--n", "5", "--r", "3", "--d", "8", "--format", "csv"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "d,r,fixed,all\n8,3,0,0\n");
}

#[test]
fn bruteforce_flag_agrees() {
    let out = kinstrata(&["census", "--n", "5", "--region", "mmc", "--check-bruteforce", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn csv_on_a_verdict_is_a_usage_error() {
    let dir = scratch("usage");
    let m = dir.join("m.json");
    std::fs::write(&m, r#"{"n": 2, "mode": "exact", "upper": ["0", "1", "0"]}"#).unwrap();
    let out = kinstrata(&["check", m.to_str().unwrap(), "--format", "csv"]);
    assert_eq!(out.status.code(), Some(2));
    std::fs::remove_dir_all(&dir).unwrap();
}
