use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

fn tropcyl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tropcyl")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn base_report_for_del_pezzo() {
    let out = tropcyl(&["base", path(&data("del_pezzo.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["fan_closure"], Value::Null);
    assert_eq!(v["positive"], json!(true));
    assert_eq!(v["monodromy_trace"], json!(2));
    assert_eq!(v["monodromy_identity"], json!(false));

    let v = json_of(&tropcyl(&["base", path(&data("p2.json"))]));
    assert_eq!(v["fan_closure"], json!([[1, 0], [0, 1], [-1, -1]]));
    assert_eq!(v["monodromy_identity"], json!(true));
}

#[test]
fn count_report() {
    let out = tropcyl(&["count", "--l", "5", "--m", "3", "--n", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        json_of(&out),
        json!({"l": 5, "m": 3, "n": 2, "count": 10, "oracle": 10, "match": true, "symmetry": true})
    );
    let v = json_of(&tropcyl(&["count", "--l", "2", "--m", "-1", "--n", "1", "--b", "7/3"]));
    assert_eq!(v["spine_count"], json!(2));
    assert_eq!(v["curve_class"], json!({"D_0": 1}));
}

#[test]
fn validate_reports_origin_violation() {
    let out = tropcyl(&["validate", path(&data("del_pezzo.json")), path(&data("origin_vertex.json"))]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["valid"], json!(false));
    let conditions: Vec<&Value> = v["violations"].as_array().unwrap().iter().map(|x| &x["condition"]).collect();
    assert!(conditions.contains(&&json!("avoids_origin")));

    let out = tropcyl(&["validate", path(&data("del_pezzo.json")), path(&data("l201.json"))]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn extension_round_trips_through_files() {
    let out = tropcyl(&["extend", path(&data("del_pezzo.json")), path(&data("l201.json"))]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["extendable"], json!(true));
    assert_eq!(v["curve_class"], json!({"D_2": 1}));
    assert_eq!(v["cylinder"]["legs"].as_array().unwrap().len(), 1);

    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("extended.json");
    std::fs::write(&file, v["extended_spine"].to_string()).unwrap();
    let again = tropcyl(&["validate", path(&data("del_pezzo.json")), file.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(json_of(&again)["valid"], json!(true));
}

#[test]
fn spiral_is_not_extendable() {
    let out = tropcyl(&["extend", path(&data("spiral_base.json")), path(&data("spiral.json")), "--max-steps", "40"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["extendable"], json!(false));
    assert_eq!(v["steps"], json!(40));
}

#[test]
fn malformed_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"self_intersections\": [0, 0]").unwrap();
    assert_eq!(tropcyl(&["base", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(tropcyl(&["base", "/nonexistent/pair.json"]).status.code(), Some(2));
    let out = tropcyl(&["frobnicate"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!out.stderr.is_empty());
}

#[test]
fn trace_accepts_negative_parameters() {
    let out = tropcyl(&["trace", "--l", "2", "--m", "0", "--n", "1", "--b", "1", "--t", "-1,0,1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let planes: Vec<&Value> = v["points"].as_array().unwrap().iter().map(|p| &p["plane"]).collect();
    assert_eq!(planes, vec![&json!(["-2/1", "2/1"]), &json!(["0/1", "1/1"]), &json!(["2/1", "1/1"])]);
}

#[test]
fn table_rows_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("table.json");
    let out = tropcyl(&["table", "--l-max", "2", "--m-range", "-3..0", "--out", file.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    for t in v["tables"].as_array().unwrap() {
        assert_eq!(t["rows"], json!([[1], [1, 1], [1, 2, 1]]));
    }
    assert_eq!(std::fs::read(&file).unwrap(), out.stdout);
    assert_eq!(tropcyl(&["table", "--l-max", "0"]).status.code(), Some(1));
}

#[test]
fn reports_are_byte_deterministic() {
    let (pair, spine) = (data("del_pezzo.json"), data("l201.json"));
    let args = ["extend", path(&pair), path(&spine)];
    assert_eq!(tropcyl(&args).stdout, tropcyl(&args).stdout);
    let args = ["symmetry", "--l", "3", "--m", "-2", "--n", "0"];
    let out = tropcyl(&args);
    assert_eq!(json_of(&out)["symmetry"], json!(true));
    assert_eq!(out.stdout, tropcyl(&args).stdout);
}
