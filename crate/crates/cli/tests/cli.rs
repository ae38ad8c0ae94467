use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn lamicone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lamicone"))
        .env_remove("LAMICONE_HORIZON")
        .args(args)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let args = ["analyze", "builtin", "example-4.5", "--horizon", "40"];
    assert_eq!(lamicone(&args).stdout, lamicone(&args).stdout);
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.json", r#"{"stages": [[["1/2","1/3"],["1/2","2/3"]]]}"#);
    assert_eq!(lamicone(&["realize", &f, "--arcs"]).stdout, lamicone(&["realize", &f, "--arcs"]).stdout);
}

#[test]
fn header_lists_defaults() {
    let v = json(&lamicone(&["analyze", "example-4.3"]));
    assert_eq!(v["defaults"]["horizon"], 50);
    assert_eq!(v["defaults"]["tol"], "1/1000000000");
    assert_eq!(v["parameters"]["horizon"], 50);
}

#[test]
fn horizon_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_lamicone"))
        .env("LAMICONE_HORIZON", "7")
        .args(["analyze", "example-4.3"])
        .output()
        .unwrap();
    assert_eq!(json(&out)["parameters"]["horizon"], 7);
}

#[test]
fn negative_findings_exit_zero() {
    let v = json(&lamicone(&["analyze", "nobase-4.6", "--horizon", "20"]));
    let kinds: Vec<&str> = v["certificates"].as_array().unwrap().iter().map(|c| c["kind"].as_str().unwrap()).collect();
    assert_eq!(kinds[0], "base-criterion-fails");
    assert_eq!(kinds[2], "no-collapse-within-horizon");
}

#[test]
fn malformed_file_reports_position() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", "{\"dims\": [1,\n 2,");
    let out = lamicone(&["analyze", &f]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
}

#[test]
fn explicit_system_file() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(
        dir.path(),
        "sys.json",
        r#"{"dims": [2, 2, 2], "matrices": [[[1, 1], [0, 1]], [["1", "0"], ["1", "1"]]]}"#,
    );
    let v = json(&lamicone(&["analyze", &f]));
    assert_eq!(v["system"]["file"], f.as_str());
    // explicit systems stop at their last stage
    assert_eq!(v["certificates"][0]["query"]["horizon"], 3);
}

#[test]
fn approx_worked_example_and_bad_epsilon() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "m.json", r#"[["1/2","1/3"],["1/2","2/3"]]"#);
    let v = json(&lamicone(&["approx", &f, "--eps", "1/10"]));
    assert_eq!(v["approximation"]["K"], "11");
    assert_eq!(v["approximation"]["matrix"], serde_json::json!([["11", "7"], ["11", "15"]]));
    let out = lamicone(&["approx", &f, "--eps", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("epsilon must be positive"));
}

#[test]
fn approx_single_row_is_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "m.json", "[[1, 1, 1]]");
    let v = json(&lamicone(&["approx", &f]));
    assert_eq!(v["approximation"]["K"], "1");
    assert_eq!(v["approximation"]["max_error"], "0");
}

#[test]
fn realize_writes_one_drawing_per_stage() {
    let dir = tempfile::tempdir().unwrap();
    let m = r#"[["1/2","1/3"],["1/2","2/3"]]"#;
    let f = write(dir.path(), "s.json", &format!(r#"{{"stages": [{m}, {m}, {m}]}}"#));
    let svg = dir.path().join("svg");
    let v = json(&lamicone(&["realize", &f, "--svg", svg.to_str().unwrap()]));
    assert_eq!(v["pipeline"]["stages"].as_array().unwrap().len(), 3);
    assert_eq!(v["arcs"].as_array().unwrap().len(), 3);
    for n in 0..=3 {
        let text = std::fs::read_to_string(svg.join(format!("stage-{n}.svg"))).unwrap();
        assert!(text.contains(r#"viewBox="0 0 512 512""#));
    }
}

#[test]
fn realize_arcs_only_reference_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "odd.json", "[[1, 1, 3, 1], [3, 1, 3, 1], [1, 3, 1, 1]]");
    let v = json(&lamicone(&["realize", &f, "--arcs-only"]));
    assert_eq!(v["arcs"][0]["sizes"], serde_json::json!([6, 8, 6]));
    assert_eq!(v["arcs"][0]["roundtrip"]["ok"], true);
}

#[test]
fn realize_rejects_empty_and_even_input() {
    let dir = tempfile::tempdir().unwrap();
    let empty = write(dir.path(), "e.json", r#"{"stages": []}"#);
    assert_eq!(lamicone(&["realize", &empty]).status.code(), Some(3));
    let even = write(dir.path(), "even.json", "[[2, 1]]");
    assert_eq!(lamicone(&["realize", &even, "--arcs-only"]).status.code(), Some(3));
}

#[test]
fn example_exit_codes() {
    let out = lamicone(&["example", "zero-measure-8.1"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["failed"], 0);
    assert_eq!(lamicone(&["example", "unknown-name"]).status.code(), Some(2));
    let text = lamicone(&["--format", "text", "example", "example-4.4"]);
    assert!(String::from_utf8_lossy(&text.stdout).contains("maps to (1/2, 1/2, 0)"));
}
