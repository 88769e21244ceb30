//! End-to-end runs of the command-line binary.

use std::path::PathBuf;
use std::process::{Command, Output};

fn data(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "data", name].iter().collect();
    p.to_string_lossy().into_owned()
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drinfeld-reps")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn datum_check_reports_counts() {
    let o = run(&["--format", "json", "datum", "check", &data("datum_b.json")]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["n"], 2);
    assert_eq!(v["m"], 2);
    assert_eq!(v["counts"]["1"], 4);
    assert_eq!(v["counts"]["2"], 12);
}

#[test]
fn invalid_input_exits_two() {
    let o = run(&["datum", "check", &data("datum_invalid.json")]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
    let o = run(&["datum", "check", "/nonexistent/datum.json"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["module", "build", &data("datum_b.json"), "--family", "W1", "--l", "1", "--lambda", "[0;0]", "--eta", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["no-such-command"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn build_verify_analyze_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("m.json");
    let file_s = file.to_string_lossy().into_owned();
    let o = run(&[
        "module", "build", &data("datum_b.json"), "--family", "Mt", "--l", "1", "--lambda", "[0;0]", "--t", "2",
        "--eta", "-1/2", "--out", &file_s,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(run(&["module", "verify", &file_s]).status.code(), Some(0));

    let o = run(&["--format", "json", "module", "analyze", &file_s, "--etas", "-1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["dim"], 8);
    assert_eq!(v["end_local_dim"], 1);
    assert_eq!(v["family"]["family"], "Mt");

    let o = run(&["--format", "json", "module", "compare", &file_s, &file_s]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["verdict"], "yes");
}

#[test]
fn tampered_module_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let file = dir.path().join("p.json");
    let file_s = file.to_string_lossy().into_owned();
    let o = run(&["module", "build", &data("datum_a.json"), "--family", "P", "--l", "1", "--lambda", "[0;0]", "--out", &file_s]);
    assert_eq!(o.status.code(), Some(0));
    let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&file).unwrap()).unwrap();
    // the scalar shorthand accepts a bare integer
    v["matrices"]["x"]["entries"][1][0] = serde_json::json!(7);
    std::fs::write(&file, serde_json::to_string(&v).unwrap()).unwrap();
    let o = run(&["module", "verify", &file_s]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn ar_check_passes_on_small_datum() {
    let o = run(&["ar", "check", &data("datum_a.json"), "--etas", "1,0,inf"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
}

#[test]
fn classify_is_reproducible() {
    let args = ["--format", "json", "--seed", "7", "classify", &data("datum_c.json"), "--max-t", "1", "--max-s", "1"];
    let a = run(&args);
    let b = run(&[&args[..], &["--jobs", "3"]].concat());
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["all_pass"], true);
    assert_eq!(v["all_distinct"], true);
}
