use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data/corpus.json")
}

fn famalg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_famalg")).args(args).output().expect("binary runs")
}

fn with_workspace(text: &str, args: &[&str]) -> Output {
    let dir = std::env::temp_dir().join(format!("famalg-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(format!("{:016x}.json", fxhash(text, args)));
    std::fs::write(&path, text).unwrap();
    let mut all = vec!["--workspace", path.to_str().unwrap()];
    all.extend_from_slice(args);
    famalg(&all)
}

fn fxhash(text: &str, args: &[&str]) -> u64 {
    use std::hash::{Hash, Hasher};
    let mut h = std::collections::hash_map::DefaultHasher::new();
    (text, args).hash(&mut h);
    h.finish()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const SMALL: &str = r#"{
    "semigroups": {"one": {"builtin": "trivial"}},
    "algebras": {"k": {"builtin": "field"}, "X": {"builtin": "nilpotent_x"}},
    "families": {
        "idk": {"kind": "rota_baxter", "semigroup": "one", "algebra": "k", "builtin": "identity"},
        "dk": {"kind": "derivation", "semigroup": "one", "algebra": "X", "constant": [["1", "0"], ["0", "2"]]}
    },
    "family_algebras": {
        "ns0": {"kind": "ns", "semigroup": "one", "prec": [[[["0"]]]], "succ": [[[["0"]]]], "vee": [[[["0"]]]]}
    }
}"#;

#[test]
fn corpus_commands_all_pass() {
    let out = famalg(&["--workspace", corpus().to_str().unwrap(), "--out", "json"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["passed"], Value::Bool(true));
    assert!(v["reports"].as_array().unwrap().len() >= 15);
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let path = corpus();
    let args = ["--workspace", path.to_str().unwrap(), "--out", "json"];
    let a = famalg(&args);
    let b = famalg(&args);
    assert_eq!(a.stdout, b.stdout);
    let args = ["--workspace", path.to_str().unwrap(), "--cmd", "cohomology", "--object", "N", "--seed", "11"];
    assert_eq!(famalg(&args).stdout, famalg(&args).stdout);
}

#[test]
fn failing_verdict_exits_one_with_witness() {
    let out = with_workspace(SMALL, &["--cmd", "validate", "--object", "idk", "--out", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    let verdicts = v["reports"][0]["verdicts"].as_array().unwrap();
    let last = verdicts.last().unwrap();
    assert_eq!(last["passed"], Value::Bool(false));
    assert_eq!(last["witness"]["elements"], serde_json::json!([0, 0]));
    assert_eq!(last["witness"]["basis"], serde_json::json!([0, 0]));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let out = with_workspace(SMALL, &["--cmd", "validate", "--object", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("nope"));

    let dangling = r#"{"semigroups": {"one": {"builtin": "trivial"}},
        "families": {"R": {"kind": "rota_baxter", "semigroup": "one", "algebra": "nope", "builtin": "zero"}}}"#;
    let out = with_workspace(dangling, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("families.R.algebra"));

    let bad_rational = r#"{"algebras": {"A": {"mult": [[["1/0"]]]}}}"#;
    let out = with_workspace(bad_rational, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("algebras.A.mult"));

    let out = famalg(&["--workspace", "/nonexistent/ws.json"]);
    assert_eq!(out.status.code(), Some(2));
    let out = famalg(&["--cmd", "validate"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn constructor_precondition_failure_is_reported() {
    let out = with_workspace(SMALL, &["--cmd", "construct", "--recipe", "reynolds-from-derivation", "--args", "dk", "--out", "json"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json(&out);
    assert!(v["reports"][0]["error"].as_str().unwrap().contains("nilpotent"));
}

#[test]
fn search_on_the_field_finds_only_zero() {
    let out = with_workspace(
        SMALL,
        &["--cmd", "search", "--target", "rota_baxter", "--semigroup", "one", "--algebra", "k", "--coeffs", "0,1", "--out", "json"],
    );
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["reports"][0]["search"]["hits"], serde_json::json!([[[["0"]]]]));
    assert_eq!(v["reports"][0]["search"]["space_size"], serde_json::json!(2));
}

#[test]
fn zero_ns_family_has_cohomology_equal_to_cochains() {
    let out = with_workspace(SMALL, &["--cmd", "cohomology", "--object", "ns0", "--n-max", "2", "--out", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    for row in v["reports"][0]["cohomology"]["rows"].as_array().unwrap() {
        assert_eq!(row["dim_cohomology"], row["dim_cochains"]);
    }
}

#[test]
fn text_output_has_a_degree_table() {
    let out = famalg(&["--workspace", corpus().to_str().unwrap(), "--cmd", "cohomology", "--object", "T0", "--n-max", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("dim H"));
    assert_eq!(text.lines().filter(|l| l.trim_end().ends_with(" 1") && l.trim_start().starts_with(char::is_numeric)).count(), 4);
}
