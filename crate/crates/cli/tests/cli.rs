use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_verma-critical"));
    c.env_remove("VERMA_CRITICAL_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn full_run_passes_and_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let base = ["run", "--algebra", "sl2", "--level", "critical", "--smax", "3", "--suite", "all", "--out"];
    let o = run(&[&base[..], &[a.to_str().unwrap()]].concat());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o2 = bin().args([&base[..], &[b.to_str().unwrap(), "--threads", "1"]].concat()).output().unwrap();
    assert_eq!(o2.status.code(), Some(0));
    let ra = std::fs::read(a.join("report.json")).unwrap();
    assert_eq!(ra, std::fs::read(b.join("report.json")).unwrap());
    assert_eq!(std::fs::read(a.join("summary.txt")).unwrap(), std::fs::read(b.join("summary.txt")).unwrap());
    let rep = read_json(&a.join("report.json"));
    assert_eq!(rep["pass"], Value::Bool(true));
    assert_eq!(rep["suites"].as_object().unwrap().len(), 7);
    assert_eq!(rep["suites"]["thm02"]["layers"][2]["dims"], serde_json::json!([6, 3, 1, 0]));
    assert_eq!(rep["config"]["lambda"][0], serde_json::json!({"n": "1", "d": "7"}));
}

#[test]
fn unknown_algebra_is_a_usage_error() {
    let o = run(&["run", "--algebra", "e8"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("UnknownAlgebra"));
    let o = run(&["run", "--smax", "2", "--hmax", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("hmax"));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn sl21_determinant_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "run", "--algebra", "sl(2|1)", "--smax", "2", "--suite", "shapovalov-det", "--nu-max-delta", "2", "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rep = read_json(&dir.path().join("report.json"));
    let lines = rep["suites"]["shapovalov-det"]["lines"].as_array().unwrap();
    assert_eq!(lines.len(), 3);
    for l in lines {
        for row in l["rows"].as_array().unwrap() {
            assert_eq!(row["match"], Value::Bool(true), "{row}");
        }
    }
}

#[test]
fn failing_check_exits_one() {
    // a non-critical level has no imaginary singular vectors
    let o = run(&["run", "--level", "1/3", "--smax", "1", "--suite", "thm01"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stdout).contains("FAIL"));
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"algebra": "e8", "smax": 1, "suites": ["characters"]}"#).unwrap();
    assert_eq!(run(&["run", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    let out = dir.path().join("o");
    let o = run(&["run", "--config", cfg.to_str().unwrap(), "--algebra", "sl3", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let rep = read_json(&out.join("report.json"));
    assert_eq!(rep["config"]["algebra"], "sl3");
    assert_eq!(rep["config"]["smax"], 1);
    std::fs::write(&cfg, "{\n \"smax\": \"two\"\n}").unwrap();
    let o = run(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn thread_count_does_not_change_reports() {
    let dir = tempfile::tempdir().unwrap();
    let mut reports = Vec::new();
    for t in ["1", "4"] {
        let out = dir.path().join(t);
        let o = bin()
            .env("VERMA_CRITICAL_THREADS", t)
            .args(["run", "--smax", "2", "--suite", "thm02,sum-formula,heisenberg", "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        reports.push(std::fs::read(out.join("report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
    let o = bin().env("VERMA_CRITICAL_THREADS", "many").args(["run", "--smax", "1"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn golden_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r");
    let o = run(&["run", "--smax", "2", "--suite", "thm02", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let report = out.join("report.json");
    let golden = dir.path().join("golden.json");
    let g = |extra: &[&str]| run(&[&["golden", report.to_str().unwrap(), golden.to_str().unwrap()], extra].concat());

    let missing = g(&[]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("golden file missing"));

    assert_eq!(g(&["--regenerate"]).status.code(), Some(0));
    assert_eq!(g(&[]).status.code(), Some(0));

    let mut v = read_json(&golden);
    v["suites"]["thm02"]["layers"][2]["dims"][1] = serde_json::json!(99);
    std::fs::write(&golden, serde_json::to_string(&v).unwrap()).unwrap();
    let d = g(&[]);
    assert_eq!(d.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&d.stdout).contains("/suites/thm02/layers/2/dims/1"));
}

#[test]
fn catalog_lists_algebras() {
    let o = run(&["catalog"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 3);
    assert_eq!(run(&["catalog", "--algebra", "g2"]).status.code(), Some(2));
}
