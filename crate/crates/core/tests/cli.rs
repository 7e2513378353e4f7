use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("examples").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strongcert"))
        .args(args)
        .env("STRONGCERT_THREADS", "1")
        .output()
        .unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(run(&[]).status.code(), Some(1));
    assert_eq!(run(&["certify"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    assert_eq!(run(&["--version"]).status.code(), Some(0));
}

#[test]
fn malformed_input_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("missing_m.json", r#"{"n": 2, "H": []}"#),
        ("not_json.json", "H = [[1]]"),
        ("ragged.json", r#"{"n": 2, "m": 1, "H": [[[1, 0], [0]]]}"#),
        ("wrong_n.json", r#"{"n": 3, "m": 1, "H": [[[1, 0], [0, 1]]]}"#),
        ("nan.json", r#"{"n": 1, "m": 1, "H": [[["NaN"]]]}"#),
    ];
    for (name, text) in cases {
        let p = dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        let out = run(&["scan", p.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(1), "{name}");
        assert!(String::from_utf8_lossy(&out.stderr).starts_with("error:"), "{name}");
    }
    assert_eq!(run(&["scan", "/does/not/exist.json"]).status.code(), Some(1));
    let n3m2 = example("n3m2.json");
    assert_eq!(run(&["certify", n3m2.to_str().unwrap(), "--gamma=-1"]).status.code(), Some(1));
}

#[test]
fn certify_verdicts_and_exit_codes() {
    let n3m2 = example("n3m2.json");
    let n3m2 = n3m2.to_str().unwrap();
    let out = run(&["certify", n3m2, "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "StronglyStable");

    let out = run(&["certify", n3m2, "--gamma", "0.750", "--no-timing"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!json(&out)["verdict"].as_str().unwrap().starts_with("Strongly"));

    let n4m4 = example("n4m4.json");
    let out = run(&["certify", n4m4.to_str().unwrap(), "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["verdict"], "Unstable");
}

#[test]
fn reports_without_timing_are_reproducible() {
    let n3m2 = example("n3m2.json");
    let args = ["certify", n3m2.to_str().unwrap(), "--no-timing"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    assert!(json(&a).get("timings").is_none());
    let timed = run(&["certify", n3m2.to_str().unwrap()]);
    assert!(json(&timed).get("timings").is_some());
}

#[test]
fn scan_export_and_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let n3m2 = example("n3m2.json");
    let n3m2 = n3m2.to_str().unwrap();

    let csv = dir.path().join("surface.csv");
    let out = run(&["scan", n3m2, "--points", "36", "--surface", csv.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(json(&out)["gamma0_scan"].as_f64().unwrap() > 0.7);
    assert_eq!(std::fs::read_to_string(&csv).unwrap().lines().count(), 37);

    let sdpa = dir.path().join("n3m2.dat-s");
    let report = dir.path().join("export.json");
    let out = run(&[
        "export",
        n3m2,
        "-o",
        sdpa.to_str().unwrap(),
        "--out",
        report.to_str().unwrap(),
        "--feasibility",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(v["S"], 48);
    let text = std::fs::read_to_string(&sdpa).unwrap();
    assert_eq!(text.lines().nth(2), Some("96"));

    let out = run(&["bounds", n3m2, "--k-max", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(json(&out)["bounds"].as_array().unwrap().len(), 2);
}

#[test]
fn bisect_brackets_scan_estimate() {
    let n3m2 = example("n3m2.json");
    let out = run(&["bisect", n3m2.to_str().unwrap(), "--tol", "1e-3", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let b = &v["certified_bracket"];
    let (lo, hi) = (b["lo"].as_f64().unwrap(), b["hi"].as_f64().unwrap());
    assert!((lo - 0.7507033).abs() < 1e-6 && lo < hi && hi - lo <= 1e-3, "{lo} {hi}");
    assert_eq!(b["lo_evidence"].as_object().map(|o| o.contains_key("Witness")), Some(true));
}
