use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_planimetric");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("JSON report")
}

fn path_arg(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn disc_distance_report() {
    let out = run(&["distance", "--domain", r#"{"type":"disc"}"#, "--z", "0", "--w", "0.5", "--metric", "bergman"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    let d = &report["outcome"]["distance"];
    // √2 atanh(1/2)
    assert!((d["value"].as_f64().unwrap() - 0.776_836_199_212_093_2).abs() < 1e-12);
    assert_eq!(d["method"], "ClosedForm");
    assert_eq!(report["config"]["options"]["resolution"], 64);
    assert_eq!(report["config"]["seed"], 0);
}

#[test]
fn missing_w_exits_2_with_one_line() {
    let out = run(&["distance", "--z", "0"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_inputs_exit_2() {
    for args in [
        &["metric", "--z", "0", "--domain", r#"{"type":"annulus","r":2}"#][..],
        &["metric", "--z", "1+1i"],
        &["metric", "--z", "zero"],
        &["certify", "--suite", "lemma4", "--domain", r#"{"type":"annulus","r":0.25}"#],
        &["certify", "--suite", "prop3", "--ladder", "1e-4"],
        &["sweep", "--regime", "medium"],
    ] {
        let out = run(args);
        assert_eq!(code(&out), 2, "{args:?}: {}", stderr(&out));
        assert_eq!(stderr(&out).trim_end().lines().count(), 1);
    }
}

#[test]
fn engine_and_io_errors_exit_3() {
    let out = run(&["metric", "--domain", r#"{"type":"annulus","r":0.25}"#, "--z", "0.9999999999"]);
    assert_eq!(code(&out), 3, "{}", stderr(&out));
    let out = run(&["metric", "--z", "0.5", "--out", "/nonexistent-dir/report.json"]);
    assert_eq!(code(&out), 3);
}

#[test]
fn engine_error_report_records_the_failure() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = run(&[
        "distance", "--domain", r#"{"type":"annulus","r":0.25}"#, "--z", "0.9999999999", "--w", "0.5", "--out",
        path_arg(&path),
    ]);
    assert_eq!(code(&out), 3);
    let report: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["passed"], false);
    assert!(report["outcome"]["error"]["message"].as_str().unwrap().contains("floor"));
}

#[test]
fn lemma4_certificate_passes() {
    let out = run(&["certify", "--suite", "lemma4", "--domain", r#"{"type":"disc"}"#, "--seed", "1"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let report = json(&out);
    let cert = &report["outcome"]["certificates"][0];
    assert!(cert["worst_margin"].as_f64().unwrap() >= -1e-12);
    assert_eq!(cert["claims"], serde_json::json!(["Lemma4a", "Lemma4b"]));
    assert!(cert["sample_count"].as_u64().unwrap() >= 10_000);
}

#[test]
fn prop3_csv_on_the_annulus() {
    let out = run(&["certify", "--suite", "prop3", "--domain", r#"{"type":"annulus","r":0.25}"#, "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "claim_id,domain,seed,sample_id,z_re,z_im,w_re,w_im,value,bound_lo,bound_hi,margin"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.iter().all(|r| r.starts_with("Prop3,annulus(r=0.25),0,")));
    assert!(stderr(&out).contains("PASS"));
}

#[test]
fn empty_result_set_is_header_only() {
    let out = run(&["certify", "--suite", "prop1", "--per-rung", "0", "--format", "csv"]);
    assert_eq!(code(&out), 0, "{}", stderr(&out));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "claim_id,domain,seed,sample_id,z_re,z_im,w_re,w_im,value,bound_lo,bound_hi,margin\n"
    );
}

#[test]
fn one_distance_is_one_row() {
    let out = run(&["distance", "--z", "0.1+0.2i", "--w-re", "-0.3", "--w-im", "0.05", "--metric", "kobayashi", "--format", "csv"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[1].starts_with("kobayashi,disc,0,0,0.1,0.2,-0.3,0.05,"));
}

#[test]
fn failed_certificate_exits_1() {
    // k grows like log log 1/|w| near the puncture, too slowly for the
    // per-decade increment the check demands
    let out = run(&["certify", "--suite", "isolated", "--domain", r#"{"type":"punctured_disc"}"#]);
    assert_eq!(code(&out), 1, "{}", stderr(&out));
    let report = json(&out);
    assert_eq!(report["passed"], false);
    assert!(stderr(&out).contains("k_increment"));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = run(&[
            "certify", "--suite", "prop1", "--domain", r#"{"type":"conformal","coeffs":[0.2]}"#, "--seed", "7",
            "--format", "csv", "--out", path_arg(p),
        ]);
        assert_eq!(code(&out), 0, "{}", stderr(&out));
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn recorded_config_reproduces_the_run() {
    let first = run(&["sweep", "--regime", "small-s,large-s"]);
    assert_eq!(code(&first), 0);
    let report = json(&first);
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, serde_json::to_string(&report["config"]).unwrap()).unwrap();
    let second = run(&["--config", path_arg(&cfg)]);
    assert_eq!(code(&second), 0, "{}", stderr(&second));
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn unknown_config_fields_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"command":"metric","domain":{"type":"disc"},"z":{"re":0,"im":0},"metric":"bergman","seed":0,
            "options":{"resolution":64,"degree":40,"kmax":8},"output":{"path":null,"format":"json"},"verbose":true}"#,
    )
    .unwrap();
    let out = run(&["--config", path_arg(&cfg)]);
    assert_eq!(code(&out), 2, "{}", stderr(&out));
}

#[test]
fn thread_cap_is_validated() {
    let out = Command::new(BIN)
        .args(["metric", "--z", "0"])
        .env("PLANIMETRIC_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    let out = Command::new(BIN)
        .args(["metric", "--z", "0"])
        .env("PLANIMETRIC_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    // β(0) = √2 on the unit disc
    assert!((json(&out)["outcome"]["metric"]["value"].as_f64().unwrap() - std::f64::consts::SQRT_2).abs() < 1e-5);
}

#[test]
fn help_exits_0() {
    let out = run(&["--help"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("certify"));
}
