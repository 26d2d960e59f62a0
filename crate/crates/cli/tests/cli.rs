use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn gsdyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gsdyn")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn conjugate_check_passes() {
    let out = gsdyn(&["conjugate", "--weight", "gevrey:2", "--x", "1", "--check", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "pass");
    let phi = v["values"][0]["value"].as_f64().unwrap();
    assert!((phi - 2.0 * (2.0f64.ln() - 1.0)).abs() < 1e-12);
    assert_eq!(v["config"]["command"], "conjugate");
}

#[test]
fn expectations_set_the_exit_code() {
    let args = ["witness", "dilation", "--a", "1", "--l-max", "3", "--format", "json"];
    assert_eq!(code(&gsdyn(&[&args[..], &["--expect", "constant"]].concat())), 0);
    assert_eq!(code(&gsdyn(&[&args[..], &["--expect", "super_geometric"]].concat())), 1);
    let no_verdict = gsdyn(&["poly", "iterate", "--psi", "x^2", "--m", "2", "--expect", "holds"]);
    assert_eq!(code(&no_verdict), 2);
}

#[test]
fn weight_check_single_condition() {
    let out = gsdyn(&["weight-check", "--weight", "logpow:2", "--condition", "zeta", "--expect", "fails", "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["conditions"][0]["condition"], "zeta");
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(code(&gsdyn(&["no-such-command"])), 2);
    assert_eq!(code(&gsdyn(&["conjugate", "--weight", "gevrey:0.5", "--x", "1"])), 2);
    assert_eq!(code(&gsdyn(&["witness", "square", "--s", "1"])), 2);
    assert_eq!(code(&gsdyn(&["conjugate", "--weight", "gevrey:2"])), 2);
}

#[test]
fn normal_form_of_translation() {
    let out = gsdyn(&["poly", "normal-form", "--psi", "x + 7", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["verdict"], "translation");
}

#[test]
fn neutral_fixed_point_exits_3() {
    let out = gsdyn(&["witness", "repelling", "--psi", "x^2 + 1/4", "--x0", "1/2", "--m-max", "12", "--format", "json"]);
    assert_eq!(code(&out), 3);
    assert_eq!(json(&out)["classification"]["verdict"], "inconclusive");
}

#[test]
fn config_file_fills_flags_and_command_line_wins() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "c.json", r#"{"command": "witness square", "s": 3, "m_max": 10}"#);
    let out = gsdyn(&["--config", &cfg, "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let v = json(&out);
    assert_eq!(v["config"]["s"], 3.0);
    assert_eq!(v["config"]["m_max"], 10);
    let out = gsdyn(&["witness", "square", "--m-max", "12", "--config", &cfg, "--format", "json"]);
    assert_eq!(json(&out)["config"]["m_max"], 12);
    let bad = write(dir.path(), "bad.json", "[1, 2]");
    assert_eq!(code(&gsdyn(&["witness", "square", "--config", &bad])), 2);
}

#[test]
fn csv_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sq.csv");
    let out = gsdyn(&["witness", "square", "--m-max", "8", "--format", "csv", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("index,log_value,log_ratio"));
    assert_eq!(lines.count(), 7);
}

#[test]
fn json_output_is_reproducible() {
    let args = ["witness", "translation", "--m-max", "5", "--format", "json"];
    assert_eq!(gsdyn(&args).stdout, gsdyn(&args).stdout);
}

#[test]
fn empty_suite_passes() {
    let dir = tempfile::tempdir().unwrap();
    let s = write(dir.path(), "empty.suite", r#"{"name": "empty", "entries": []}"#);
    let out = gsdyn(&["suite", &s, "--format", "json"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["summary"]["total"], 0);
}

#[test]
fn malformed_suites_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [
        ("syntax.suite", "{"),
        ("field.suite", r#"{"entries": [{"name": "x", "args": [], "bogus": 1}]}"#),
        ("args.suite", r#"{"entries": [{"name": "x", "args": ["witness", "nope"]}]}"#),
        ("nested.suite", r#"{"entries": [{"name": "x", "args": ["suite", "other.suite"]}]}"#),
    ] {
        let s = write(dir.path(), name, text);
        assert_eq!(code(&gsdyn(&["suite", &s])), 2, "{name}");
    }
}

#[test]
fn suite_statuses_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let neutral = r#"{"name": "neutral", "args": ["witness", "repelling", "--psi", "x^2 + 1/4", "--x0", "1/2", "--m-max", "12"]"#;
    let ok = r#"{"name": "unit", "args": ["witness", "dilation", "--a", "-1", "--l-max", "3"], "expect": "constant"}"#;
    let allowed = write(dir.path(), "a.suite", &format!(r#"{{"entries": [{ok}, {neutral}, "allow_inconclusive": true}}]}}"#));
    let out = gsdyn(&["suite", &allowed, "--format", "json", "--brief"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let v = json(&out);
    assert_eq!(v["summary"]["pass"], 1);
    assert_eq!(v["summary"]["inconclusive"], 1);
    assert!(v["entries"][0].get("report").is_none());

    let blocking = write(dir.path(), "b.suite", &format!(r#"{{"entries": [{ok}, {neutral}}}]}}"#));
    assert_eq!(code(&gsdyn(&["suite", &blocking])), 3);

    let wrong = ok.replace("constant", "super_geometric");
    let failing = write(dir.path(), "c.suite", &format!(r#"{{"entries": [{wrong}]}}"#));
    let out = gsdyn(&["suite", &failing, "--format", "json"]);
    assert_eq!(code(&out), 1);
    assert_eq!(json(&out)["entries"][0]["status"], "fail");
}
