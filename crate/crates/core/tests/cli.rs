use std::process::{Command, Output};

fn jhcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_jhcalc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn passing_check_exits_zero() {
    let out = jhcalc(&["verify", "example316"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).starts_with("PASS example316 k=2 l=2"));
}

#[test]
fn unknown_check_exits_two() {
    let out = jhcalc(&["verify", "no-such-check"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown check"));
}

#[test]
fn invalid_exponent_set_exits_two() {
    let out = jhcalc(&["series", "custom", "--v", "0,1", "--ks", "2,4", "--p", "2"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_is_deterministic() {
    let args = ["--format", "json", "verify", "lemma35", "remark36", "witt-agreement", "--n", "4"];
    let first = jhcalc(&args);
    let second = jhcalc(&args);
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(stdout(&first), stdout(&second));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&first)).expect("valid JSON");
    let reports = parsed.as_array().expect("array of reports");
    assert!(!reports.is_empty());
    assert!(reports.iter().all(|r| r["verdict"] == "pass" && r["duration_ms"].is_null()));
}

#[test]
fn shuffles_of_two_and_two() {
    let out = jhcalc(&["--format", "json", "shuffles", "2", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let parsed: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(parsed["shuffles"], serde_json::json!([[1, 2, 3, 4], [1, 3, 2, 4], [2, 3, 1, 4]]));
    assert_eq!(parsed["degree_even"], 3);
    assert_eq!(parsed["degree_odd"], 1);
}

#[test]
fn witt_six_two() {
    let out = jhcalc(&["--format", "json", "witt", "6", "2", "--rank"]);
    let parsed: serde_json::Value = serde_json::from_str(stdout(&out).trim()).expect("valid JSON");
    assert_eq!(parsed["witt"], "9");
    assert_eq!(parsed["rank"], 9);
}
