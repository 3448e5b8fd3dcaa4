use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn biframe(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biframe"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../scenarios")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("biframe-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn analyze_passing_scenario_exits_zero() {
    let out = biframe(&["analyze", &scenario("onb_parseval.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("[PASS    ] classify (classify_pair)"), "{text}");
    assert!(text.contains("summary: 3 checks, 3 pass"), "{text}");
}

#[test]
fn mismatch_exits_zero_unless_strict() {
    let out = biframe(&["analyze", &scenario("example1.json")]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("[MISMATCH] classify"));
    let strict = biframe(&["--strict-paper", "analyze", &scenario("example1.json")]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn failed_expectation_exits_one() {
    let path = scratch(
        "fail.json",
        r#"{"schema_version": 1, "space": {"dimension": 2, "field": "real"},
            "measure": {"kind": "counting", "size": 2},
            "families": {"e": {"generator": "onb"}, "two": {"generator": "onb", "scale": 2}},
            "checks": [{"name": "c", "op": "classify_pair", "xi": "e", "phi": "two",
                        "expect": {"is_parseval": true}}]}"#,
    );
    let out = biframe(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("[FAIL    ] c"));
}

#[test]
fn malformed_scenario_reports_position_and_exits_two() {
    let path = scratch("bad.json", "{\n  \"schema_version\": 1,\n  \"space\": {\"dimension\": }\n}\n");
    let out = biframe(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = stderr(&out);
    assert!(err.contains("line 3"), "{err}");
    assert!(err.contains("column"), "{err}");
    assert!(stdout(&out).is_empty());
}

#[test]
fn missing_file_exits_two() {
    let out = biframe(&["analyze", "/nonexistent/scenario.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).starts_with("error:"));
}

#[test]
fn usage_errors_exit_two() {
    for args in [
        vec!["properties", "--trials", "0"],
        vec!["properties", "--max-dim", "1"],
        vec!["--tolerance-parseval", "-1", "paper-examples"],
        vec!["frobnicate"],
    ] {
        let out = biframe(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn paper_examples_flags_mismatches() {
    let out = biframe(&["--format", "json", "paper-examples"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["kind"], "paper-examples");
    let verdict = |name: &str| {
        doc["checks"]
            .as_array()
            .unwrap()
            .iter()
            .find(|c| c["name"] == name)
            .map(|c| c["verdict"].as_str().unwrap().to_string())
            .unwrap()
    };
    assert_eq!(verdict("example1"), "mismatch");
    assert_eq!(verdict("example2"), "mismatch");
    assert_eq!(verdict("positive_matrix.conclusion"), "pass");
    assert_eq!(verdict("b_riesz.certificate"), "pass");
    let strict = biframe(&["--strict-paper", "paper-examples"]);
    assert_eq!(strict.status.code(), Some(1));
}

#[test]
fn json_output_is_deterministic_and_matches_report_file() {
    let report = std::env::temp_dir().join(format!("biframe-cli-report-{}.json", std::process::id()));
    let args = [
        "--format",
        "json",
        "--report",
        report.to_str().unwrap(),
        "properties",
        "--seed",
        "7",
        "--trials",
        "5",
        "--max-dim",
        "4",
    ];
    let first = biframe(&args);
    assert_eq!(first.status.code(), Some(0), "{}", stderr(&first));
    let written = std::fs::read_to_string(&report).unwrap();
    assert_eq!(written, stdout(&first));
    let second = biframe(&args);
    assert_eq!(stdout(&first), stdout(&second));
    let parallel = biframe(&[&["--parallel"], &args[..]].concat());
    assert_eq!(stdout(&first), stdout(&parallel));
    let doc: Value = serde_json::from_str(&written).unwrap();
    assert_eq!(doc["parameters"]["seed"], 7);
    assert_eq!(doc["summary"]["fail"], 0);
    std::fs::remove_file(report).ok();
}

#[test]
fn unwritable_report_path_exits_two() {
    let out = biframe(&["--report", "/nonexistent/dir/report.json", "analyze", &scenario("onb_parseval.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("cannot write report"));
}

#[test]
fn tolerance_flags_are_recorded() {
    let out = biframe(&["--format", "json", "--tolerance-parseval", "1e-4", "analyze", &scenario("onb_parseval.json")]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["tolerances"]["parseval"].as_f64(), Some(1e-4));
}
