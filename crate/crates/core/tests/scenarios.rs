use std::path::PathBuf;

use serde_json::Value;

use biframe_core::verify::{run_scenario_str, RunOptions};
use biframe_core::{run_scenario, ScenarioError, Verdict};

fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../scenarios").join(name)
}

fn verdicts(name: &str, options: &RunOptions) -> (Vec<(String, Verdict)>, i32) {
    let run = run_scenario(&scenario_path(name), options).unwrap();
    (run.checks.iter().map(|c| (c.name.clone(), c.verdict)).collect(), run.exit_code)
}

#[test]
fn shipped_scenarios_pass_or_flag_mismatches() {
    let expected: [(&str, &[&str]); 6] = [
        ("onb_parseval.json", &[]),
        ("example1.json", &["classify"]),
        ("example2.json", &["classify"]),
        ("positive_matrix.json", &[]),
        ("riesz_lab.json", &[]),
        ("engine_tour.json", &[]),
    ];
    for (file, mismatches) in expected {
        let (checks, exit) = verdicts(file, &RunOptions::default());
        assert_eq!(exit, 0, "{file}");
        for (name, verdict) in checks {
            let want = if mismatches.contains(&name.as_str()) { Verdict::Mismatch } else { Verdict::Pass };
            assert_eq!(verdict, want, "{file}: {name}");
        }
    }
}

#[test]
fn strict_mode_turns_mismatch_into_failure_exit() {
    let strict = RunOptions { strict_paper: true, ..RunOptions::default() };
    assert_eq!(verdicts("example1.json", &strict).1, 1);
    assert_eq!(verdicts("onb_parseval.json", &strict).1, 0);
}

#[test]
fn example1_bounds_are_reported_in_json() {
    let run = run_scenario(&scenario_path("example1.json"), &RunOptions::default()).unwrap();
    let doc: Value = serde_json::from_str(&run.to_json()).unwrap();
    let bounds = doc["checks"][0]["computed"]["bounds"].as_array().unwrap();
    let root13 = 13f64.sqrt() / 12.0;
    assert!((bounds[0].as_f64().unwrap() - (0.25 - root13)).abs() < 1e-12);
    assert!((bounds[1].as_f64().unwrap() - (0.25 + root13)).abs() < 1e-12);
    assert_eq!(doc["checks"][0]["verdict"], "mismatch");
    assert_eq!(doc["summary"]["mismatch"], 1);
}

#[test]
fn parallel_and_sequential_reports_are_identical() {
    for file in ["riesz_lab.json", "engine_tour.json"] {
        let seq = run_scenario(&scenario_path(file), &RunOptions::default()).unwrap();
        let par = run_scenario(&scenario_path(file), &RunOptions { parallel: true, ..RunOptions::default() }).unwrap();
        assert_eq!(seq.to_json(), par.to_json(), "{file}");
    }
}

#[test]
fn parse_errors_carry_positions() {
    let text = "{\n  \"schema_version\": 1,\n  \"space\": {\"dimension\": 2 \"field\": \"real\"}\n}";
    match run_scenario_str(text, &RunOptions::default()) {
        Err(ScenarioError::Parse { line, column, .. }) => {
            assert_eq!(line, 3);
            assert!(column > 20);
        }
        other => panic!("expected parse error, got {other:?}"),
    }
}

#[test]
fn missing_files_are_io_errors() {
    let err = run_scenario(&scenario_path("does_not_exist.json"), &RunOptions::default()).unwrap_err();
    assert!(matches!(err, ScenarioError::Io { .. }));
}

#[test]
fn undefined_references_are_rejected() {
    let text = r#"{
      "schema_version": 1,
      "space": {"dimension": 2, "field": "real"},
      "measure": {"kind": "counting", "size": 2},
      "families": {"e": {"generator": "onb"}},
      "checks": [{"name": "c", "op": "classify_pair", "xi": "e", "phi": "missing"}]
    }"#;
    let err = run_scenario_str(text, &RunOptions::default()).unwrap_err();
    assert!(matches!(err, ScenarioError::Invalid(ref m) if m.contains("missing")), "{err}");
}

#[test]
fn failed_expectation_exits_one() {
    let text = r#"{
      "schema_version": 1,
      "space": {"dimension": 2, "field": "real"},
      "measure": {"kind": "counting", "size": 2},
      "families": {"e": {"generator": "onb"}, "two": {"generator": "onb", "scale": 2}},
      "checks": [{"name": "c", "op": "classify_pair", "xi": "e", "phi": "two", "expect": {"is_parseval": true}}]
    }"#;
    let run = run_scenario_str(text, &RunOptions::default()).unwrap();
    assert_eq!(run.checks[0].verdict, Verdict::Fail);
    assert_eq!(run.exit_code, 1);
}

#[test]
fn parseval_tolerance_flag_overrides_scenario() {
    // (e, (1 + 1e-6)·e) has ‖T − I‖ = 1e-6.
    let text = r#"{
      "schema_version": 1,
      "space": {"dimension": 2, "field": "real"},
      "measure": {"kind": "counting", "size": 2},
      "families": {"e": {"generator": "onb"}, "near": {"generator": "onb", "scale": 1.000001}},
      "tolerances": {"parseval": 1e-8},
      "checks": [{"name": "c", "op": "classify_pair", "xi": "e", "phi": "near"}]
    }"#;
    let tight = run_scenario_str(text, &RunOptions::default()).unwrap();
    assert_eq!(tight.checks[0].computed["is_parseval"], false);
    let loose = run_scenario_str(text, &RunOptions { parseval: Some(1e-5), ..RunOptions::default() }).unwrap();
    assert_eq!(loose.checks[0].computed["is_parseval"], true);
    assert_eq!(loose.tolerances.parseval, 1e-5);
}
