//! End-to-end checks of the command-line interface and its exit-code
//! contract: 0 success, 2 config error, 3 budget exceeded, 4 verification
//! failure.

use std::path::PathBuf;
use std::process::{Command, Output};

fn sigdet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sigdet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn write_temp(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("sigdet-test-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).unwrap();
    path
}

const GOOD_SCENARIO: &str = r#"{
    "prior": "1/2",
    "horizon": 2,
    "sensors": [{ "pmf": [[[0.8, 0.2], [0.3, 0.7]], [[0.8, 0.2], [0.3, 0.7]]] }],
    "edges": [],
    "cost": {
        "operational": { "form": "linear", "rates": [0.1] },
        "terminal": { "form": "decision-table", "table": [0, 5, 5, 0] }
    }
}"#;

#[test]
fn counterexample_point_and_grid_succeed() {
    let out = sigdet(&["counterexample"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.contains("ex1,3.4"), "{text}");
    assert!(text.contains("non_threshold,3.2"), "{text}");

    let out = sigdet(&["counterexample", "--grid"]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.starts_with("k,r1,cost_ex1"), "{text}");
    // 12 grid points plus the header.
    assert_eq!(text.lines().count(), 13, "{text}");
}

#[test]
fn counterexample_zero_tolerance_exits_verification_failure() {
    // With a zero tolerance the (deterministic) floating-point residue of the
    // ex2 evaluation trips the closed-form check.
    let out = sigdet(&["counterexample", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(4), "{out:?}");
}

#[test]
fn evaluate_presets_ranks_profiles() {
    let out = sigdet(&[
        "evaluate",
        "--preset",
        "counterexample",
        "--k",
        "1.5",
        "--r1",
        "0.4",
        "--profiles",
        "ex1,ex2,non_threshold",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "profile,method,expected_cost,operational,terminal,error_prob,stderr,samples"
    );
    // Sorted ascending: the signaling rule comes first at cost 3.2.
    assert!(lines.next().unwrap().starts_with("non_threshold,exact,3.2"), "{text}");
}

#[test]
fn evaluate_monte_carlo_populates_stderr_column() {
    let out = sigdet(&[
        "evaluate",
        "--preset",
        "counterexample",
        "--profiles",
        "non_threshold",
        "--method",
        "mc",
        "--samples",
        "10000",
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[1], "monte-carlo");
    assert!(row[6].parse::<f64>().unwrap() > 0.0, "stderr column empty: {text}");
    assert_eq!(row[7], "10000");
}

#[test]
fn missing_profile_file_is_a_config_error() {
    let out = sigdet(&[
        "evaluate",
        "--preset",
        "counterexample",
        "--profiles",
        "/nonexistent/profile.json",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn tiny_budget_exits_budget_exceeded() {
    let out = sigdet(&[
        "evaluate",
        "--preset",
        "counterexample",
        "--profiles",
        "ex1",
        "--budget",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(3), "{out:?}");
}

#[test]
fn best_response_runs_verifiers_on_the_counterexample() {
    let out = sigdet(&[
        "best-response",
        "--preset",
        "counterexample",
        "--profile",
        "non_threshold",
        "--sensor",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.starts_with("t,message_history,pi,V,cost_stop0,cost_stop1,cost_continue,argmin"));
    // The best response against the signaling companion achieves its cost.
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("root value: 3.2"),
        "{out:?}"
    );
}

#[test]
fn best_response_runs_verifiers_and_oracle() {
    let scenario = write_temp("oracle.json", GOOD_SCENARIO);
    let profile = write_temp(
        "oracle-profile.json",
        r#"[{ "type": "tabular", "default": 0, "entries": [] }]"#,
    );
    let out = sigdet(&[
        "best-response",
        "--scenario",
        scenario.to_str().unwrap(),
        "--profile",
        profile.to_str().unwrap(),
        "--sensor",
        "0",
        "--oracle",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert!(text.starts_with("t,message_history,pi,V,cost_stop0,cost_stop1,cost_continue,argmin"));
    let oracle_row = text
        .lines()
        .find(|l| l.starts_with("oracle,") && !l.contains("dp_value"))
        .expect("oracle row");
    let diff: f64 = oracle_row.split(',').nth(3).unwrap().parse().unwrap();
    assert!(diff <= 1e-10, "{oracle_row}");
}

#[test]
fn iterate_prints_a_nonincreasing_trace() {
    let out = sigdet(&[
        "iterate",
        "--preset",
        "counterexample",
        "--profile",
        "ex2",
        "--rounds",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    let costs: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(!costs.is_empty());
    for w in costs.windows(2) {
        assert!(w[1] <= w[0] + 1e-10, "{costs:?}");
    }
}

#[test]
fn scenario_validate_accepts_good_and_rejects_bad() {
    let good = write_temp("good.json", GOOD_SCENARIO);
    let out = sigdet(&["scenario", "validate", "--scenario", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    assert!(stdout(&out).starts_with("ok:"));

    let bad = write_temp(
        "bad.json",
        &GOOD_SCENARIO.replace("[0.8, 0.2]", "[0.8, 0.3]"),
    );
    let out = sigdet(&["scenario", "validate", "--scenario", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn evaluate_accepts_a_profile_file() {
    let scenario = write_temp("wald.json", GOOD_SCENARIO);
    // A single-sensor threshold rule: stop early only when fairly sure.
    let profile = write_temp(
        "profile.json",
        r#"[{
            "type": "threshold",
            "entries": [
                { "t": 1, "message_history": [], "stop0": [0.75, 1.0], "stop1": [0.0, 0.25] },
                { "t": 2, "message_history": [[]], "stop0": [0.5, 1.0], "stop1": [0.0, 0.5] }
            ]
        }]"#,
    );
    let out = sigdet(&[
        "evaluate",
        "--scenario",
        scenario.to_str().unwrap(),
        "--profiles",
        profile.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 2, "{text}");
}
