//! End-to-end checks of the `kummer` binary: exit codes, report schema,
//! sweep aggregation and format projection.

use std::path::Path;
use std::process::{Command, Output};

fn kummer(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kummer"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf8 stdout")
}

fn write_grid(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn verify_pass_exits_zero_with_schema_valid_report() {
    let out = kummer(&[
        "verify", "--theorem", "T21", "--rho", "0.5", "--i", "0", "--x", "0.25", "--delta",
        "const:1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    kummer_cli::report::validate_report_json(&value).unwrap();
    assert_eq!(value["verdict"], "pass");
    assert!(value["lhs"]
        .as_str()
        .unwrap()
        .starts_with("0.8337300251311490488838853943350944798"));
}

#[test]
fn verify_domain_guard_exits_two() {
    let out = kummer(&[
        "verify", "--theorem", "T21", "--rho", "-1", "--i", "0", "--x", "0.25", "--delta",
        "const:1",
    ]);
    assert_eq!(out.status.code(), Some(2));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    kummer_cli::report::validate_report_json(&value).unwrap();
    assert_eq!(value["verdict"], "domain_error");
}

#[test]
fn verify_as_printed_sign_case_exits_one() {
    let out = kummer(&[
        "verify",
        "--theorem",
        "T22",
        "--rho",
        "1.3",
        "--i",
        "1",
        "--x",
        "0.5",
        "--delta",
        "harmonic",
        "--mode",
        "as-printed",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["verdict"], "fail");
}

#[test]
fn eval_reports_without_gating() {
    let out = kummer(&[
        "eval",
        "--theorem",
        "T22",
        "--rho",
        "1.3",
        "--i",
        "1",
        "--x",
        "0.5",
        "--delta",
        "harmonic",
        "--mode",
        "as-printed",
    ]);
    // Same failing comparison as above, but eval only reports it.
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["verdict"], "fail");
}

#[test]
fn config_errors_exit_two() {
    for args in [
        vec!["verify", "--theorem", "T99", "--rho", "0.5", "--x", "0.25"],
        vec!["verify", "--theorem", "T21", "--rho", "abc", "--x", "0.25"],
        vec![
            "verify", "--theorem", "T21", "--rho", "0.5", "--x", "0.25", "--digits", "5",
        ],
        vec![
            "verify", "--theorem", "T21", "--rho", "0.5", "--x", "0.25", "--delta", "geom:2",
        ],
    ] {
        let out = kummer(&args);
        assert_eq!(out.status.code(), Some(2), "args {args:?}");
    }
}

#[test]
fn sweep_aggregates_and_projects_to_csv() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(
        dir.path(),
        "grid.json",
        r#"{
            "theorems": ["T21", "C31"],
            "rho": ["1.3", "-1"],
            "i": [0, 1],
            "x": ["0.5"],
            "delta": ["const:1"]
        }"#,
    );
    let out = kummer(&["sweep", "--grid", &grid]);
    // Mixed pass/domain rows: aggregate is pass.
    assert_eq!(out.status.code(), Some(0));
    let rows: Vec<serde_json::Value> =
        serde_json::from_str(&stdout_str(&out)).expect("array of reports");
    // T21 x 2 rho x 2 i + C31 x 2 rho x 1 (i collapsed) = 6 rows.
    assert_eq!(rows.len(), 6);
    for row in &rows {
        kummer_cli::report::validate_report_json(row).unwrap();
    }
    assert!(rows.iter().any(|r| r["verdict"] == "domain_error"));
    assert!(rows.iter().any(|r| r["verdict"] == "pass"));

    let csv_out = kummer(&["sweep", "--grid", &grid, "--format", "csv"]);
    assert_eq!(csv_out.status.code(), Some(0));
    let csv = stdout_str(&csv_out);
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), kummer_cli::report::CSV_HEADER);
    assert_eq!(lines.count(), 6);
}

#[test]
fn sweep_all_domain_rows_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(
        dir.path(),
        "bad.json",
        r#"{"theorems":["T21"],"rho":["-2"],"i":[0],"x":["0.5"],"delta":["const:1"]}"#,
    );
    let out = kummer(&["sweep", "--grid", &grid]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn sweep_empty_grid_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let grid = write_grid(
        dir.path(),
        "empty.json",
        r#"{"theorems":[],"rho":["0.5"],"i":[0],"x":["0.5"],"delta":["const:1"]}"#,
    );
    let out = kummer(&["sweep", "--grid", &grid]);
    assert_eq!(out.status.code(), Some(2));
    let missing = kummer(&["sweep", "--grid", "/nonexistent/grid.json"]);
    assert_eq!(missing.status.code(), Some(2));
}

#[test]
fn forensics_constant_delta_on_c32_is_inconclusive() {
    let out = kummer(&["forensics", "--only", "c32", "--delta", "const:1"]);
    assert_eq!(out.status.code(), Some(3));
    let rows: Vec<serde_json::Value> = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0]["verdict"], "inconclusive");
}

#[test]
fn digits_flag_controls_report_precision() {
    let out = kummer(&[
        "verify", "--theorem", "T21", "--rho", "0.5", "--x", "0.25", "--delta", "const:1",
        "--digits", "30",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(value["digits"], 30);
    // 30 significant digits of cosh(1) cos(1).
    assert_eq!(value["lhs"].as_str().unwrap(), "0.833730025131149048883885394335");
}

#[test]
fn output_file_matches_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let piped = kummer(&[
        "verify", "--theorem", "C31", "--rho", "0.5", "--x", "0.25", "--delta", "const:1",
    ]);
    let to_file = kummer(&[
        "verify",
        "--theorem",
        "C31",
        "--rho",
        "0.5",
        "--x",
        "0.25",
        "--delta",
        "const:1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(to_file.status.code(), Some(0));
    let file = std::fs::read_to_string(&path).unwrap();
    assert_eq!(file, stdout_str(&piped));
}

#[test]
fn exit_code_aggregation_contract() {
    use kummer_cli::aggregate_exit;
    assert_eq!(aggregate_exit(&["pass", "pass"]), 0);
    assert_eq!(aggregate_exit(&["pass", "fail", "inconclusive"]), 1);
    assert_eq!(aggregate_exit(&["pass", "inconclusive"]), 3);
    assert_eq!(aggregate_exit(&["domain_error", "domain_error"]), 2);
    assert_eq!(aggregate_exit(&["domain_error", "pass"]), 0);
    assert_eq!(aggregate_exit(&["domain_error", "fail"]), 1);
    assert_eq!(aggregate_exit(&[]), 2);
}

proptest::proptest! {
    /// The exit code over any synthetic report set follows the contract:
    /// 2 when empty or all rows are domain errors, else 1 on any fail,
    /// else 3 on any inconclusive, else 0.
    #[test]
    fn exit_code_contract_over_synthetic_report_sets(
        verdicts in proptest::collection::vec(
            proptest::sample::select(vec!["pass", "fail", "inconclusive", "domain_error"]),
            0..12,
        )
    ) {
        let refs: Vec<&str> = verdicts.iter().map(|s| &**s).collect();
        let code = kummer_cli::aggregate_exit(&refs);
        let expected = if refs.is_empty() || refs.iter().all(|v| *v == "domain_error") {
            2
        } else if refs.contains(&"fail") {
            1
        } else if refs.contains(&"inconclusive") {
            3
        } else {
            0
        };
        proptest::prop_assert_eq!(code, expected);
    }
}
