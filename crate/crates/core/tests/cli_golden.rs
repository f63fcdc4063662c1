//! Golden reports for every command. Set `EGEOM_BLESS=1` to regenerate the
//! frozen hashes after an intentional output change.

mod common;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;

use egeom::report::canonical_json;
use egeom::cli::COMMANDS;
use serde_json::Value;

fn golden_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests").join("golden")
}

fn blessing() -> bool {
    std::env::var_os("EGEOM_BLESS").is_some()
}

#[test]
fn every_command_has_a_golden_case() {
    let covered: Vec<&str> = common::GOLDEN_CASES.iter().map(|c| c.0).collect();
    for name in COMMANDS {
        assert!(covered.contains(name), "{name} has no golden case");
    }
}

#[test]
fn golden_hashes_are_frozen_and_thread_independent() {
    let runs = common::run_golden_cases();
    for r in &runs {
        assert_eq!(r.single, r.multi, "{} differs between 1 and 8 threads", r.name);
    }
    let fresh: BTreeMap<String, String> = runs.iter().map(|r| (r.name.to_string(), r.single.clone())).collect();
    let path = golden_dir().join("hashes.json");
    if blessing() {
        std::fs::write(&path, serde_json::to_string_pretty(&fresh).unwrap() + "\n").unwrap();
        return;
    }
    let frozen = common::frozen_hashes();
    for (name, hash) in &fresh {
        assert_eq!(frozen.get(name), Some(hash), "{name} hash drifted");
    }
}

/// Threshold report from the formulas alone, independent of the library.
fn threshold_row(n: u32) -> Value {
    let nf = f64::from(n);
    let l = nf - (3.0 * nf * nf).log2();
    let threshold = nf - 2.0 * nf.log2() - 3.0;
    let lhs = 2.0 * nf * l * (1.0 - 2f64.ln());
    let rhs = 4.0 * (5.0 * nf).ln();
    serde_json::json!({
        "n": n,
        "l": l,
        "threshold": threshold,
        "condition_lhs": lhs,
        "condition_rhs": rhs,
        "condition_holds": lhs > rhs,
        "vacuous": threshold <= 0.0,
    })
}

#[test]
fn threshold_golden_matches_formula_arithmetic() {
    let path = golden_dir().join("theorem2-threshold-11.json");
    let expected = canonical_json(&threshold_row(11));
    if blessing() {
        std::fs::write(&path, &expected).unwrap();
    }
    let golden = std::fs::read_to_string(&path).expect("golden file exists");
    assert_eq!(golden, expected);

    let report = common::run_cli(&["theorem2-threshold", "--n", "11"], 1);
    assert_eq!(canonical_json(&report.payload), golden);
    let payload = &report.payload;
    assert_eq!(payload["condition_holds"], Value::Bool(true));
    assert!((payload["threshold"].as_f64().unwrap() - 1.0811367627254054).abs() < 1e-12);
}

#[test]
fn binary_output_matches_library_report() {
    for &(name, args) in common::GOLDEN_CASES {
        let out = Command::new(env!("CARGO_BIN_EXE_egeom")).args(args).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        let printed: egeom::report::ExperimentReport = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(printed.comparison_hash, common::run_cli(args, 2).comparison_hash, "{name}");
    }
}

#[test]
fn repeated_runs_share_a_hash() {
    let args = ["haar-tail", "--d", "2", "--eps", "0.5", "--samples", "100000", "--seed", "7"];
    let a = common::run_cli(&args, 4);
    let b = common::run_cli(&args, 4);
    assert_eq!(a.comparison_hash, b.comparison_hash);
    assert_eq!(a.comparison_hash, a.compute_hash());
}

#[test]
fn bell_upper_is_one() {
    let report = common::run_cli(&["gme", "--state", "bell"], 2);
    assert!((report.payload["upper"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

fn exit_code(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_egeom")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

#[test]
fn exit_codes() {
    assert_eq!(exit_code(&["--help"]).0, 0);
    assert_eq!(exit_code(&["frobnicate"]).0, 1);
    assert_eq!(exit_code(&[]).0, 1);
    assert_eq!(exit_code(&["haar-tail", "--d", "1"]).0, 2);
    assert_eq!(exit_code(&["haar-tail", "--d", "two"]).0, 2);
    assert_eq!(exit_code(&["gme", "--state", "ghz:40"]).0, 3);
    assert_eq!(exit_code(&["gme", "--state", "ghz:6", "--budget-amps", "32"]).0, 3);
}

#[test]
fn malformed_config_names_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.json");
    std::fs::write(&config, r#"{"d": 2, "epsilon": 0.3}"#).unwrap();
    let (code, stderr) = exit_code(&["haar-tail", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains("epsilon"), "{stderr}");

    std::fs::write(&config, r#"{"d": "four"}"#).unwrap();
    let (code, stderr) = exit_code(&["haar-tail", "--config", config.to_str().unwrap()]);
    assert_eq!(code, 2);
    assert!(stderr.contains('d'), "{stderr}");
}

#[test]
fn flags_override_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("tail.json");
    std::fs::write(&config, r#"{"d": 4, "eps": 0.3, "samples": 500}"#).unwrap();
    let c = config.to_str().unwrap();
    let report = common::run_cli(&["haar-tail", "--config", c, "--d", "8", "--seed", "3"], 1);
    assert_eq!(report.params["d"], 8);
    assert_eq!(report.params["samples"], 500);
    assert_eq!(report.payload["d"], 8);
    assert_eq!(report.seed, 3);
}

#[test]
fn writes_only_to_out_and_csv_paths() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let csv = dir.path().join("rows.csv");
    let status = Command::new(env!("CARGO_BIN_EXE_egeom"))
        .current_dir(dir.path())
        .args(["haar-gme", "--n", "3", "--samples", "3", "--out", out.to_str().unwrap()])
        .args(["--csv", csv.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let mut names: Vec<String> = std::fs::read_dir(dir.path())
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    assert_eq!(names, ["report.json", "rows.csv"]);

    let report: egeom::report::ExperimentReport =
        serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.comparison_hash, report.compute_hash());
    let csv_text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = csv_text.split("\r\n");
    assert_eq!(lines.next(), Some("below_threshold,lower,sample,state_seed,upper"));
    assert_eq!(lines.filter(|l| !l.is_empty()).count(), 3);
}

#[test]
fn csv_without_rows_is_an_error() {
    let (code, stderr) = exit_code(&["gme", "--state", "bell", "--format", "csv"]);
    assert_eq!(code, 2);
    assert!(stderr.contains("rows"), "{stderr}");
}

#[test]
fn json_round_trip_reproduces_report() {
    let report = common::run_cli(&["graph", "bounds", "--family", "star:4"], 1);
    let text = canonical_json(&report.to_value());
    let back: egeom::report::ExperimentReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, report);
}
