//! End-to-end checks of the `eulerlab` binary: configuration handling,
//! exit codes, output files, and worker-count independence.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use eulerlab_cli::output::read_csv;
use serde_json::Value;
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_eulerlab"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn write_config(dir: &Path, body: &str) -> PathBuf {
    let path = dir.join("run.conf");
    fs::write(&path, body).expect("config should be writable");
    path
}

fn envelope(dir: &Path) -> Value {
    let text = fs::read_to_string(dir.join("envelope.json")).expect("envelope should exist");
    serde_json::from_str(&text).expect("envelope should be valid JSON")
}

fn stderr_text(output: &Output) -> String {
    String::from_utf8_lossy(&output.stderr).into_owned()
}

#[test]
fn theory_run_from_a_config_file_succeeds_and_documents_itself() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(
        tmp.path(),
        "# smallest valid configuration\nlogT = 18.42\nbeta = 0.5, 4\nalpha = 0.5\nu = 0\n",
    );
    let output = run(&[
        "theory",
        "--config",
        config.to_str().unwrap(),
        "--output_dir",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_text(&output));

    let (header, rows) = read_csv(&out.join("theory.csv")).unwrap();
    assert_eq!(header[0], "beta");
    assert_eq!(rows.len(), 2, "one row per (u, beta) pair");
    let beta4 = rows.iter().find(|r| r[0] == "4").unwrap();
    let free_energy: f64 = beta4[4].parse().unwrap();
    assert_eq!(free_energy, 3.0, "supercritical limit at beta=4, u=0");
    // gamma_c is defined at u=0; the two-atom masses need beta > 2.
    let beta_half = rows.iter().find(|r| r[0] == "0.5").unwrap();
    assert!(beta_half[8].is_empty() && beta_half[9].is_empty());
    assert_eq!(beta4[8], "0.5");

    let doc = envelope(&out);
    assert_eq!(doc["config"]["experiment"], "theory");
    assert_eq!(doc["config"]["logT"][0], 18.42);
    assert_eq!(doc["config"]["beta"], serde_json::json!([0.5, 4.0]));
    assert_eq!(doc["seed"], 1, "default seed");
    assert_eq!(doc["incomplete"], false);
    assert!(doc.get("error").is_none());
    let outputs: Vec<&str> = doc["outputs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert_eq!(outputs, ["theory.csv"]);
}

#[test]
fn an_empty_config_names_every_missing_key_and_exits_with_usage_code() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(tmp.path(), "# nothing here\n");
    let output = run(&["theory", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr_text(&output);
    for key in ["logT", "beta", "alpha", "u"] {
        assert!(err.contains(key), "stderr should mention {key}: {err}");
    }
}

#[test]
fn every_out_of_range_value_is_reported_in_one_pass() {
    let tmp = TempDir::new().unwrap();
    let config = write_config(
        tmp.path(),
        "logT = 0.5\nbeta = -1\nalpha = 2\nu = 0\nworkers = 500\n",
    );
    let output = run(&["theory", "--config", config.to_str().unwrap()]);
    assert_eq!(output.status.code(), Some(2));
    let err = stderr_text(&output);
    for key in ["logT", "beta", "alpha", "workers"] {
        assert!(err.contains(key), "stderr should mention {key}: {err}");
    }
    assert!(!err.contains("u:"), "u=0 is in range: {err}");
}

#[test]
fn an_unreadable_config_path_is_a_usage_error() {
    let output = run(&["theory", "--config", "/no/such/file.conf"]);
    assert_eq!(output.status.code(), Some(2));
    assert!(stderr_text(&output).contains("cannot read"));
}

#[test]
fn command_line_flags_override_the_config_file() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let config = write_config(tmp.path(), "logT=18.42\nbeta=4\nalpha=0.5\nu=0\nseed=7\n");
    let output = run(&[
        "theory",
        "--config",
        config.to_str().unwrap(),
        "--beta",
        "2.5",
        "--output_dir",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_text(&output));
    let doc = envelope(&out);
    assert_eq!(doc["config"]["beta"], serde_json::json!([2.5]));
    assert_eq!(doc["seed"], 7, "file-provided seed still applies");
}

#[test]
fn flags_alone_are_enough_without_a_config_file() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "high-points",
        "--logT",
        "9.2",
        "--beta",
        "3",
        "--alpha",
        "0.5",
        "--u",
        "0",
        "--replicas",
        "8",
        "--grid_oversample",
        "1",
        "--output_dir",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_text(&output));
    let (header, rows) = read_csv(&out.join("high_points.csv")).unwrap();
    assert_eq!(header[4], "gamma");
    assert_eq!(rows.len(), 9, "nine levels below the growth ceiling");
    let first: f64 = rows[0][4].parse().unwrap();
    let last: f64 = rows[8][4].parse().unwrap();
    assert!((first - 0.1).abs() < 1e-12, "levels start at a tenth");
    assert!((last - 0.9).abs() < 1e-12, "levels stop below the ceiling");
}

#[test]
fn a_cutoff_beyond_the_sieve_ceiling_fails_but_still_writes_the_envelope() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "free-energy",
        "--logT",
        "25",
        "--beta",
        "1",
        "--alpha",
        "0.5",
        "--u",
        "0",
        "--output_dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(output.status.code(), Some(1), "runtime failure, not usage");
    let doc = envelope(&out);
    assert_eq!(doc["incomplete"], true);
    let message = doc["error"].as_str().unwrap();
    assert!(!message.is_empty());
    assert!(
        doc["outputs"].as_array().unwrap().is_empty(),
        "no data file was completed"
    );
}

#[test]
fn unknown_subcommands_are_usage_errors() {
    let output = run(&["frobnicate"]);
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn worker_count_never_changes_csv_bytes() {
    let tmp = TempDir::new().unwrap();
    let flags = [
        "--logT", "9.2,11.5", "--beta", "1,4", "--alpha", "0.5", "--u", "-0.3,0.4", "--replicas",
        "12", "--grid_oversample", "1", "--seed", "42",
    ];
    let mut bytes_by_workers = Vec::new();
    for workers in ["1", "4", "16"] {
        let out = tmp.path().join(format!("w{workers}"));
        let mut args = vec!["free-energy"];
        args.extend_from_slice(&flags);
        args.extend_from_slice(&["--workers", workers, "--output_dir", out.to_str().unwrap()]);
        let output = run(&args);
        assert!(output.status.success(), "{}", stderr_text(&output));
        bytes_by_workers.push(fs::read(out.join("free_energy.csv")).unwrap());
    }
    assert_eq!(bytes_by_workers[0], bytes_by_workers[1]);
    assert_eq!(bytes_by_workers[0], bytes_by_workers[2]);
}

#[test]
fn overlap_histograms_account_for_every_pair_and_share_draws_across_betas() {
    let tmp = TempDir::new().unwrap();
    let out = tmp.path().join("out");
    let output = run(&[
        "overlap",
        "--logT",
        "9.2",
        "--beta",
        "0.5,4",
        "--alpha",
        "0.5",
        "--u",
        "0",
        "--replicas",
        "10",
        "--pairs_per_replica",
        "30",
        "--grid_oversample",
        "1",
        "--output_dir",
        out.to_str().unwrap(),
    ]);
    assert!(output.status.success(), "{}", stderr_text(&output));
    let (header, rows) = read_csv(&out.join("overlap.csv")).unwrap();
    assert_eq!(header[6], "count");
    for beta in ["0.5", "4"] {
        let total: u64 = rows
            .iter()
            .filter(|r| r[1] == beta)
            .map(|r| r[6].parse::<u64>().unwrap())
            .sum();
        assert_eq!(total, 10 * 30, "all pairs land in some bin at beta={beta}");
    }
    let fractions_sum: f64 = rows
        .iter()
        .filter(|r| r[1] == "4")
        .map(|r| r[7].parse::<f64>().unwrap())
        .sum();
    assert!((fractions_sum - 1.0).abs() < 1e-12);
}

#[test]
fn validate_reports_are_identical_for_repeated_runs() {
    let tmp = TempDir::new().unwrap();
    let mut reports = Vec::new();
    for (label, workers) in [("a", "1"), ("b", "4")] {
        let out = tmp.path().join(label);
        let output = run(&[
            "validate",
            "--logT",
            "9.2",
            "--beta",
            "1",
            "--alpha",
            "0.5",
            "--u",
            "0",
            "--workers",
            workers,
            "--output_dir",
            out.to_str().unwrap(),
        ]);
        assert!(output.status.success(), "{}", stderr_text(&output));
        reports.push(fs::read(out.join("validate_report.json")).unwrap());
    }
    assert_eq!(reports[0], reports[1]);
}
