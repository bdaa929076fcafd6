use std::process::{Command, Output};

use serde_json::Value;

fn nppt(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nppt")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid json")
}

#[test]
fn state_conversions() {
    let v = json(&nppt(&["state", "--d", "3", "--alpha", "3"]));
    assert!((v["beta"].as_f64().unwrap() - 0.5).abs() < 1e-15);
    assert_eq!(v["config"]["alpha"], 3.0);
    let v = json(&nppt(&["state", "--d", "3", "--beta", "0"]));
    assert!((v["alpha"].as_f64().unwrap() - 2.0).abs() < 1e-15);
    assert_eq!(v["region"], "separable");
    let v = json(&nppt(&["state", "--d", "3", "--lambda", "1", "--operators"]));
    assert!(v["alpha"].is_null());
    assert_eq!(v["operators"]["density_matrix"]["rows"], 9);
}

#[test]
fn invalid_input_exits_with_one() {
    for args in [
        &["state", "--d", "3", "--beta", "5"][..],
        &["state", "--d", "3"],
        &["thresholds", "--d", "2"],
        &["search", "--d", "3", "--beta", "0.4", "--copies", "3"],
        &["search", "--d", "3", "--beta", "0.4", "--copies", "2", "--symmetry", "sideways"],
        &["sweep", "--d", "3", "--beta-min", "0.2", "--beta-max", "0.2", "--steps", "2"],
        &["sweep", "--d", "3", "--beta-min", "0", "--beta-max", "2.5", "--steps", "3"],
        &["twirl-check", "--d", "6"],
        &["state", "--d", "3", "--beta", "0", "--format", "csv"],
        &["frobnicate"],
    ] {
        let out = nppt(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(!out.stderr.is_empty(), "{args:?}");
    }
}

#[test]
fn help_exits_cleanly() {
    assert!(nppt(&["--help"]).status.success());
    assert!(nppt(&["search", "--help"]).status.success());
}

#[test]
fn thresholds_csv() {
    let out = nppt(&["thresholds", "--d", "3", "--n-max", "2"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let header = reader.headers().unwrap().clone();
    assert_eq!(&header[0], "N");
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][1].parse::<f64>().unwrap(), 0.5);
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.25);
    let lambda_col = header.iter().position(|h| h == "lambda_threshold").unwrap();
    assert!((rows[0][lambda_col].parse::<f64>().unwrap() - 0.6).abs() < 1e-15);
    let v = json(&nppt(&["thresholds", "--d", "5", "--n-max", "1", "--format", "json"]));
    assert_eq!(v["rows"][0]["one_distill_threshold"], 1.5);
}

#[test]
fn search_reports_one_copy_witness() {
    let v = json(&nppt(&["search", "--d", "3", "--beta", "0.6", "--copies", "1"]));
    assert_eq!(v["region"], "one_distillable");
    assert_eq!(v["claims"][0]["kind"], "certified");
    assert!(v["claims"][0]["bound_or_lambda"].as_f64().unwrap() < 0.0);
    assert!(v["witness"].is_object());
    assert_eq!(v["config"]["restarts"], 20);
}

#[test]
fn search_is_deterministic_and_reports_evidence() {
    let args = ["search", "--d", "3", "--beta", "0.45", "--copies", "2", "--restarts", "4", "--seed", "42"];
    let first = nppt(&args);
    let second = nppt(&args);
    assert!(first.status.success());
    assert_eq!(first.stdout, second.stdout);
    let v = json(&first);
    assert_eq!(v["region"], "undecided_band");
    let claims = v["claims"].as_array().unwrap();
    assert_eq!(claims[0]["kind"], "certified");
    assert_eq!(claims[1]["kind"], "evidence");
    assert!(claims[1]["bound_or_lambda"].as_f64().unwrap() >= -1e-8);
    assert_eq!(v["searches"][0]["N"], 2);
}

#[test]
fn config_file_with_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.conf");
    std::fs::write(&path, "# twirl settings\nd = 3\ntrials = 2\nsamples = 0\nseed = 7\n").unwrap();
    let path = path.to_str().unwrap();
    let v = json(&nppt(&["twirl-check", "--config", path]));
    assert_eq!(v["d"], 3);
    assert_eq!(v["trials"], 2);
    assert!(v["max_mc_gap"].is_null());
    assert_eq!(v["config"]["seed"], 7);
    let v = json(&nppt(&["twirl-check", "--config", path, "--d", "2", "--seed", "1"]));
    assert_eq!(v["d"], 2);
    assert_eq!(v["config"]["seed"], 1);
    assert!(v["max_protocol_gap"].as_f64().unwrap() < 1e-10);
}

#[test]
fn sweep_writes_csv_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("sweep.csv");
    let status = nppt(&[
        "sweep", "--d", "3", "--beta-min", "-0.5", "--beta-max", "2", "--steps", "11", "--restarts", "2",
        "--out", out.to_str().unwrap(),
    ]);
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    assert!(status.stdout.is_empty());
    let mut reader = csv::Reader::from_path(&out).unwrap();
    let header: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(header, ["beta", "alpha", "lambda", "region", "region_copies", "certified_bound_N1", "lambda_min_search_N1"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 11);
    let regions: Vec<&str> = rows.iter().map(|r| r.get(3).unwrap()).collect();
    assert_eq!(regions[2], "separable");
    assert_eq!(regions[3], "undecided_band");
    assert_eq!(regions[4], "undecided_band");
    assert_eq!(regions[5], "one_distillable");
    let last = rows.last().unwrap();
    assert_eq!(&last[1], "");
    assert_eq!(&last[6], "");
    let meta: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.csv.meta.json")).unwrap()).unwrap();
    assert_eq!(meta["config"]["steps"], 11);
    assert!(meta["tool_version"].as_str().unwrap().starts_with("nppt "));
}

#[test]
fn certify_and_relations() {
    let v = json(&nppt(&["certify", "--d", "3", "--beta", "0.2", "--n-max", "2"]));
    assert_eq!(v["region"], "certified_undistillable");
    assert_eq!(v["region_copies"], 2);
    let v = json(&nppt(&["relations-check", "--copies", "2", "--samples", "50", "--beta", "0.1"]));
    assert_eq!(v["relations"].as_array().unwrap().len(), 3);
    assert_eq!(v["total_violations"], 0);
    assert_eq!(v["inequality"]["certified"], false);
}

#[test]
fn checkpointed_search_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let ckpt = dir.path().join("run");
    let ckpt = ckpt.to_str().unwrap();
    let base = ["search", "--d", "3", "--beta", "0.3", "--copies", "2", "--max-iters", "50", "--checkpoint", ckpt];
    let partial = nppt(&[&base[..], &["--restarts", "2"]].concat());
    assert!(partial.status.success());
    let resumed = nppt(&[&base[..], &["--restarts", "3"]].concat());
    let fresh = nppt(&["search", "--d", "3", "--beta", "0.3", "--copies", "2", "--max-iters", "50", "--restarts", "3"]);
    let (mut a, b) = (json(&resumed), json(&fresh));
    assert_eq!(a["searches"], b["searches"]);
    a["config"] = b["config"].clone();
    assert_eq!(a, b);
    let lines = std::fs::read_to_string(format!("{ckpt}.N2")).unwrap().lines().count();
    assert_eq!(lines, 3);
}
