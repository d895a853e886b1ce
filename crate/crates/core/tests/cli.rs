use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use aua::metrics::{ExtendedReal, MetricReport};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn aua(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aua"))
        .args(args)
        .env_remove("AUA_CONFIG")
        .output()
        .expect("binary runs")
}

fn stdout(output: &Output) -> String {
    String::from_utf8(output.stdout.clone()).unwrap()
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("aua-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::File::create(&path)
        .unwrap()
        .write_all(contents.as_bytes())
        .unwrap();
    path
}

#[test]
fn parse_summarizes_jsonl_and_bibtex() {
    let jsonl = aua(&["parse", fixture("ours.jsonl").to_str().unwrap()]);
    assert_eq!(jsonl.status.code(), Some(0));
    assert_eq!(stdout(&jsonl).trim(), "1 record, 2 authors, 1 institution");

    let bib = aua(&[
        "parse",
        fixture("ours.bib").to_str().unwrap(),
        "--sidecar",
        fixture("ours.sidecar.json").to_str().unwrap(),
    ]);
    assert_eq!(bib.status.code(), Some(0));
    assert_eq!(stdout(&bib).trim(), "1 record, 2 authors, 1 institution");
}

#[test]
fn parse_errors_map_to_exit_codes() {
    let malformed = temp_file("malformed.jsonl", "{\"id\": \"x\", \n");
    let out = aua(&["parse", malformed.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 1"));

    let bad_month = std::fs::read_to_string(fixture("ours.jsonl"))
        .unwrap()
        .replace("\"month\": 4", "\"month\": 13");
    let path = temp_file("month13.jsonl", &bad_month);
    let out = aua(&["parse", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("month"));

    assert_eq!(
        aua(&["parse", "/nonexistent/file.jsonl"]).status.code(),
        Some(1)
    );
    assert_eq!(aua(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn metrics_json_round_trips() {
    let out = aua(&["metrics", fixture("ours.jsonl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let reports: Vec<MetricReport> = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(reports.len(), 1);
    let report = &reports[0];
    assert_eq!(report.record_id, "ours");
    assert_eq!(report.nsa, Some(2));
    assert_eq!(report.geil, ExtendedReal::Finite(1.0));
    assert_eq!(report.ssim, ExtendedReal::Finite(96.0));
    assert_eq!(report.acdc, ExtendedReal::PositiveInfinity);
}

#[test]
fn metrics_csv_and_filter() {
    let path = fixture("ours.jsonl");
    let out = aua(&["metrics", path.to_str().unwrap(), "--output", "csv"]);
    assert_eq!(
        stdout(&out),
        "record,nsa,geil,ssim,acdc\nours,2,1.0,96.0,inf\n"
    );

    let out = aua(&[
        "metrics",
        path.to_str().unwrap(),
        "--metric",
        "ssim",
        "--output",
        "csv",
    ]);
    assert_eq!(stdout(&out), "record,ssim\nours,96.0\n");

    let out = aua(&["metrics", path.to_str().unwrap(), "--metric", "bogus"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn detect_reports_levels() {
    let out = aua(&["detect", fixture("ours.jsonl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let clusters: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(clusters[0]["level"], "full_aua");
    assert_eq!(clusters[0]["members"].as_array().unwrap().len(), 2);

    let out = aua(&["detect", fixture("distinct.jsonl").to_str().unwrap()]);
    assert_eq!(
        serde_json::from_str::<serde_json::Value>(&stdout(&out)).unwrap(),
        serde_json::json!([])
    );

    let out = aua(&[
        "detect",
        fixture("ladder_name.jsonl").to_str().unwrap(),
        "--savings",
    ]);
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value["clusters"][0]["level"], "name");
    assert!(value["page_savings"][0]["page_savings"].as_f64().unwrap() > 0.0);
}

#[test]
fn detect_with_profiles() {
    let out = aua(&[
        "detect",
        fixture("ladder_full.jsonl").to_str().unwrap(),
        "--profiles",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let value: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(value[0]["level"], "full_aua");
    assert!(value[0]["merged_profile"].is_object());
}

#[test]
fn table_renders_markdown() {
    let out = aua(&["table"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("|  | NSA ↑ | GEIL ↓ | SSIM ↑ | ACDC ↑ |"));
    assert!(text.contains("| Ours | **2.00** | **1.00** | **96.00** | **∞** |"));
}

#[test]
fn config_file_supplies_defaults() {
    let config = temp_file("aua.conf", "# defaults\noutput = csv\nmetric = nsa\n");
    let out = Command::new(env!("CARGO_BIN_EXE_aua"))
        .args(["metrics", fixture("ours.jsonl").to_str().unwrap()])
        .env("AUA_CONFIG", &config)
        .output()
        .unwrap();
    assert_eq!(stdout(&out), "record,nsa\nours,2\n");

    // flags win over the file
    let out = Command::new(env!("CARGO_BIN_EXE_aua"))
        .args([
            "metrics",
            fixture("ours.jsonl").to_str().unwrap(),
            "--output",
            "json",
        ])
        .env("AUA_CONFIG", &config)
        .output()
        .unwrap();
    assert!(stdout(&out).trim_start().starts_with('['));

    let broken = temp_file("broken.conf", "output csv\n");
    let out = Command::new(env!("CARGO_BIN_EXE_aua"))
        .args(["parse", fixture("ours.jsonl").to_str().unwrap()])
        .env("AUA_CONFIG", &broken)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
