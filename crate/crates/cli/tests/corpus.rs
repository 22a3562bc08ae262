//! Corpus fixtures: the shipped models parse, round-trip through the
//! serializer, reproduce their expected verdict reports byte-for-byte, and
//! drive the binary's exit codes.

use std::path::PathBuf;
use std::process::Command;

use opacheck::{parse_model, render_document, run_checks, RunOptions};

fn corpus_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

const MODELS: [&str; 4] = ["fig1", "fig2", "fig3", "fig4"];

#[test]
fn corpus_files_round_trip_through_the_serializer() {
    for model in MODELS {
        let text = read(&format!("{model}.ta"));
        let doc = parse_model(&text).unwrap_or_else(|e| panic!("{model}: {e}"));
        let rendered = render_document(&doc);
        let reparsed =
            parse_model(&rendered).unwrap_or_else(|e| panic!("{model} rendered: {e}\n{rendered}"));
        assert_eq!(doc, reparsed, "{model}: round-trip changed the document");
        // and rendering is a fixpoint
        assert_eq!(rendered, render_document(&reparsed));
    }
}

#[test]
fn corpus_reports_match_the_expected_fixtures() {
    for model in MODELS {
        let text = read(&format!("{model}.ta"));
        let doc = parse_model(&text).unwrap();
        let report = run_checks(&doc, &text, &RunOptions::default()).unwrap();
        let expected = read(&format!("{model}.expected"));
        assert_eq!(
            report.to_text(),
            expected,
            "{model}: report drifted from fixture"
        );
    }
}

#[test]
fn reports_are_deterministic_across_runs() {
    for model in MODELS {
        let text = read(&format!("{model}.ta"));
        let doc = parse_model(&text).unwrap();
        let a = run_checks(&doc, &text, &RunOptions::default()).unwrap();
        let b = run_checks(&doc, &text, &RunOptions::default()).unwrap();
        assert_eq!(a.to_text(), b.to_text());
    }
}

fn opacheck() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opacheck"))
}

#[test]
fn exit_code_one_when_a_check_is_negative() {
    let out = opacheck()
        .args(["check", corpus_path("fig2.ta").to_str().unwrap(), "--stable"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("verdict: opaque"));
    assert!(stdout.contains("verdict: not opaque"));
}

#[test]
fn exit_code_zero_when_all_selected_checks_are_positive() {
    let out = opacheck()
        .args([
            "check",
            corpus_path("fig4.ta").to_str().unwrap(),
            "--stable",
            "--only",
            "eto1",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let stdout = String::from_utf8(out.stdout).unwrap();
    assert!(stdout.contains("check eto1"));
    assert!(!stdout.contains("check ebto1"), "--only runs a single check");
}

#[test]
fn exit_code_two_on_parse_and_usage_errors() {
    let dir = std::env::temp_dir();
    let bad = dir.join("opacheck_bad_model.ta");
    std::fs::write(&bad, "clocks x; location l0 init; location l1 init;").unwrap();
    let out = opacheck()
        .args(["check", bad.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8(out.stderr).unwrap();
    assert!(stderr.contains("single initial location"), "{stderr}");

    // unknown --only target
    let out = opacheck()
        .args([
            "check",
            corpus_path("fig2.ta").to_str().unwrap(),
            "--only",
            "nope",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // missing file
    let out = opacheck()
        .args(["check", dir.join("no_such_model.ta").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn json_report_carries_the_documented_fields() {
    let out = opacheck()
        .args([
            "check",
            corpus_path("fig4.ta").to_str().unwrap(),
            "--stable",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(json["checksum"].is_string());
    let checks = json["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 3);
    for check in checks {
        for field in ["name", "notion", "opaque", "verdict", "bounded", "budget"] {
            assert!(!check[field].is_null(), "missing field {field}");
        }
        assert!(check["budget"]["grid"].is_array());
        assert!(check["millis"].is_null(), "stable mode omits timing");
    }
    let ebto = checks.iter().find(|c| c["name"] == "ebto1").unwrap();
    assert_eq!(ebto["opaque"], serde_json::Value::Bool(false));
    assert_eq!(ebto["witness_total"], serde_json::json!(1));
}

#[test]
fn witness_limit_controls_rendered_witnesses() {
    let out = opacheck()
        .args([
            "check",
            corpus_path("fig2.ta").to_str().unwrap(),
            "--stable",
            "--witnesses",
            "3",
            "--format",
            "json",
        ])
        .output()
        .unwrap();
    let json: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let ebto = json["checks"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["name"] == "ebto1")
        .unwrap();
    assert_eq!(ebto["witnesses"].as_array().unwrap().len(), 3);
    assert!(ebto["witness_total"].as_u64().unwrap() > 3);
}
