use std::path::Path;
use std::process::{Command, Output};

const GOOD: &str = "Build Bot <ci@example.com>;aaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaaa;1600000000;+0200;a.json,b.json;P1;bump deps; again";
const HUMAN: &str = "Ada Lovelace <ada@example.com>;bbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbbb;1600003600;-0500;src/x.rs;P2;fix parser";

fn run(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_botminer"))
        .args(args)
        .current_dir(dir)
        .env_remove("BOTMINER_SEED")
        .output()
        .unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn fixture(lines: &[&str]) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("in.txt"), lines.join("\n") + "\n").unwrap();
    dir
}

#[test]
fn detect_bin_one_verdict_per_author() {
    let dir = fixture(&[GOOD, HUMAN, GOOD]);
    let out = run(&["detect", "--method", "bin", "--input", "in.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stderr(&out).contains("SUMMARY: command=detect method=bin"));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "author_id,bin\nBuild Bot <ci@example.com>,1\nAda Lovelace <ada@example.com>,0\n"
    );
}

#[test]
fn unknown_flag_is_usage_error() {
    let dir = fixture(&[GOOD]);
    assert_eq!(run(&["detect", "--method", "bin", "--frobnicate"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["no-such-command"], dir.path()).status.code(), Some(2));
    assert_eq!(run(&["detect", "--method", "bin", "--kb", "1.5", "--input", "in.txt"], dir.path()).status.code(), Some(2));
    // A model-based method without its model is a usage error too.
    assert_eq!(run(&["detect", "--method", "bica", "--input", "in.txt"], dir.path()).status.code(), Some(2));
}

#[test]
fn corrupt_line_skip_and_abort() {
    let dir = fixture(&[GOOD, "this is not a record", HUMAN]);
    let out = run(&["detect", "--method", "bin", "--input", "in.txt", "--on-error", "skip"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let err = stderr(&out);
    let summary = err.lines().find(|l| l.starts_with("SUMMARY:")).unwrap();
    assert!(summary.contains(" skipped=1"), "{summary}");
    assert!(err.contains("line 2"), "{err}");

    let out = run(&["detect", "--method", "bin", "--input", "in.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("SUMMARY: status=error"));
}

#[test]
fn missing_input_is_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["features", "--input", "nope.txt"], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn ingest_normalizes_and_round_trips() {
    let dir = fixture(&[GOOD, HUMAN]);
    let out = run(&["ingest", "--input", "in.txt", "--out", "out.txt"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(
        std::fs::read_to_string(dir.path().join("out.txt")).unwrap(),
        std::fs::read_to_string(dir.path().join("in.txt")).unwrap()
    );
}

#[test]
fn seed_env_fallback_matches_flag() {
    let dir = tempfile::tempdir().unwrap();
    let flag = run(&["synth", "--kind", "ensemble", "--bots", "5", "--humans", "5", "--seed", "77"], dir.path());
    let env = Command::new(env!("CARGO_BIN_EXE_botminer"))
        .args(["synth", "--kind", "ensemble", "--bots", "5", "--humans", "5"])
        .env("BOTMINER_SEED", "77")
        .output()
        .unwrap();
    let other = run(&["synth", "--kind", "ensemble", "--bots", "5", "--humans", "5", "--seed", "78"], dir.path());
    assert_eq!(flag.stdout, env.stdout);
    assert_ne!(flag.stdout, other.stdout);
}

#[test]
fn characterize_and_filetypes() {
    let dir = fixture(&[GOOD, HUMAN, GOOD]);
    let out = run(
        &["characterize", "--input", "in.txt", "--min-commits", "2", "--svg-dir", "svg"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let csv = String::from_utf8(out.stdout).unwrap();
    assert!(csv.starts_with("author_id,class,total,entropy_norm,top3_share,best_window8_share\n"));
    assert!(csv.contains("Build Bot <ci@example.com>,Spike,2,"), "{csv}");
    assert_eq!(std::fs::read_dir(dir.path().join("svg")).unwrap().count(), 1);

    let out = run(&["filetypes", "--input", "in.txt"], dir.path());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "category,authors\nJSON,1\nRust,1\n");
}
