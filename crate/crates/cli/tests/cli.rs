use std::path::Path;
use std::process::{Command, Output};

use grushin_core::lab::read_jsonl;

fn grushin(out: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_grushin"))
        .arg("--out")
        .arg(out)
        .args(args)
        .env_remove("GRUSHIN_OUT")
        .output()
        .unwrap()
}

fn ok(out: &Path, args: &[&str]) -> Output {
    let o = grushin(out, args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    o
}

const SMALL: [&str; 8] = ["--n", "2", "--half-width", "8", "--nodes", "81", "-K", "10"];

#[test]
fn decay_writes_csv_and_records() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL.to_vec();
    args.extend(["decay", "--t", "0.5", "--regime", "l2"]);
    ok(dir.path(), &args);
    let csv = std::fs::read_to_string(dir.path().join("decay.csv")).unwrap();
    assert!(csv.lines().count() > 2);
    let records = read_jsonl(&dir.path().join("records.jsonl")).unwrap();
    assert_eq!(records.len(), 1);
    assert_eq!(records[0].kind, "decay");
    assert!(records[0].timestamp.is_some());
}

#[test]
fn synthesized_fields_can_be_propagated_and_transformed() {
    let dir = tempfile::tempdir().unwrap();
    let mut args = SMALL.to_vec();
    args.extend(["--t-samples", "8", "--seed", "3"]);
    let with = |extra: &[&'static str]| {
        let mut a = args.clone();
        a.extend_from_slice(extra);
        a
    };
    ok(dir.path(), &with(&["synth-field", "--output", "f.grf", "--band", "1", "--max-level", "2"]));
    ok(dir.path(), &with(&["propagate", "--input", "f.grf", "--output", "u.grf", "--s", "-0.7"]));
    ok(dir.path(), &with(&["transform", "--input", "u.grf", "--output", "g.grf", "--t", "0.5"]));
    for name in ["f.grf", "u.grf", "g.grf"] {
        assert!(dir.path().join(name).metadata().unwrap().len() > 64, "{name}");
    }
    let kinds: Vec<String> = read_jsonl(&dir.path().join("records.jsonl")).unwrap().into_iter().map(|r| r.kind).collect();
    assert_eq!(kinds, ["synth-field", "propagate", "transform"]);
}

#[test]
fn paths_outside_the_output_directory_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let mut args = SMALL.to_vec();
    args.extend(["--t-samples", "8", "synth-field", "--output", "../x.grf"]);
    let o = grushin(&out, &args);
    assert_eq!(o.status.code(), Some(1));
    assert!(!dir.path().join("x.grf").exists());
    let errors = std::fs::read_to_string(out.join("errors.jsonl")).unwrap();
    assert!(errors.contains("output directory"), "{errors}");
}

#[test]
fn worker_count_does_not_change_results() {
    let dir = tempfile::tempdir().unwrap();
    let run = |workers: &'static str| {
        let out = dir.path().join(workers);
        let mut args = vec!["--workers", workers, "--seed", "5"];
        args.extend(SMALL);
        args.extend(["rbound", "--p", "4", "--count", "6", "--lambda-min", "1", "--lambda-max", "2"]);
        ok(&out, &args);
        read_jsonl(&out.join("records.jsonl")).unwrap().into_iter().map(|r| r.content()).collect::<Vec<_>>()
    };
    assert_eq!(run("1"), run("4"));
}

#[test]
fn bad_configuration_fails_with_an_error_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "n = 2\n[grid]\nhalf_width = 8.0\nnodes = 80\n").unwrap();
    let out = dir.path().join("out");
    let o = grushin(&out, &["--config", cfg.to_str().unwrap(), "decay", "--regime", "l2"]);
    assert_eq!(o.status.code(), Some(1));
    let line = std::fs::read_to_string(out.join("errors.jsonl")).unwrap();
    let v: serde_json::Value = serde_json::from_str(line.trim()).unwrap();
    assert_eq!(v["kind"], "error");
    assert!(v["error"].as_str().unwrap().contains("odd"), "{line}");
    assert!(!out.join("records.jsonl").exists());
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let o = ok(dir.path(), &["selftest"]);
    assert!(!String::from_utf8_lossy(&o.stdout).is_empty());
}
