use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn relay(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_relay"))
        .args(args)
        .current_dir(dir)
        .env_remove("RELAY_SEED")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str], dir: &Path) -> Value {
    let out = relay(args, dir);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    std::fs::read(dir.join(name)).unwrap()
}

#[test]
fn parse_splits_inclusion_from_exclusion() {
    let dir = tempfile::tempdir().unwrap();
    let v = ok(&["parse", "--domain", "stocks", "show me companies in europe outside of germany"], dir.path());
    let ops = v["ops"].as_array().unwrap();
    assert_eq!(ops.len(), 2, "{v}");
    let find = |loc: &str| ops.iter().find(|o| o["location"] == loc).unwrap()["polarity"].clone();
    assert_eq!(find("europe"), "include");
    assert_eq!(find("germany"), "exclude");
    assert!(v["slots"].as_array().unwrap().iter().any(|s| s["label"] == "negation_modifier"));
}

#[test]
fn pipeline_runs_end_to_end_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let m = ok(&["generate", "--domain", "stocks", "--total", "300", "--out", "gen"], d);
    assert_eq!(m["files"]["train.jsonl"]["utterances"], 210);
    assert_eq!(m["inventory_sha256"].as_str().unwrap().len(), 64);
    assert!(d.join("gen/slot_based/test.jsonl").exists());

    ok(&["split", "--corpus", "gen/train.jsonl", "--strategy", "pattern", "--seed", "3", "--out", "a"], d);
    ok(&["split", "--corpus", "gen/train.jsonl", "--strategy", "pattern", "--seed", "3", "--out", "b"], d);
    for f in ["train.jsonl", "test.jsonl", "manifest.json"] {
        assert_eq!(read(d, &format!("a/{f}")), read(d, &format!("b/{f}")), "{f}");
    }
    let split: Value = serde_json::from_slice(&read(d, "a/manifest.json")).unwrap();
    assert_eq!(split["shared_patterns"], 0);

    ok(&["train-sf", "--train", "a/train.jsonl", "--out", "sf.json"], d);
    ok(&["train-re", "--train", "a/train.jsonl", "--out", "re.json"], d);
    ok(&["train-sf", "--train", "a/train.jsonl", "--out", "sf2.json"], d);
    ok(&["train-re", "--train", "a/train.jsonl", "--out", "re2.json"], d);
    assert_eq!(read(d, "sf.json"), read(d, "sf2.json"));
    assert_eq!(read(d, "re.json"), read(d, "re2.json"));

    let out = relay(&["extract", "--corpus", "a/test.jsonl", "--model", "re.json", "--sf-model", "sf.json", "--out", "pred.jsonl"], d);
    assert!(out.status.success());
    let report = ok(&["eval", "--gold", "a/test.jsonl", "--pred", "pred.jsonl", "--by-slot-count"], d);
    for key in ["overall", "per_label", "buckets", "counts"] {
        assert!(report.get(key).is_some(), "{key}");
    }
    assert!(report["overall"]["f1"].as_f64().unwrap() > 0.5);

    let out = relay(&["compile-ops", "--corpus", "pred.jsonl"], d);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let first: Value = serde_json::from_str(text.lines().next().unwrap()).unwrap();
    assert!(first["ops"].is_array() && first["id"].is_string());
}

#[test]
fn oracle_extraction_scores_against_itself() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["generate", "--domain", "food", "--total", "200", "--out", "gen"], d);
    ok(&["train-re", "--train", "gen/train.jsonl", "--kind", "heuristic", "--out", "h.json"], d);
    let out = relay(&["extract", "--corpus", "gen/test.jsonl", "--model", "h.json", "--oracle-slots"], d);
    std::fs::write(d.join("pred.jsonl"), &out.stdout).unwrap();
    let report = ok(&["eval", "--gold", "gen/test.jsonl", "--pred", "pred.jsonl", "--csv", "b.csv"], d);
    assert!(report["overall"]["f1"].as_f64().unwrap() > 0.5);
    assert!(String::from_utf8(read(d, "b.csv")).unwrap().starts_with("slots,utterances,p,r,f1,em\n"));
    let same = ok(&["eval", "--gold", "gen/test.jsonl", "--pred", "gen/test.jsonl"], d);
    assert_eq!(same["overall"]["em"], 1.0);
}

#[test]
fn seed_falls_back_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let run = |args: &[&str], env: Option<&str>| {
        let mut c = Command::new(env!("CARGO_BIN_EXE_relay"));
        c.args(args).current_dir(d).env_remove("RELAY_SEED");
        if let Some(s) = env {
            c.env("RELAY_SEED", s);
        }
        let out = c.output().unwrap();
        assert!(out.status.success());
        out
    };
    let out = run(&["generate", "--domain", "gaming", "--total", "100", "--out", "env"], Some("4"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("effective config {\"seed\":4"));
    run(&["generate", "--domain", "gaming", "--total", "100", "--out", "flag", "--seed", "4"], None);
    run(&["generate", "--domain", "gaming", "--total", "100", "--out", "zero"], None);
    assert_eq!(read(d, "env/train.jsonl"), read(d, "flag/train.jsonl"));
    assert_ne!(read(d, "env/train.jsonl"), read(d, "zero/train.jsonl"));
}

#[test]
fn exit_codes_separate_usage_from_validation() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(relay(&["frobnicate"], d).status.code(), Some(2));
    assert_eq!(relay(&["eval", "--gold", "x.jsonl"], d).status.code(), Some(2));
    assert_eq!(relay(&["split", "--corpus", "x", "--strategy", "zero-shot-slot", "--out", "o"], d).status.code(), Some(2));

    let missing = relay(&["eval", "--gold", "x.jsonl", "--pred", "y.jsonl"], d);
    assert_eq!(missing.status.code(), Some(1));
    assert!(missing.stdout.is_empty());
    assert!(String::from_utf8_lossy(&missing.stderr).contains("x.jsonl"));

    ok(&["generate", "--domain", "gaming", "--total", "100", "--out", "gen"], d);
    let mismatch = relay(&["train-re", "--train", "gen/train.jsonl", "--domain", "food", "--out", "m.json"], d);
    assert_eq!(mismatch.status.code(), Some(1));
    std::fs::write(d.join("bad.jsonl"), "{\"id\": 1}\n").unwrap();
    assert_eq!(relay(&["train-sf", "--train", "bad.jsonl", "--out", "m.json"], d).status.code(), Some(1));
}

#[test]
fn zero_shot_split_holds_the_construct_out() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(&["generate", "--domain", "gaming", "--out", "gen"], d);
    std::fs::write(
        d.join("all.jsonl"),
        [read(d, "gen/train.jsonl"), read(d, "gen/dev.jsonl"), read(d, "gen/test.jsonl")].concat(),
    )
    .unwrap();
    let m = ok(
        &["split", "--corpus", "all.jsonl", "--strategy", "zero-shot-pair", "--pair", "enchantment,monster", "--k", "8", "--out", "z"],
        d,
    );
    assert_eq!(m["test"]["utterances"], 50);
    assert_eq!(m["spec"]["strategy"]["k"], 8);
}
