use std::path::{Path, PathBuf};

use tempfile::TempDir;
use valued_groups::cli;

struct Run {
    code: i32,
    out: String,
    err: String,
}

fn run(args: &[&str]) -> Run {
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let argv = std::iter::once("valgrp").chain(args.iter().copied());
    let code = cli::run(argv, &mut out, &mut err);
    Run { code, out: String::from_utf8(out).unwrap(), err: String::from_utf8(err).unwrap() }
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn word_metric_on_z3() {
    let r = run(&["wordmetric", "--N", "3"]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("‖Σe_j‖_F = 2/1"), "{}", r.out);
    assert!(r.out.contains("‖e_1 − e_2‖_F = 1/1"));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(run(&["group", "validate"]).code, 2);
    assert_eq!(run(&["no-such-command"]).code, 2);
    assert_eq!(run(&["suite", "no-such-suite", "--seed", "1"]).code, 2);
    assert_eq!(run(&["--help"]).code, 0);
    assert_eq!(run(&["suite", "list"]).code, 0);
}

#[test]
fn schema_errors_name_the_path() {
    let dir = TempDir::new().unwrap();
    let bad = write(
        &dir,
        "bad.json",
        r#"{"factors":[4],"cap":"inf","exponent":4,"value":{"0":"0","1":"x","2":"1","3":"1"}}"#,
    );
    let r = run(&["value", "validate", "--config", s(&bad)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("value.1"), "{}", r.err);
    let missing =
        write(&dir, "missing.json", r#"{"factors":[4],"cap":"inf","exponent":4,"value":{"0":"0","1":"1","3":"1"}}"#);
    let r = run(&["value", "validate", "--config", s(&missing)]);
    assert_eq!(r.code, 2);
    assert!(r.err.contains("missing element \"2\""), "{}", r.err);
}

#[test]
fn failed_properties_exit_one() {
    let dir = TempDir::new().unwrap();
    let v =
        write(&dir, "v.json", r#"{"factors":[4],"cap":"inf","exponent":4,"value":{"0":"0","1":"1","2":"3","3":"1"}}"#);
    assert_eq!(run(&["value", "validate", "--config", s(&v)]).code, 1);
    let k = write(
        &dir,
        "k.json",
        r#"{"group":{"factors":[2],"cap":"inf","exponent":2,"value":{"0":"0","1":"1"}},
            "katetov":{"domain":[[0],[1]],"f":{"0":"1/2","1":"1/2"},"cap":"inf"}}"#,
    );
    assert_eq!(run(&["katetov", "realize", "--config", s(&k)]).code, 1);
    let r = run(&["katetov", "extend", "--config", s(&k)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("\"witness\""));
}

#[test]
fn seeded_runs_are_deterministic() {
    let a = run(&["amalgamate", "a2", "--seed", "11"]);
    let b = run(&["amalgamate", "a2", "--seed", "11"]);
    assert_eq!(a.code, 0, "{}", a.err);
    assert_eq!(a.out, b.out);
    let c = run(&["amalgamate", "a3"]);
    assert_eq!(c.code, 0, "{}", c.err);
    assert!(c.out.starts_with("seed: "));
}

#[test]
fn chain_round_trip_and_tamper() {
    let dir = TempDir::new().unwrap();
    let cfg = write(&dir, "cfg.json", r#"{"grid_denominator_log2":1,"cap":"1","N":2,"max_order":4,"rounds":2}"#);
    let out = dir.path().join("chain.json");
    let r = run(&["chain", "build", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(r.code, 0, "{}", r.err);
    let first = std::fs::read_to_string(&out).unwrap();
    let r = run(&["chain", "verify", "--config", s(&cfg), "--chain", s(&out)]);
    assert_eq!(r.code, 0, "{}{}", r.out, r.err);
    assert!(r.out.contains("(100.0%)"));

    run(&["chain", "build", "--config", s(&cfg), "--out", s(&out)]);
    assert_eq!(std::fs::read_to_string(&out).unwrap(), first);

    let tampered = first.replacen("\"amalgamated\": true", "\"amalgamated\": false", 1).replacen(
        "\"satisfied_at\": 1",
        "\"satisfied_at\": 0",
        1,
    );
    assert_ne!(tampered, first);
    let bad = write(&dir, "bad.json", &tampered);
    assert_eq!(run(&["chain", "verify", "--config", s(&cfg), "--chain", s(&bad)]).code, 1);

    let r = run(&["chain", "build", "--config", s(&cfg), "--format", "dot"]);
    assert!(r.out.contains("digraph chain"));
}

#[test]
fn free_group_commands() {
    let dir = TempDir::new().unwrap();
    let f = write(
        &dir,
        "f.json",
        r#"{"space":{"points":["a","b","c","d"],"d":{"a,b":"1","a,c":"2","a,d":"2","b,c":"2","b,d":"2","c,d":"1"}},"N":2,"coefficients":[1,1,1,1]}"#,
    );
    let r = run(&["free", "matching", "--config", s(&f)]);
    assert_eq!(r.code, 0, "{}", r.err);
    assert!(r.out.contains("\"agree\": true"));
    assert!(r.out.contains("minimum perfect matching 2/1"), "{}", r.out);
}
