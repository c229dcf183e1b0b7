use std::path::{Path, PathBuf};
use std::process::Command;

use sha2::{Digest, Sha256};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_karb"))
}

fn example(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("examples").join(rel)
}

fn run(args: &[&str], dir: &Path) -> (i32, String, String) {
    let o = bin().args(args).current_dir(dir).output().unwrap();
    (o.status.code().unwrap(), String::from_utf8(o.stdout).unwrap(), String::from_utf8(o.stderr).unwrap())
}

fn digest(path: &Path) -> String {
    hex::encode(Sha256::digest(std::fs::read(path).unwrap()))
}

#[test]
fn check_reports_the_contradiction() {
    let dir = tempfile::tempdir().unwrap();
    let prog = example("programs/example2.karb");
    let (code, out, _) = run(&["check", prog.to_str().unwrap(), "--emit-dot", "g.dot", "--proof-only", "--emit-json", "g.json"], dir.path());
    assert_eq!(code, 0);
    let mut lines = out.lines();
    assert_eq!(lines.next(), Some("CONTRADICTION"));
    assert!(lines.next().unwrap().starts_with("witness: "));
    let dot = std::fs::read_to_string(dir.path().join("g.dot")).unwrap();
    assert!(dot.starts_with("digraph"));
    assert!(dot.contains("Breach(sk_1)"));
    let json: serde_json::Value = serde_json::from_slice(&std::fs::read(dir.path().join("g.json")).unwrap()).unwrap();
    assert_eq!(json["verdict"]["kind"], "contradiction");
}

#[test]
fn check_on_empty_and_broken_programs() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("empty.karb"), "").unwrap();
    let (code, out, _) = run(&["check", "empty.karb"], dir.path());
    assert_eq!(code, 0);
    assert!(out.starts_with("SATURATED\npasses: 0\nterms: 0\n"), "{out}");

    std::fs::write(dir.path().join("bad.karb"), "p(a).\nrule r : p(X) => .\n").unwrap();
    let (code, _, err) = run(&["check", "bad.karb"], dir.path());
    assert_eq!(code, 1);
    assert!(err.contains("bad.karb:2"), "{err}");

    let (code, _, err) = run(&["check", "missing.karb"], dir.path());
    assert_eq!(code, 1);
    assert!(err.contains("missing.karb"));
}

#[test]
fn budget_exhaustion_is_a_verdict() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("grow.karb"), "n(z).\nrule succ : n(X) => n(s(X)).\n").unwrap();
    let (code, out, _) = run(&["check", "grow.karb", "--max-passes", "5"], dir.path());
    assert_eq!(code, 0);
    assert!(out.starts_with("BUDGET EXHAUSTED\npasses: 5\n"), "{out}");
}

#[test]
fn usage_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(&["frobnicate"], dir.path()).0, 2);
    assert_eq!(run(&["fit", "x.csv", "--method", "magic"], dir.path()).0, 2);
    assert_eq!(run(&["--help"], dir.path()).0, 0);
}

#[test]
fn commands_are_deterministic_across_runs() {
    let rules = example("programs/example2.karb");
    let runs: Vec<Vec<String>> = (0..2)
        .map(|_| {
            let dir = tempfile::tempdir().unwrap();
            let d = dir.path();
            let mut hashes = Vec::new();
            let (c, o, _) = run(&["synth", "--records", "1500", "--communities", "30", "--seed", "7", "--out", "s.csv"], d);
            assert_eq!(c, 0);
            hashes.push(o);
            hashes.push(digest(&d.join("s.csv")));
            let (c, o, _) = run(&["check", rules.to_str().unwrap(), "--emit-json", "c.json", "--emit-dot", "c.dot"], d);
            assert_eq!(c, 0);
            hashes.extend([o, digest(&d.join("c.json")), digest(&d.join("c.dot"))]);
            let (c, o, _) = run(&["analyze", "s.csv", "--measure-y", "usability", "--app", "M2", "--out", "a.csv"], d);
            assert_eq!(c, 0);
            hashes.extend([o, digest(&d.join("a.csv"))]);
            let (c, o, _) = run(&["fit", "s.csv", "--app", "M1", "--budget", "300", "--emit-trace", "t.csv"], d);
            assert_eq!(c, 0, "{o}");
            hashes.extend([o, digest(&d.join("t.csv"))]);
            let experts = example("data/experts.cfg");
            let (c, o, e) = run(&["bench", "s.csv", "--experts", experts.to_str().unwrap(), "--out", "b.csv"], d);
            assert_eq!(c, 0, "{e}");
            hashes.extend([o, digest(&d.join("b.csv")), digest(&d.join("b.curve.csv")), digest(&d.join("b.meta.json"))]);
            hashes
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
}

#[test]
fn synth_output_matches_bundled_survey() {
    let dir = tempfile::tempdir().unwrap();
    let (code, _, _) = run(&["synth", "--seed", "42", "--out", "s.csv"], dir.path());
    assert_eq!(code, 0);
    assert_eq!(digest(&dir.path().join("s.csv")), digest(&example("data/survey.csv")));
}

#[test]
fn bench_without_expert_scores_fails_that_row_only() {
    let dir = tempfile::tempdir().unwrap();
    let survey = example("data/survey.csv");
    let (code, out, err) = run(&["bench", survey.to_str().unwrap(), "--out", "b.csv"], dir.path());
    let text = std::fs::read_to_string(dir.path().join("b.csv")).unwrap_or_default();
    assert_eq!(code, 0, "{out}{err}");
    assert!(text.lines().any(|l| l.starts_with("data_driven_karb,M1,")), "{text}");
    assert!(text.lines().any(|l| l == "expert_score,M1,"), "{text}");
}
