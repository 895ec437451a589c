use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn dmbl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dmbl")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn check_exit_codes() {
    let proved = dmbl(&["check", "(q|p) -> (p -> q)"]);
    assert_eq!(proved.status.code(), Some(0));
    assert!(stdout(&proved).starts_with("Proved"));

    let refuted = dmbl(&["check", "(q|p) <-> q"]);
    assert_eq!(refuted.status.code(), Some(1));
    assert!(stdout(&refuted).contains("Refuted at ("), "{}", stdout(&refuted));

    let modal = dmbl(&["check", "box p -> p"]);
    assert_eq!(modal.status.code(), Some(0));
    assert!(stdout(&modal).contains("ValidInModel"));

    let bad = dmbl(&["check", "p |"]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("syntax error"));
}

#[test]
fn guard_trip_is_inconclusive() {
    let o = dmbl(&["--max-worlds", "10", "check", "((q|p)|(p|q))"]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains("Inconclusive"));
}

#[test]
fn exact_probabilities() {
    let dir = tempfile::tempdir().unwrap();
    let uniform = write(dir.path(), "u.txt", "atoms: p q\n11 1/4\n10 1/4\n01 1/4\n00 1/4\n");
    let o = dmbl(&["--dist", &uniform, "prob", "(q|p)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/2");

    let o = dmbl(&["--dist", &uniform, "prob", "p /\\ q"]);
    assert_eq!(stdout(&o).trim(), "1/4");
}

#[test]
fn degenerate_distribution_needs_smoothing() {
    let dir = tempfile::tempdir().unwrap();
    let zero = write(dir.path(), "z.txt", "atoms: p q\n11 1/2\n10 1/2\n");
    let o = dmbl(&["--dist", &zero, "prob", "(q|p)"]);
    assert_eq!(o.status.code(), Some(4));
    assert!(stderr(&o).contains("--epsilon"));

    let o = dmbl(&["--dist", &zero, "prob", "--epsilon", "(q|p)"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "1/2");
}

#[test]
fn named_worlds_distribution() {
    let dir = tempfile::tempdir().unwrap();
    let d = write(dir.path(), "w.txt", "worlds: a b c\na 1/5\nb 3/10\nc 1/2\n");
    let cases = [("(a | a \\/ b)", "2/5"), ("(b | a \\/ b) /\\ c", "3/10"), ("(c | a \\/ b)", "0/1")];
    for (f, want) in cases {
        let o = dmbl(&["--dist", &d, "prob", f]);
        assert_eq!(o.status.code(), Some(0), "{f}");
        assert_eq!(stdout(&o).trim(), want, "{f}");
    }
}

#[test]
fn independence_answers() {
    let o = dmbl(&["indep", "q", "p"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "dependent");
    let o = dmbl(&["indep", "top", "p"]);
    assert_eq!(stdout(&o).trim(), "independent");
}

#[test]
fn lewis_demo_json_keys() {
    let o = dmbl(&["--json", "lewis-demo"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["verdict", "witness", "values", "worldCount"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["verdict"], "pass");
    assert!(v["witness"].is_string());
}

#[test]
fn three_world_example_round_trips_through_a_dump() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("af.dump");
    let path = path.to_str().unwrap();
    let o = dmbl(&["appendix-f", "--dump", path]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    let o = dmbl(&["appendix-f", "--from", path]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("P1(b,c) = 3/10"));
}

#[test]
fn dump_and_load_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.dump");
    let path = path.to_str().unwrap();
    let dumped = dmbl(&["dump", "(q|p)", "(p|q)", "-o", path]);
    assert_eq!(dumped.status.code(), Some(0));
    let loaded = dmbl(&["load", path]);
    assert_eq!(loaded.status.code(), Some(0));
    let body = |o: &Output| stdout(o).lines().skip(1).map(str::to_string).collect::<Vec<_>>();
    assert_eq!(body(&dumped), body(&loaded));
    assert!(stdout(&loaded).contains("worlds = 32"));
}

#[test]
fn truncated_dump_reports_a_line() {
    let dir = tempfile::tempdir().unwrap();
    let full = dir.path().join("m.dump");
    let o = dmbl(&["dump", "(q|p)", "(p|q)", "-o", full.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let text = fs::read_to_string(&full).unwrap();
    let cut: String = text.lines().take(12).map(|l| format!("{l}\n")).collect();
    let short = write(dir.path(), "short.dump", &cut);
    let o = dmbl(&["load", &short]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("line "), "{}", stderr(&o));
}

#[test]
fn same_seed_same_json() {
    let a = dmbl(&["--json", "--seed", "7", "regress", "--atoms", "1", "--depth", "1"]);
    let b = dmbl(&["--json", "--seed", "7", "regress", "--atoms", "1", "--depth", "1"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}
