use std::path::Path;
use std::process::{Command, Output};

fn reclab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_reclab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

const PASSING: &str = r#"
seed = 5

[[experiment]]
name = "quarter"
operator = "matrix([[0, -1], [1, 0]])"
vectors = ["vec(1, 2)"]
epsilons = [0.5]
horizon = 1000

[[suite]]
name = "roots"

[[suite.check]]
kind = "kronecker"
name = "fourth-root"
lambdas = ["i"]
epsilon = 1
horizon = 1000
"#;

#[test]
fn passing_config_exits_zero_and_writes_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ok.toml", PASSING);
    let out = reclab(&["run", &cfg, "--out", "res", "--workers", "2"], dir.path());
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(dir.path().join("res/summary.tsv")).unwrap();
    assert!(summary.starts_with("group\tname\tstatus\tdetail\n"));
    assert!(summary.contains("max_gap=4"), "{summary}");
    assert!(dir.path().join("res/experiments/quarter/v0/verdict.txt").exists());
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "fail.toml",
        r#"
[[suite]]
name = "wrong"

[[suite.check]]
kind = "shift_series"
name = "harmonic-claimed-convergent"
weights = "(n+1)/n"
horizon = 100000
expect = "Converging"
"#,
    );
    let out = reclab(&["run", &cfg, "--out", "res"], dir.path());
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn config_errors_exit_two_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "bad.toml",
        "[[experiment]]\nname = \"x\"\noperator = \"blockcycle\"\nvectors = [\"e(1)\"]\nepsilons = [-1]\nhorizon = 10\n",
    );
    let out = reclab(&["run", &cfg], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("bad.toml:"));

    assert_eq!(reclab(&["run", "missing.toml"], dir.path()).status.code(), Some(2));
    let flags = reclab(&["run", &cfg, "--precision", "float:0"], dir.path());
    assert_eq!(flags.status.code(), Some(2));
    let workers = reclab(&["run", &cfg, "--workers", "0"], dir.path());
    assert_eq!(workers.status.code(), Some(2));
}

#[test]
fn describe_prints_a_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = reclab(&["describe", "diag([i, turn(1/3)])"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("kind=diagonal"), "{text}");
    assert!(text.contains("criterion=holds"), "{text}");
}

#[test]
fn same_seed_gives_identical_summary() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(dir.path(), "ok.toml", PASSING);
    for (out, seed) in [("a", "1"), ("b", "1")] {
        let o = reclab(&["run", &cfg, "--out", out, "--seed", seed], dir.path());
        assert_eq!(o.status.code(), Some(0));
    }
    let a = std::fs::read(dir.path().join("a/summary.tsv")).unwrap();
    let b = std::fs::read(dir.path().join("b/summary.tsv")).unwrap();
    assert_eq!(a, b);
    let run = std::fs::read_to_string(dir.path().join("a/run.txt")).unwrap();
    assert!(run.contains("seed=1"), "{run}");
}
