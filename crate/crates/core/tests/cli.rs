use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_tracelab"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(format!("{name}.cfg"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("spawn tracelab")
}

fn write_cfg(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    fs::write(&p, text).unwrap();
    p
}

fn read(dir: &Path, name: &str) -> String {
    fs::read_to_string(dir.join(name)).unwrap()
}

#[test]
fn passing_run_exits_zero_and_writes_tables() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["exponents", "--config", config("exponents").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("pass conjugate_identity"), "{stdout}");
    assert!(read(dir.path(), "summary.csv").lines().count() > 1);
    assert!(read(dir.path(), "exponents.csv").starts_with("n,p,q,p_star,p_bar,r,beta"));
}

#[test]
fn hard_failure_exits_one_soft_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    // near the lower end of the alpha range one doubling of height grows too little
    let base = "n = 2\n[exp]\np = 2\nalpha = 0.6\n[divergence]\nheights = 4, 8\n";
    let cfg = write_cfg(dir.path(), base);
    let out_dir = dir.path().join("hard");
    let out = run(&["divergence", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("FAIL divergence_growth"));

    let cfg = write_cfg(dir.path(), &format!("hard = none\n{base}"));
    let out_dir = dir.path().join("soft");
    let out = run(&["divergence", "--config", cfg.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("(soft)"));
}

#[test]
fn bad_config_exits_two_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_cfg(dir.path(), "n = 2\n[exp]\np = two\n");
    let out = run(&["exponents", "--config", cfg.to_str().unwrap(), "--out", dir.path().join("o").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3"), "{err}");
}

#[test]
fn mismatched_experiment_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(&["poisson", "--config", config("divergence").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("divergence"));
}

#[test]
fn seed_flag_overrides_and_runs_repeat() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("celliptic");
    let go = |seed: &str, tag: &str| {
        let o = dir.path().join(tag);
        let out = run(&["celliptic", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap(), "--seed", seed]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
        o
    };
    let (a, b, c) = (go("0", "a"), go("0", "b"), go("7", "c"));
    for f in ["checks.csv", "summary.csv", "trace.csv", "scales.csv"] {
        assert_eq!(read(&a, f), read(&b, f), "{f}");
    }
    assert_ne!(read(&a, "scales.csv"), read(&c, "scales.csv"));
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("sweep");
    let go = |threads: &str| {
        let o = dir.path().join(threads);
        let out = bin()
            .env("TRACELAB_THREADS", threads)
            .args(["sweep", "--config", cfg.to_str().unwrap(), "--out", o.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(out.status.code(), Some(0));
        o
    };
    let (one, four) = (go("1"), go("4"));
    for f in ["checks.csv", "summary.csv", "sweep.csv"] {
        assert_eq!(read(&one, f), read(&four, f), "{f}");
    }
}
