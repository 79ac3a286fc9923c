use std::path::{Path, PathBuf};
use std::process::Command;

const EXAMPLES: &[&str] = &[
    "exponent_algebra",
    "gagliardo_seminorm",
    "maximal_domination",
    "poisson_divergence",
    "truncation_lifting",
    "staircase_lifting",
    "celliptic_trace",
    "config_run",
];

/// `target/<profile>/examples`, next to the `tracelab` binary.
fn examples_dir() -> PathBuf {
    Path::new(env!("CARGO_BIN_EXE_tracelab")).parent().unwrap().join("examples")
}

#[test]
fn every_example_runs() {
    let dir = examples_dir();
    let status = Command::new(env!("CARGO"))
        .args(["build", "--examples", "-p", "tracelab", "--quiet"])
        .current_dir(env!("CARGO_MANIFEST_DIR"))
        .args(profile_args())
        .status()
        .expect("spawn cargo");
    assert!(status.success());
    for name in EXAMPLES {
        let exe = dir.join(format!("{name}{}", std::env::consts::EXE_SUFFIX));
        assert!(exe.exists(), "missing {}", exe.display());
        let out = Command::new(&exe).current_dir(env!("CARGO_MANIFEST_DIR")).output().unwrap();
        assert!(out.status.success(), "{name}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty(), "{name} printed nothing");
    }
}

fn profile_args() -> Vec<&'static str> {
    let profile = examples_dir().parent().unwrap().file_name().unwrap().to_owned();
    if profile == "release" {
        vec!["--release"]
    } else {
        vec![]
    }
}
