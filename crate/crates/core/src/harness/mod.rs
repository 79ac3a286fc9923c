//! Config-driven experiment runner behind the `tracelab` binary.
//!
//! A run writes `checks.csv` (one row per evaluated invariant),
//! `summary.csv` (one row per check name) and the experiment's own tables
//! into the output directory. Output depends only on the config and seed.

pub mod config;
pub mod experiments;
pub mod report;

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
pub use config::{DataSelector, ExperimentConfig, ExperimentKind, HardChecks, OperatorChoice};
pub use experiments::{run_experiment, Outcome};
pub use report::{BoundKind, CheckRow};

/// Environment variable fixing the worker count.
pub const THREADS_ENV: &str = "TRACELAB_THREADS";

/// Result of a harness run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub checks: Vec<CheckRow>,
    /// `(check name, all rows pass, hard)` in first-appearance order.
    pub summary: Vec<(String, bool, bool)>,
}

impl RunSummary {
    pub fn hard_failures(&self) -> Vec<&str> {
        self.summary.iter().filter(|(_, pass, hard)| *hard && !*pass).map(|(n, _, _)| n.as_str()).collect()
    }

    pub fn exit_code(&self) -> i32 {
        if self.hard_failures().is_empty() {
            0
        } else {
            1
        }
    }
}

/// Size the global pool from `TRACELAB_THREADS` when set. Results do not
/// depend on the thread count.
pub fn init_threads() -> Result<()> {
    let Ok(v) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| Error::Config(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
    if n == 0 {
        return Err(Error::Config(format!("{THREADS_ENV} must be positive")));
    }
    // a pool that already exists keeps its size
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn summarize(checks: &[CheckRow], hard: &HardChecks) -> Vec<(String, bool, bool)> {
    let mut out: Vec<(String, bool, bool)> = Vec::new();
    for c in checks {
        match out.iter_mut().find(|(n, _, _)| *n == c.check_name) {
            Some(entry) => entry.1 &= c.pass,
            None => out.push((c.check_name.clone(), c.pass, hard.is_hard(&c.check_name))),
        }
    }
    out
}

fn write_file(dir: &Path, name: &str, contents: &[u8]) -> Result<()> {
    let path = dir.join(name);
    fs::write(&path, contents).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

/// Run one experiment and write its files into `out_dir`.
pub fn run(kind: ExperimentKind, cfg: &ExperimentConfig, out_dir: &Path) -> Result<RunSummary> {
    cfg.validate()?;
    let outcome = run_experiment(kind, cfg)?;
    fs::create_dir_all(out_dir).map_err(|e| Error::Io(format!("{}: {e}", out_dir.display())))?;
    let summary = summarize(&outcome.checks, &cfg.hard);
    let mut buf = Vec::new();
    report::write_checks(&outcome.checks, &mut buf)?;
    write_file(out_dir, "checks.csv", &buf)?;
    buf.clear();
    report::write_summary(&summary, &mut buf)?;
    write_file(out_dir, "summary.csv", &buf)?;
    for (name, table) in &outcome.tables {
        write_file(out_dir, name, table.as_bytes())?;
    }
    Ok(RunSummary { checks: outcome.checks, summary })
}
