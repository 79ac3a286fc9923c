//! Run an experiment from a config file the way the binary does.
//!
//! `cargo run --example config_run -- configs/divergence.cfg divergence`

use std::path::PathBuf;

use tracelab::harness::{self, ExperimentConfig, ExperimentKind};

fn main() -> tracelab::Result<()> {
    let mut args = std::env::args().skip(1);
    let path = PathBuf::from(args.next().unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/exponents.cfg").into()));
    let kind: ExperimentKind = args.next().as_deref().unwrap_or("exponents").parse()?;
    let cfg = ExperimentConfig::from_file(&path)?;
    let out = std::env::temp_dir().join(format!("tracelab-{}", kind.name()));
    let summary = harness::run(kind, &cfg, &out)?;
    for (name, pass, _) in &summary.summary {
        println!("{:4} {name}", if *pass { "pass" } else { "FAIL" });
    }
    println!("tables in {}", out.display());
    Ok(())
}
