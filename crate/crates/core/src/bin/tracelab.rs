use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tracelab::harness::{self, ExperimentConfig, ExperimentKind};

/// Run one trace/lifting experiment and write its CSV files.
#[derive(Parser, Debug)]
#[command(name = "tracelab", version)]
struct Args {
    /// exponents, poisson, truncation, staircase, celliptic, divergence or sweep
    experiment: String,
    /// Experiment config (`key = value` lines)
    #[arg(long)]
    config: PathBuf,
    /// Output directory; defaults to the config's `output` or `out/<experiment>`
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides the config seed
    #[arg(long)]
    seed: Option<u64>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("tracelab: {e}");
            ExitCode::from(2)
        }
    }
}

fn run(args: &Args) -> tracelab::Result<u8> {
    harness::init_threads()?;
    let kind: ExperimentKind = args.experiment.parse()?;
    let mut cfg = ExperimentConfig::from_file(&args.config)?;
    if let Some(declared) = cfg.experiment {
        if declared != kind {
            return Err(tracelab::Error::Config(format!(
                "config declares experiment '{}', command line asks for '{}'",
                declared.name(),
                kind.name()
            )));
        }
    }
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    let out = args
        .out
        .clone()
        .or_else(|| cfg.output.clone())
        .unwrap_or_else(|| PathBuf::from("out").join(kind.name()));
    let summary = harness::run(kind, &cfg, &out)?;
    for (name, pass, hard) in &summary.summary {
        let status = if *pass { "pass" } else { "FAIL" };
        let tag = if *hard { "" } else { " (soft)" };
        println!("{status:4} {name}{tag}");
    }
    println!("wrote {}", out.display());
    Ok(summary.exit_code() as u8)
}
