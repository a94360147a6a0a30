//! Batch runner: `laplace-calc run <config.json> [--out DIR] [--seed N]`.
//!
//! Each run writes `results.csv`, `summary.json` and `plot.gp` into the
//! output directory and exits with status 0 only if every assertion of the
//! experiment passed (1 on a failed assertion, 2 on configuration or
//! runtime errors). `LAPLACE_CALC_THREADS` caps the worker pool (0 = auto).

mod config;
mod experiments;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};

use config::{ExperimentConfig, EXPERIMENTS};

const DEFAULT_SEED: u64 = 20_250_101;

#[derive(Parser)]
#[command(name = "laplace-calc", version, about = "Laplace-derivative calculus experiments")]
struct Cli {
    /// List the available experiments and exit.
    #[arg(long)]
    list_experiments: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        config: PathBuf,
        /// Output directory (default: the config's `out`, else `results/<experiment>`).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Seed for randomized point selection (overrides the config).
        #[arg(long)]
        seed: Option<u64>,
    },
}

fn configure_threads() -> Result<()> {
    let Ok(v) = std::env::var("LAPLACE_CALC_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .with_context(|| format!("LAPLACE_CALC_THREADS must be a non-negative integer, got {v:?}"))?;
    if n > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .context("configuring the thread pool")?;
    }
    Ok(())
}

fn run(config: PathBuf, out: Option<PathBuf>, seed: Option<u64>) -> Result<bool> {
    let text = std::fs::read_to_string(&config).with_context(|| format!("reading {}", config.display()))?;
    let cfg = ExperimentConfig::parse(&text).with_context(|| format!("config error in {}", config.display()))?;
    let raw: serde_json::Value = serde_json::from_str(&text)?;
    let name = cfg.experiment.name();
    let seed = seed.or(cfg.seed).unwrap_or(DEFAULT_SEED);
    let dir = out
        .or(cfg.out.clone())
        .unwrap_or_else(|| PathBuf::from("results").join(name));

    let start = Instant::now();
    let report = experiments::run(&cfg.experiment, seed).with_context(|| format!("experiment {name}"))?;
    let elapsed = start.elapsed().as_secs_f64();
    report::write_outputs(&dir, name, seed, &raw, &report, elapsed)?;

    for a in &report.assertions {
        println!(
            "[{}] {}{}",
            if a.passed { "PASS" } else { "FAIL" },
            a.name,
            if a.detail.is_empty() { String::new() } else { format!(": {}", a.detail) }
        );
    }
    println!("{} rows written to {}", report.rows.len(), dir.display());
    Ok(report.all_passed())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(e) = configure_threads() {
        eprintln!("error: {e:#}");
        return ExitCode::from(2);
    }
    if cli.list_experiments {
        for (name, about) in EXPERIMENTS {
            println!("{name:<18} {about}");
        }
        return ExitCode::SUCCESS;
    }
    let Some(Command::Run { config, out, seed }) = cli.command else {
        eprintln!("error: nothing to do; use `run <config.json>` or `--list-experiments`");
        return ExitCode::from(2);
    };
    match run(config, out, seed) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
