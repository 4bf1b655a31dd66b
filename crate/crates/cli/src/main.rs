//! Experiment runner for black-box phase estimation.

mod commands;
mod config;
mod instance;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use serde::Serialize;
use swapqpe::protocol::StepVariant;

use commands::{CheckStatus, Options};
use config::{RunConfig, ShotSpec};

#[derive(Debug, Parser)]
#[command(
    name = "swapqpe",
    version,
    about = "Phase estimation of U⊗U† through a black-box oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one campaign and write the result document.
    Run(Args),
    /// Brute-force the protocol invariants on a small instance.
    Verify(Args),
    /// Run one campaign per k in `[sweep].ks`.
    Sweep(Args),
}

#[derive(Debug, clap::Args)]
struct Args {
    /// TOML run configuration.
    #[arg(long)]
    config: PathBuf,
    /// Result document path; overrides `output`. Defaults to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Shot count or `exact`; overrides `shots`.
    #[arg(long)]
    shots: Option<ShotSpec>,
    /// Worker threads for the simulation pool.
    #[arg(long)]
    threads: Option<usize>,
    /// Include the hidden matrix in the result document.
    #[arg(long)]
    reveal: bool,
    /// Also write a flat table: outcomes for `run`, the summary for `sweep`,
    /// checks for `verify`.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Drop the closing conditional swap of every step (negative control).
    #[arg(long)]
    omit_closing_swap: bool,
}

impl Args {
    fn load(&self) -> Result<RunConfig> {
        let mut config = RunConfig::load(&self.config)?;
        if let Some(seed) = self.seed {
            config.seed = seed;
        }
        if let Some(shots) = self.shots {
            config.shots = shots;
        }
        if self.omit_closing_swap {
            config.variant = StepVariant::OmitClosingSwap;
        }
        if let Some(out) = &self.out {
            config.output = Some(out.clone());
        }
        config.validate()?;
        Ok(config)
    }
}

fn write_json<T: Serialize>(doc: &T, path: Option<&Path>) -> Result<()> {
    let mut text = serde_json::to_string_pretty(doc)?;
    text.push('\n');
    match path {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("cannot write {}", path.display()))
        }
        None => Ok(std::io::stdout().write_all(text.as_bytes())?),
    }
}

fn write_csv<T: Serialize>(rows: impl IntoIterator<Item = T>, path: &Path) -> Result<()> {
    let mut writer =
        csv::Writer::from_path(path).with_context(|| format!("cannot write {}", path.display()))?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct SweepCsvRow {
    k: usize,
    detected_periods: String,
    top_period: Option<f64>,
    expected_period: Option<f64>,
    nearest_grid_period: Option<f64>,
    nearest_grid_error: Option<f64>,
    top_error: Option<f64>,
}

fn dispatch(cli: Cli) -> Result<bool> {
    let args = match &cli.command {
        Command::Run(a) | Command::Verify(a) | Command::Sweep(a) => a,
    };
    if let Some(threads) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .context("cannot configure the thread pool")?;
    }
    let config = args.load()?;
    let options = Options {
        reveal: args.reveal,
    };
    let out = config.output.as_deref();
    match &cli.command {
        Command::Run(_) => {
            let doc = commands::run(&config, options)?;
            write_json(&doc, out)?;
            if let Some(path) = &args.csv {
                write_csv(&doc.campaign.histogram.outcomes, path)?;
            }
            Ok(true)
        }
        Command::Sweep(_) => {
            let doc = commands::sweep(&config, options)?;
            write_json(&doc, out)?;
            if let Some(path) = &args.csv {
                let rows = doc.summary.iter().map(|r| SweepCsvRow {
                    k: r.k,
                    detected_periods: r
                        .detected_periods
                        .iter()
                        .map(f64::to_string)
                        .collect::<Vec<_>>()
                        .join(" "),
                    top_period: r.top_period,
                    expected_period: r.expected_period,
                    nearest_grid_period: r.nearest_grid_period,
                    nearest_grid_error: r.nearest_grid_error,
                    top_error: r.top_error,
                });
                write_csv(rows, path)?;
            }
            Ok(true)
        }
        Command::Verify(_) => {
            let doc = commands::verify(&config, options)?;
            for check in &doc.checks {
                let status = match check.status {
                    CheckStatus::Pass => "PASS",
                    CheckStatus::Fail => "FAIL",
                    CheckStatus::Skipped => "SKIP",
                };
                let residual = check
                    .residual
                    .map_or("-".to_string(), |r| format!("{r:.3e}"));
                eprintln!("{status} {} residual={residual}", check.name);
            }
            write_json(&doc, out)?;
            if let Some(path) = &args.csv {
                write_csv(&doc.checks, path)?;
            }
            Ok(doc.passed)
        }
    }
}

fn main() -> ExitCode {
    match dispatch(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
