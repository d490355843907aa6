//! `hardyx`: batch experiment runner for the workbench library.
//!
//! `hardyx run <config.json>` executes one experiment and writes
//! `report.csv` + `summary.txt` into the output directory; `hardyx roundtrip
//! <in> <out>` re-emits a stored field file byte-for-byte. Exit codes:
//! 0 success, 2 hypothesis violation without `--override-hypothesis`,
//! 1 any execution error.

mod config;
mod experiment;

use std::fs;
use std::io::Cursor;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Context;
use clap::{Parser, Subcommand};

use config::ExperimentConfig;

#[derive(Parser)]
#[command(name = "hardyx", version, about = "Deterministic experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the experiment described by a JSON config file.
    Run {
        /// Path to the config document.
        config: PathBuf,
        /// Proceed with the full run even when the space violates the
        /// equivalence-theorem hypotheses (otherwise such runs exit 2).
        #[arg(long)]
        override_hypothesis: bool,
        /// Output directory; overrides the config's `out`.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Random seed; overrides the config's `seed`.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Import a stored field (or half-space stack) and export it again.
    Roundtrip {
        input: PathBuf,
        output: PathBuf,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<u8> {
    match cli.command {
        Command::Run {
            config,
            override_hypothesis,
            out,
            seed,
        } => {
            let bytes = fs::read(&config)
                .with_context(|| format!("cannot read config {}", config.display()))?;
            let parsed: ExperimentConfig = serde_json::from_slice(&bytes)
                .with_context(|| format!("invalid config {}", config.display()))?;
            experiment::run_experiment(&bytes, &parsed, override_hypothesis, out, seed)
        }
        Command::Roundtrip { input, output } => {
            let bytes = fs::read(&input)
                .with_context(|| format!("cannot read field file {}", input.display()))?;
            // A half-space stack starts with a ladder header; plain fields
            // start with an {"n": ...} grid header.
            let first_line = bytes.split(|&b| b == b'\n').next().unwrap_or(&[]);
            let is_stack = first_line.windows(8).any(|w| w == b"\"levels\"");
            let mut reader = Cursor::new(&bytes);
            let mut out_bytes: Vec<u8> = Vec::with_capacity(bytes.len());
            if is_stack {
                let u = hardyx::io::import_half_space(&mut reader)
                    .with_context(|| format!("cannot import {}", input.display()))?;
                hardyx::io::export_half_space(&u, &mut out_bytes)?;
            } else {
                let f = hardyx::io::import_field(&mut reader)
                    .with_context(|| format!("cannot import {}", input.display()))?;
                hardyx::io::export_field(&f, &mut out_bytes)?;
            }
            fs::write(&output, &out_bytes)
                .with_context(|| format!("cannot write {}", output.display()))?;
            eprintln!(
                "[hardyx] roundtrip {} -> {} ({} bytes)",
                input.display(),
                output.display(),
                out_bytes.len()
            );
            Ok(0)
        }
    }
}
