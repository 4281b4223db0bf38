//! `holoeeg`: synthetic data, feature extraction, cross-validated training
//! and posterior fusion driven by one TOML config.

mod config;
mod extract;
mod fuse;
mod output;
mod synth;
mod train;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use holoeeg::pipeline::Dimension;
use serde::Serialize;

use config::Run;

/// Exit code 1 for invalid input, 2 for failures while running.
#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn validation(message: impl Into<String>) -> Self {
        Failure { code: 1, message: message.into() }
    }

    pub fn runtime(message: impl Into<String>) -> Self {
        Failure { code: 2, message: message.into() }
    }
}

impl From<holoeeg::Error> for Failure {
    fn from(e: holoeeg::Error) -> Self {
        Failure { code: if e.is_validation() { 1 } else { 2 }, message: e.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DatasetKind {
    /// Any dataset in the trial interchange format.
    Interchange,
    /// DEAP converted to the interchange format; reports carry the
    /// published reference results for comparison.
    Deap,
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct Reference {
    pub source: &'static str,
    pub accuracy: f64,
    pub weighted_f1: f64,
}

/// Published late-fusion results on DEAP.
pub fn reference(kind: DatasetKind, dimension: Dimension) -> Option<Reference> {
    let source = "published DEAP late-fusion result";
    match (kind, dimension) {
        (DatasetKind::Interchange, _) => None,
        (DatasetKind::Deap, Dimension::Valence) => Some(Reference { source, accuracy: 0.688, weighted_f1: 0.672 }),
        (DatasetKind::Deap, Dimension::Arousal) => Some(Reference { source, accuracy: 0.675, weighted_f1: 0.666 }),
    }
}

#[derive(Parser)]
#[command(name = "holoeeg", version, about = "EEG emotion recognition with Hilbert-Huang features")]
struct Cli {
    /// TOML run config; relative paths inside it resolve against its directory.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value = "interchange")]
    dataset: DatasetKind,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a synthetic dataset to the configured dataset directory.
    Synth,
    /// Build the configured feature matrices and the label file.
    Extract,
    /// Grid search with stratified cross-validation for every matrix.
    TrainEval,
    /// Late fusion of posterior CSV files.
    Fuse {
        /// Posterior CSVs; defaults to the configured fuse inputs.
        files: Vec<PathBuf>,
        /// Comma-separated fusion weights, one per input.
        #[arg(long, value_delimiter = ',')]
        weights: Option<Vec<f64>>,
    },
}

fn execute(cli: Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::validation("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::runtime(format!("cannot start thread pool: {e}")))?;
    }
    let run = Run::load(cli.config.as_deref(), cli.seed)?;
    eprintln!("holoeeg: config hash {}", run.hash);
    match cli.command {
        Command::Synth => synth::run(&run),
        Command::Extract => extract::run(&run),
        Command::TrainEval => train::run(&run, cli.dataset),
        Command::Fuse { files, weights } => fuse::run(&run, &files, weights, cli.dataset),
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
