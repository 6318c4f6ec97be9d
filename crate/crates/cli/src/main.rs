//! `coatlab` command line: dataset generation, coated-scene rendering,
//! compositing baselines, evaluation, and the toy flow trainer.

mod commands;
mod scene_file;

use clap::{Parser, Subcommand};
use std::process::ExitCode;

/// Usage/validation problems exit 2; runtime failures exit 1.
pub enum CliError {
    Usage(String),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }
}

impl<E: Into<anyhow::Error>> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Runtime(e.into())
    }
}

pub type CliResult = Result<(), CliError>;

#[derive(Parser)]
#[command(name = "coatlab", version, about = "Material-coating toolkit: renderer, baselines, dataset generator, evaluator, and toy flow trainer")]
struct Cli {
    /// Worker threads (default: all cores). `--threads 1` reproduces
    /// multi-threaded outputs bit-exactly.
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic coating dataset and its manifest.
    Gen(commands::gen::GenArgs),
    /// Render a coated scene to channel files and a preview image.
    Coat(commands::coat::CoatArgs),
    /// Apply a classical compositing baseline to images.
    Baseline(commands::baseline::BaselineArgs),
    /// Score methods against a generated dataset, writing a CSV report.
    Eval(commands::eval::EvalArgs),
    /// Train the toy flow model on a generated dataset.
    Train(commands::train::TrainArgs),
    /// Sample an image from a trained checkpoint.
    Sample(commands::sample::SampleArgs),
    /// Verify trainer gradients against finite differences.
    Gradcheck(commands::gradcheck::GradcheckArgs),
}

fn run(cli: Cli) -> CliResult {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(CliError::usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global()
            .map_err(|e| CliError::Runtime(e.into()))?;
    }
    match cli.command {
        Command::Gen(args) => commands::gen::run(args),
        Command::Coat(args) => commands::coat::run(args),
        Command::Baseline(args) => commands::baseline::run(args),
        Command::Eval(args) => commands::eval::run(args),
        Command::Train(args) => commands::train::run(args),
        Command::Sample(args) => commands::sample::run(args),
        Command::Gradcheck(args) => commands::gradcheck::run(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Runtime(err)) => {
            eprintln!("error: {err:#}");
            ExitCode::from(1)
        }
    }
}
