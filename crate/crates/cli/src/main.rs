//! `trackfuse` command-line tool.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 malformed or inconsistent input,
//! 3 invalid configuration.

mod dataset;
mod error;
mod simulate;
mod track;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "trackfuse",
    version,
    about = "Stabilize per-frame detections and analyze annotation corpora"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the tracker over PGM frames and a detections JSONL file; write MOT CSV.
    Track(track::TrackArgs),
    /// Render a scenario to frames, detections and ground truth.
    Simulate(simulate::SimulateArgs),
    /// Compare tracker output and raw detections against ground truth.
    Score(simulate::ScoreArgs),
    /// Corpus statistics of a VOC annotation tree as JSON.
    Stats(dataset::StatsArgs),
    /// Annotation heatmap on the 1280x1280 reference canvas.
    Heatmap(dataset::HeatmapArgs),
    /// Convert VOC annotations to normalized text labels.
    Convert(dataset::ConvertArgs),
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(raw) = std::env::var("TRACKFUSE_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().ok().filter(|&n| n > 0).ok_or_else(|| {
        CliError::Config(format!(
            "TRACKFUSE_THREADS must be a positive integer, got {raw:?}"
        ))
    })?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(e.to_string()))
}

fn run(cli: &Cli) -> Result<(), CliError> {
    configure_threads()?;
    match &cli.command {
        Command::Track(args) => track::run(args),
        Command::Simulate(args) => simulate::run(args),
        Command::Score(args) => simulate::score(args),
        Command::Stats(args) => dataset::stats(args),
        Command::Heatmap(args) => dataset::heatmap(args),
        Command::Convert(args) => dataset::convert(args),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("trackfuse: {e}");
            e.exit_code()
        }
    }
}
