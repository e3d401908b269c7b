use std::path::PathBuf;

use clap::Args;
use trackfuse_core::formats::{self, pgm};
use trackfuse_core::simulator::{self, Scenario};
use trackfuse_core::SimulationError;

use crate::error::{read_text, write_file, CliError};
use crate::track::load_detections;

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario JSON.
    #[arg(long)]
    pub scenario: PathBuf,
    /// Output directory; receives frames/, detections.jsonl and truth.jsonl.
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &SimulateArgs) -> Result<(), CliError> {
    let scenario: Scenario = serde_json::from_str(&read_text(&args.scenario)?)
        .map_err(|e| CliError::format_in(&args.scenario, e))?;
    scenario.validate().map_err(|e: SimulationError| {
        CliError::Config(format!("{}: {e}", args.scenario.display()))
    })?;
    let rendered = simulator::render(&scenario).map_err(|e| CliError::Config(e.to_string()))?;
    let truths: Vec<_> = rendered.iter().map(|r| r.truth).collect();
    let detections = simulator::emulate_detector(&scenario, &truths);

    let frames_dir = args.out.join("frames");
    std::fs::create_dir_all(&frames_dir).map_err(|e| CliError::io(&frames_dir, e))?;
    for (t, r) in rendered.iter().enumerate() {
        write_file(
            &frames_dir.join(format!("frame_{t:06}.pgm")),
            pgm::write_frame(&r.frame),
        )?;
    }
    write_file(
        &args.out.join("detections.jsonl"),
        formats::write_detections(&detections),
    )?;
    write_file(&args.out.join("truth.jsonl"), formats::write_truth(&truths))
}

#[derive(Debug, Args)]
pub struct ScoreArgs {
    /// Truth JSONL written by `simulate`.
    #[arg(long)]
    pub truth: PathBuf,
    /// Raw detections JSONL (the baseline).
    #[arg(long)]
    pub detections: PathBuf,
    /// Tracker output in MOT CSV.
    #[arg(long)]
    pub tracks: PathBuf,
    /// Threshold the baseline detector is held to.
    #[arg(long, default_value_t = 0.6)]
    pub conf_h: f64,
    #[arg(long)]
    pub percent_confidence: bool,
    /// Also write the metrics JSON here.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

pub fn score(args: &ScoreArgs) -> Result<(), CliError> {
    if !(args.conf_h > 0.0 && args.conf_h <= 1.0) {
        return Err(CliError::Config("0 < conf_h <= 1 violated".into()));
    }
    let truths = formats::parse_truth(&read_text(&args.truth)?)
        .map_err(|e| CliError::format_at(&args.truth, e.line, e.message))?;
    let scale = if args.percent_confidence {
        formats::ConfidenceScale::Percent
    } else {
        formats::ConfidenceScale::Unit
    };
    let mut per_frame = vec![Vec::new(); truths.len()];
    for line in load_detections(&args.detections, scale)? {
        match per_frame.get_mut(line.frame as usize) {
            Some(slot) => *slot = line.detections,
            None => {
                return Err(CliError::format_at(
                    &args.detections,
                    line.line,
                    format!(
                        "frame {} is beyond the {} truth frames",
                        line.frame,
                        truths.len()
                    ),
                ))
            }
        }
    }
    let rows = formats::parse_mot(&read_text(&args.tracks)?)
        .map_err(|e| CliError::format_at(&args.tracks, e.line, e.message))?;
    let metrics = simulator::score(&rows, &per_frame, &truths, args.conf_h);
    let json = serde_json::to_string(&metrics).expect("metrics serialize") + "\n";
    print!("{json}");
    if let Some(path) = &args.output {
        write_file(path, &json)?;
    }
    Ok(())
}
