use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use log::info;
use trackfuse_core::formats::{self, pgm, ConfidenceScale};
use trackfuse_core::{Detection, FrameInput, TemplateMode, Tracker, TrackerConfig};

use crate::error::{read_text, write_file, CliError};

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum TemplateModeArg {
    Rolling,
    Frozen,
}

/// Threshold flags shared by `track` and `score`.
#[derive(Debug, Args)]
pub struct ThresholdArgs {
    /// JSON file with tracker settings; flags override its values.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub conf_h: Option<f64>,
    #[arg(long)]
    pub conf_l: Option<f64>,
    #[arg(long)]
    pub iou_thresh: Option<f64>,
    #[arg(long)]
    pub ncc_thresh: Option<f64>,
    #[arg(long)]
    pub search_margin: Option<f64>,
    #[arg(long)]
    pub max_substitutions: Option<u32>,
    #[arg(long, value_enum)]
    pub template_mode: Option<TemplateModeArg>,
    /// Frames a suspended track is kept before it is dropped.
    #[arg(long)]
    pub retire_after: Option<u32>,
}

impl ThresholdArgs {
    pub fn resolve(&self) -> Result<TrackerConfig, CliError> {
        let mut cfg = match &self.config {
            Some(path) => {
                serde_json::from_str(&read_text(path)?).map_err(|e| CliError::format_in(path, e))?
            }
            None => TrackerConfig::default(),
        };
        macro_rules! apply {
            ($($field:ident),*) => { $(if let Some(v) = self.$field { cfg.$field = v; })* };
        }
        apply!(
            conf_h,
            conf_l,
            iou_thresh,
            ncc_thresh,
            search_margin,
            max_substitutions,
            retire_after
        );
        if let Some(mode) = self.template_mode {
            cfg.template_mode = match mode {
                TemplateModeArg::Rolling => TemplateMode::Rolling,
                TemplateModeArg::Frozen => TemplateMode::Frozen,
            };
        }
        cfg.validate()
            .map_err(|e| CliError::Config(format!("invalid tracker configuration: {e}")))?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
pub struct TrackArgs {
    /// Directory of 8-bit binary PGM frames, processed in lexicographic order.
    #[arg(
        long,
        conflicts_with = "video_list",
        required_unless_present = "video_list"
    )]
    pub frames: Option<PathBuf>,
    /// Text file listing frame paths, one per line (relative to the list file).
    #[arg(long)]
    pub video_list: Option<PathBuf>,
    /// Detections JSONL.
    #[arg(long)]
    pub detections: PathBuf,
    /// Confidences in the detections file are percentages.
    #[arg(long)]
    pub percent_confidence: bool,
    /// MOT CSV output path.
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub thresholds: ThresholdArgs,
}

pub fn list_frames(args: &TrackArgs) -> Result<Vec<PathBuf>, CliError> {
    if let Some(dir) = &args.frames {
        let mut paths = Vec::new();
        for entry in std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))? {
            let path = entry.map_err(|e| CliError::io(dir, e))?.path();
            let is_pgm = path
                .extension()
                .is_some_and(|e| e.eq_ignore_ascii_case("pgm"));
            if path.is_file() && is_pgm {
                paths.push(path);
            }
        }
        paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
        return Ok(paths);
    }
    let list = args
        .video_list
        .as_ref()
        .expect("clap requires one frame source");
    let base = list.parent().unwrap_or(Path::new(""));
    Ok(read_text(list)?
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| base.join(l))
        .collect())
}

pub fn load_detections(
    path: &Path,
    scale: ConfidenceScale,
) -> Result<Vec<formats::DetectionLine>, CliError> {
    formats::parse_detection_lines(&read_text(path)?, scale)
        .map_err(|e| CliError::format_at(path, e.line, e.message))
}

pub fn run(args: &TrackArgs) -> Result<(), CliError> {
    let cfg = args.thresholds.resolve()?;
    let scale = if args.percent_confidence {
        ConfidenceScale::Percent
    } else {
        ConfidenceScale::Unit
    };
    let lines = load_detections(&args.detections, scale)?;
    let frames = list_frames(args)?;
    if let Some(bad) = lines.iter().find(|l| l.frame >= frames.len() as u64) {
        return Err(CliError::format_at(
            &args.detections,
            bad.line,
            format!(
                "detections reference frame {} but only {} frames were given",
                bad.frame,
                frames.len()
            ),
        ));
    }
    let mut per_frame: BTreeMap<u64, Vec<Detection>> =
        lines.into_iter().map(|l| (l.frame, l.detections)).collect();

    let mut tracker = Tracker::new(cfg).map_err(|e| CliError::Config(e.to_string()))?;
    let mut outputs = Vec::new();
    for (index, path) in frames.iter().enumerate() {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        let frame = pgm::read_frame(&bytes).map_err(|e| CliError::format_in(path, e))?;
        let input = FrameInput {
            frame_index: index as u64,
            frame,
            detections: per_frame.remove(&(index as u64)).unwrap_or_default(),
        };
        outputs.extend(
            tracker
                .step(&input)
                .map_err(|e| CliError::Format(e.to_string()))?,
        );
    }
    info!("{} frames, {} track outputs", frames.len(), outputs.len());
    write_file(&args.output, formats::write_mot(&outputs))
}
