//! Rule-based detection stabilization.
//!
//! Detections are gated by two confidence thresholds. Confident detections
//! (`conf >= conf_h`) are trusted as they are and refresh the track. Provisional
//! detections (`conf_l <= conf < conf_h`) are checked against a box predicted by
//! correlating the track's template from the previous frame with a search
//! region in the current one:
//!
//! 1. if the predicted box overlaps the provisional one by at least
//!    `iou_thresh`, the provisional box is kept;
//! 2. otherwise, if the correlation peak reaches `ncc_thresh`, the predicted
//!    box is kept;
//! 3. otherwise the track is suspended until a confident detection returns.
//!
//! Kept boxes carry the track's last confident score. Anything below `conf_l`
//! is dropped and suspends the track it would have matched.

mod associate;

pub use associate::{associate, association_cost};

use log::warn;

use crate::config::{TemplateMode, TrackerConfig};
use crate::correlation::{extract_patch, locate};
use crate::error::TrackerError;
use crate::geometry::iou;
use crate::model::{BoundingBox, Detection, FrameBuffer};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrackStatus {
    Active,
    Waiting,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrackEntry {
    pub id: u64,
    pub last_box: BoundingBox,
    /// Last detector confidence at or above `conf_h` seen for this track.
    pub last_confidence: f64,
    /// Pixels under the reference box; `None` when the box rounds to nothing.
    pub template: Option<FrameBuffer>,
    /// Consecutive substitutions since the last confident detection.
    pub substitution_count: u32,
    pub status: TrackStatus,
    /// Consecutive frames spent waiting.
    pub waiting_frames: u32,
}

/// Per-stream tracker memory.
#[derive(Debug, Clone, PartialEq)]
pub struct TrackerState {
    pub tracks: Vec<TrackEntry>,
    pub next_track_id: u64,
    pub last_frame_index: Option<u64>,
}

impl Default for TrackerState {
    fn default() -> Self {
        Self {
            tracks: Vec::new(),
            next_track_id: 1,
            last_frame_index: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameInput {
    pub frame_index: u64,
    pub frame: FrameBuffer,
    pub detections: Vec<Detection>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Provenance {
    /// Confident detection passed through.
    Detected,
    /// Provisional detection box confirmed by the predicted box overlap.
    SubstitutedIou,
    /// Predicted box accepted on correlation strength.
    SubstitutedNcc,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrackOutput {
    pub frame_index: u64,
    pub track_id: u64,
    pub bbox: BoundingBox,
    pub confidence: f64,
    pub provenance: Provenance,
    pub substitution_count: u32,
}

/// Detections split by the two confidence gates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Classified {
    pub valid: Vec<Detection>,
    pub provisional: Vec<Detection>,
    pub discarded: Vec<Detection>,
}

/// `conf >= conf_h` is valid, `conf_l <= conf < conf_h` provisional, the rest discarded.
pub fn classify(detections: &[Detection], cfg: &TrackerConfig) -> Classified {
    let mut out = Classified::default();
    for d in detections {
        let c = d.confidence();
        if c >= cfg.conf_h {
            out.valid.push(*d);
        } else if c >= cfg.conf_l {
            out.provisional.push(*d);
        } else {
            out.discarded.push(*d);
        }
    }
    out
}

/// Advances one stream by one frame and returns what it emits for that frame.
pub fn step(
    state: &mut TrackerState,
    input: &FrameInput,
    cfg: &TrackerConfig,
) -> Result<Vec<TrackOutput>, TrackerError> {
    cfg.validate()?;
    if let Some(previous) = state.last_frame_index {
        if input.frame_index <= previous {
            return Err(TrackerError::NonMonotoneFrame {
                previous,
                got: input.frame_index,
            });
        }
    }
    state.last_frame_index = Some(input.frame_index);

    let frame = &input.frame;
    let (fw, fh) = (frame.width() as f64, frame.height() as f64);
    let detections = clamp_detections(&input.detections, input.frame_index, fw, fh);
    let classes = classify(&detections, cfg);

    // Valid detections first so candidate index < valid.len() means "valid".
    let n_valid = classes.valid.len();
    let candidates: Vec<Detection> = classes
        .valid
        .iter()
        .chain(&classes.provisional)
        .copied()
        .collect();

    // Active tracks compete for every candidate; suspended tracks may only be
    // revived by a leftover confident detection.
    let active_matches = associate(
        state
            .tracks
            .iter()
            .filter(|t| t.status == TrackStatus::Active),
        &candidates,
        &cfg.association,
        fw,
        fh,
    );
    let mut claimed = vec![false; candidates.len()];
    for &ci in active_matches.values() {
        claimed[ci] = true;
    }
    let free_valid: Vec<usize> = (0..n_valid).filter(|&i| !claimed[i]).collect();
    let free_dets: Vec<Detection> = free_valid.iter().map(|&i| candidates[i]).collect();
    let waiting_matches = associate(
        state
            .tracks
            .iter()
            .filter(|t| t.status == TrackStatus::Waiting),
        &free_dets,
        &cfg.association,
        fw,
        fh,
    );
    for &k in waiting_matches.values() {
        claimed[free_valid[k]] = true;
    }

    let mut outputs = Vec::new();
    for track in &mut state.tracks {
        let matched = match track.status {
            TrackStatus::Active => active_matches.get(&track.id).copied(),
            TrackStatus::Waiting => waiting_matches.get(&track.id).map(|&k| free_valid[k]),
        };
        let emitted = match matched {
            Some(ci) if ci < n_valid => {
                Some(confirm(track, &candidates[ci], frame, input.frame_index))
            }
            Some(ci) if track.status == TrackStatus::Active => {
                substitute(track, &candidates[ci], frame, input.frame_index, cfg)
            }
            _ => None,
        };
        match emitted {
            Some(out) => outputs.push(out),
            None => suspend(track),
        }
    }
    state
        .tracks
        .retain(|t| t.status == TrackStatus::Active || t.waiting_frames < cfg.retire_after);

    for (ci, det) in candidates.iter().enumerate().take(n_valid) {
        if !claimed[ci] {
            outputs.push(seed(state, det, frame, input.frame_index));
        }
    }
    Ok(outputs)
}

/// Runs a whole stream from an empty state.
pub fn run_stream<'a>(
    frames: impl IntoIterator<Item = &'a FrameInput>,
    cfg: &TrackerConfig,
) -> Result<Vec<TrackOutput>, TrackerError> {
    let mut tracker = Tracker::new(*cfg)?;
    let mut out = Vec::new();
    for input in frames {
        out.extend(tracker.step(input)?);
    }
    Ok(out)
}

/// A configured tracker owning the state of one stream.
#[derive(Debug, Clone)]
pub struct Tracker {
    config: TrackerConfig,
    state: TrackerState,
}

impl Tracker {
    pub fn new(config: TrackerConfig) -> Result<Self, TrackerError> {
        config.validate()?;
        Ok(Self {
            config,
            state: TrackerState::default(),
        })
    }

    pub fn step(&mut self, input: &FrameInput) -> Result<Vec<TrackOutput>, TrackerError> {
        step(&mut self.state, input, &self.config)
    }

    pub fn config(&self) -> &TrackerConfig {
        &self.config
    }

    pub fn state(&self) -> &TrackerState {
        &self.state
    }
}

fn clamp_detections(
    detections: &[Detection],
    frame_index: u64,
    fw: f64,
    fh: f64,
) -> Vec<Detection> {
    detections
        .iter()
        .filter_map(|d| {
            if d.bbox().is_within(fw, fh) {
                return Some(*d);
            }
            match d.bbox().clamp_to(fw, fh) {
                Some(b) => {
                    warn!(
                        "frame {frame_index}: detection {:?} clamped to the frame",
                        d.bbox()
                    );
                    Some(d.with_box(b))
                }
                None => {
                    warn!(
                        "frame {frame_index}: detection {:?} outside the frame, dropped",
                        d.bbox()
                    );
                    None
                }
            }
        })
        .collect()
}

fn seed(
    state: &mut TrackerState,
    det: &Detection,
    frame: &FrameBuffer,
    frame_index: u64,
) -> TrackOutput {
    let id = state.next_track_id;
    state.next_track_id += 1;
    state.tracks.push(TrackEntry {
        id,
        last_box: *det.bbox(),
        last_confidence: det.confidence(),
        template: extract_patch(frame, det.bbox()).ok(),
        substitution_count: 0,
        status: TrackStatus::Active,
        waiting_frames: 0,
    });
    output(
        frame_index,
        id,
        *det.bbox(),
        det.confidence(),
        Provenance::Detected,
        0,
    )
}

fn confirm(
    track: &mut TrackEntry,
    det: &Detection,
    frame: &FrameBuffer,
    frame_index: u64,
) -> TrackOutput {
    track.last_box = *det.bbox();
    track.last_confidence = det.confidence();
    track.template = extract_patch(frame, det.bbox()).ok();
    track.substitution_count = 0;
    track.status = TrackStatus::Active;
    track.waiting_frames = 0;
    output(
        frame_index,
        track.id,
        *det.bbox(),
        det.confidence(),
        Provenance::Detected,
        0,
    )
}

fn substitute(
    track: &mut TrackEntry,
    det: &Detection,
    frame: &FrameBuffer,
    frame_index: u64,
    cfg: &TrackerConfig,
) -> Option<TrackOutput> {
    if track.substitution_count >= cfg.max_substitutions {
        return None;
    }
    let template = track.template.as_ref()?;
    let found = locate(template, frame, &track.last_box, cfg.search_margin).ok()?;
    let (fw, fh) = (frame.width() as f64, frame.height() as f64);
    let predicted = track
        .last_box
        .translated(found.shift.dx as f64, found.shift.dy as f64)
        .clamp_to(fw, fh)?;

    let (accepted, provenance) = if iou(&predicted, det.bbox()) >= cfg.iou_thresh {
        (*det.bbox(), Provenance::SubstitutedIou)
    } else if found.shift.peak >= cfg.ncc_thresh {
        (predicted, Provenance::SubstitutedNcc)
    } else {
        return None;
    };

    track.last_box = accepted;
    track.substitution_count += 1;
    if cfg.template_mode == TemplateMode::Rolling {
        if let Ok(patch) = extract_patch(frame, &accepted) {
            track.template = Some(patch);
        }
    }
    Some(output(
        frame_index,
        track.id,
        accepted,
        track.last_confidence,
        provenance,
        track.substitution_count,
    ))
}

fn suspend(track: &mut TrackEntry) {
    match track.status {
        TrackStatus::Active => {
            track.status = TrackStatus::Waiting;
            track.waiting_frames = 1;
        }
        TrackStatus::Waiting => track.waiting_frames += 1,
    }
}

fn output(
    frame_index: u64,
    track_id: u64,
    bbox: BoundingBox,
    confidence: f64,
    provenance: Provenance,
    substitution_count: u32,
) -> TrackOutput {
    TrackOutput {
        frame_index,
        track_id,
        bbox,
        confidence,
        provenance,
        substitution_count,
    }
}
