//! Line-delimited JSON for per-frame detections and ground truth.
//!
//! Detections: `{"frame": 3, "detections": [{"x":..,"y":..,"w":..,"h":..,"conf":..}]}`,
//! one object per frame; omitted frames have no detections.
//!
//! Truth: `{"frame": 3, "x":..,"y":..,"w":..,"h":..}`, one line per frame.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::FormatError;
use crate::model::{BoundingBox, Detection};

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDetection {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
    conf: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FrameLine {
    frame: u64,
    detections: Vec<RawDetection>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TruthLine {
    frame: u64,
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

/// Scale of the `conf` field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ConfidenceScale {
    #[default]
    Unit,
    Percent,
}

fn lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// Detections of one frame and the line they were read from.
#[derive(Debug, Clone, PartialEq)]
pub struct DetectionLine {
    pub line: usize,
    pub frame: u64,
    pub detections: Vec<Detection>,
}

/// Parses a detections file into `frame -> detections`.
pub fn parse_detections(
    text: &str,
    scale: ConfidenceScale,
) -> Result<BTreeMap<u64, Vec<Detection>>, FormatError> {
    Ok(parse_detection_lines(text, scale)?
        .into_iter()
        .map(|l| (l.frame, l.detections))
        .collect())
}

/// Like [`parse_detections`] but keeps file order and line numbers.
pub fn parse_detection_lines(
    text: &str,
    scale: ConfidenceScale,
) -> Result<Vec<DetectionLine>, FormatError> {
    let mut out = Vec::new();
    let mut seen = BTreeMap::new();
    for (n, line) in lines(text) {
        let parsed: FrameLine =
            serde_json::from_str(line).map_err(|e| FormatError::new(n, e.to_string()))?;
        let mut dets = Vec::with_capacity(parsed.detections.len());
        for raw in parsed.detections {
            let bbox = BoundingBox::new(raw.x, raw.y, raw.w, raw.h)
                .map_err(|e| FormatError::new(n, e.to_string()))?;
            let det = match scale {
                ConfidenceScale::Unit => Detection::new(bbox, raw.conf),
                ConfidenceScale::Percent => Detection::from_percent(bbox, raw.conf),
            }
            .map_err(|e| FormatError::new(n, e.to_string()))?;
            dets.push(det);
        }
        if let Some(first) = seen.insert(parsed.frame, n) {
            return Err(FormatError::new(
                n,
                format!("duplicate frame {} (first on line {first})", parsed.frame),
            ));
        }
        out.push(DetectionLine {
            line: n,
            frame: parsed.frame,
            detections: dets,
        });
    }
    Ok(out)
}

/// Writes one line per frame, including frames without detections.
pub fn write_detections(per_frame: &[Vec<Detection>]) -> String {
    let mut out = String::new();
    for (frame, dets) in per_frame.iter().enumerate() {
        let line = FrameLine {
            frame: frame as u64,
            detections: dets
                .iter()
                .map(|d| {
                    let b = d.bbox();
                    RawDetection {
                        x: b.x(),
                        y: b.y(),
                        w: b.w(),
                        h: b.h(),
                        conf: d.confidence(),
                    }
                })
                .collect(),
        };
        out.push_str(&serde_json::to_string(&line).expect("plain data serializes"));
        out.push('\n');
    }
    out
}

/// Parses a truth file; frames must be listed as 0, 1, 2, ... in order.
pub fn parse_truth(text: &str) -> Result<Vec<BoundingBox>, FormatError> {
    let mut out = Vec::new();
    for (n, line) in lines(text) {
        let t: TruthLine =
            serde_json::from_str(line).map_err(|e| FormatError::new(n, e.to_string()))?;
        if t.frame != out.len() as u64 {
            return Err(FormatError::new(
                n,
                format!("expected frame {}, found {}", out.len(), t.frame),
            ));
        }
        out.push(
            BoundingBox::new(t.x, t.y, t.w, t.h).map_err(|e| FormatError::new(n, e.to_string()))?,
        );
    }
    Ok(out)
}

pub fn write_truth(boxes: &[BoundingBox]) -> String {
    let mut out = String::new();
    for (frame, b) in boxes.iter().enumerate() {
        let line = TruthLine {
            frame: frame as u64,
            x: b.x(),
            y: b.y(),
            w: b.w(),
            h: b.h(),
        };
        out.push_str(&serde_json::to_string(&line).expect("plain data serializes"));
        out.push('\n');
    }
    out
}
