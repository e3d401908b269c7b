//! MOT-style tracking CSV: `frame,id,bb_left,bb_top,bb_width,bb_height,conf,-1,-1,-1`.
//!
//! Frames are numbered from 1 in the file and from 0 in memory.

use std::fmt::Write as _;

use crate::error::FormatError;
use crate::model::BoundingBox;
use crate::simulator::FrameBox;
use crate::tracker::TrackOutput;

/// One parsed CSV row.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MotRow {
    /// Zero-based frame index.
    pub frame_index: u64,
    pub track_id: u64,
    pub bbox: BoundingBox,
    pub confidence: f64,
}

/// Writes rows in output order with 2-decimal geometry and 4-decimal confidence.
pub fn write_mot(outputs: &[TrackOutput]) -> String {
    let mut out = String::new();
    for o in outputs {
        let b = &o.bbox;
        let _ = writeln!(
            out,
            "{},{},{:.2},{:.2},{:.2},{:.2},{:.4},-1,-1,-1",
            o.frame_index + 1,
            o.track_id,
            b.x(),
            b.y(),
            b.w(),
            b.h(),
            o.confidence
        );
    }
    out
}

impl FrameBox for MotRow {
    fn frame_index(&self) -> u64 {
        self.frame_index
    }

    fn frame_box(&self) -> &BoundingBox {
        &self.bbox
    }
}

pub fn parse_mot(text: &str) -> Result<Vec<MotRow>, FormatError> {
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let n = i + 1;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() < 7 {
            return Err(FormatError::new(
                n,
                format!("expected at least 7 fields, found {}", fields.len()),
            ));
        }
        let int = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| FormatError::new(n, format!("bad integer {s:?}")))
        };
        let real = |s: &str| {
            s.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| FormatError::new(n, format!("bad number {s:?}")))
        };
        let frame = int(fields[0])?;
        if frame == 0 {
            return Err(FormatError::new(n, "frame numbers start at 1"));
        }
        let bbox = BoundingBox::new(
            real(fields[2])?,
            real(fields[3])?,
            real(fields[4])?,
            real(fields[5])?,
        )
        .map_err(|e| FormatError::new(n, e.to_string()))?;
        rows.push(MotRow {
            frame_index: frame - 1,
            track_id: int(fields[1])?,
            bbox,
            confidence: real(fields[6])?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::Provenance;

    #[test]
    fn writes_and_reads() {
        let o = TrackOutput {
            frame_index: 0,
            track_id: 7,
            bbox: BoundingBox::new(10.0, 20.125, 30.5, 40.0).unwrap(),
            confidence: 0.875,
            provenance: Provenance::SubstitutedIou,
            substitution_count: 1,
        };
        let text = write_mot(&[o]);
        assert_eq!(text, "1,7,10.00,20.12,30.50,40.00,0.8750,-1,-1,-1\n");
        let rows = parse_mot(&text).unwrap();
        assert_eq!(rows[0].frame_index, 0);
        assert_eq!(rows[0].track_id, 7);
        assert_eq!(rows[0].bbox.y(), 20.12);
    }

    #[test]
    fn rejects_bad_rows() {
        assert_eq!(parse_mot("1,1,0,0,1,1\n").unwrap_err().line, 1);
        assert_eq!(parse_mot("\n0,1,0,0,1,1,1,-1,-1,-1").unwrap_err().line, 2);
        assert!(parse_mot("1,1,0,0,0,1,1,-1,-1,-1").is_err());
        assert!(parse_mot("").unwrap().is_empty());
    }
}
