use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::geometry::iou;
use crate::model::{BoundingBox, Detection};
use crate::tracker::TrackOutput;

/// Minimum IOU against ground truth for a box to count as a detection.
pub const HIT_IOU: f64 = 0.5;

/// A box emitted for a frame, as scored against ground truth.
pub trait FrameBox {
    fn frame_index(&self) -> u64;
    fn frame_box(&self) -> &BoundingBox;
}

impl FrameBox for TrackOutput {
    fn frame_index(&self) -> u64 {
        self.frame_index
    }

    fn frame_box(&self) -> &BoundingBox {
        &self.bbox
    }
}

/// Per-frame detection counts of the raw detector and of the tracker.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    /// Frames where the detector alone reports a confident, correct box.
    pub baseline_detected: usize,
    /// Frames where the tracker emits a correct box.
    pub tracker_detected: usize,
    /// Tracker frames that the baseline misses.
    pub recovered: usize,
    /// `100 * recovered / frame_count`.
    pub improvement_pct: f64,
    /// Mean IOU of all tracker outputs against truth; `None` without outputs.
    pub mean_iou: Option<f64>,
}

/// Compares tracker outputs and raw detections with ground truth.
///
/// `detections[t]` and `truths[t]` belong to frame `t`; outputs refer to frames
/// by `frame_index`. Outputs outside the truth range are ignored.
pub fn score<O: FrameBox>(
    outputs: &[O],
    detections: &[Vec<Detection>],
    truths: &[BoundingBox],
    conf_h: f64,
) -> Metrics {
    let baseline: BTreeSet<usize> = detections
        .iter()
        .zip(truths)
        .enumerate()
        .filter(|(_, (dets, truth))| {
            dets.iter()
                .any(|d| d.confidence() >= conf_h && iou(d.bbox(), truth) >= HIT_IOU)
        })
        .map(|(t, _)| t)
        .collect();

    let mut tracker = BTreeSet::new();
    let mut iou_sum = 0.0;
    let mut n = 0usize;
    for o in outputs {
        let frame = o.frame_index();
        let Some(truth) = usize::try_from(frame).ok().and_then(|t| truths.get(t)) else {
            continue;
        };
        let v = iou(o.frame_box(), truth);
        iou_sum += v;
        n += 1;
        if v >= HIT_IOU {
            tracker.insert(frame as usize);
        }
    }

    let recovered = tracker.difference(&baseline).count();
    let frame_count = truths.len();
    Metrics {
        baseline_detected: baseline.len(),
        tracker_detected: tracker.len(),
        recovered,
        improvement_pct: if frame_count == 0 {
            0.0
        } else {
            100.0 * recovered as f64 / frame_count as f64
        },
        mean_iou: (n > 0).then(|| iou_sum / n as f64),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tracker::Provenance;

    fn b(x: f64) -> BoundingBox {
        BoundingBox::new(x, 0.0, 10.0, 10.0).unwrap()
    }

    fn out(t: u64, bbox: BoundingBox) -> TrackOutput {
        TrackOutput {
            frame_index: t,
            track_id: 1,
            bbox,
            confidence: 0.9,
            provenance: Provenance::Detected,
            substitution_count: 0,
        }
    }

    #[test]
    fn counts_recoveries() {
        let truths = vec![b(0.0), b(1.0), b(2.0), b(3.0)];
        let dets = vec![
            vec![Detection::new(b(0.0), 0.9).unwrap()],
            vec![Detection::new(b(1.0), 0.4).unwrap()],
            vec![],
            vec![Detection::new(b(50.0), 0.9).unwrap()],
        ];
        let outputs = vec![out(0, b(0.0)), out(1, b(1.0)), out(3, b(50.0))];
        let m = score(&outputs, &dets, &truths, 0.6);
        assert_eq!(m.baseline_detected, 1);
        assert_eq!(m.tracker_detected, 2);
        assert_eq!(m.recovered, 1);
        assert_eq!(m.improvement_pct, 25.0);
        assert!((m.mean_iou.unwrap() - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn nothing_to_recover() {
        let truths = vec![b(0.0); 3];
        let dets = vec![vec![Detection::new(b(0.0), 0.9).unwrap()]; 3];
        let outputs: Vec<_> = (0..3).map(|t| out(t, b(0.0))).collect();
        let m = score(&outputs, &dets, &truths, 0.6);
        assert_eq!(
            (m.baseline_detected, m.tracker_detected, m.recovered),
            (3, 3, 0)
        );
        assert_eq!(m.improvement_pct, 0.0);
        assert_eq!(score::<TrackOutput>(&[], &[], &[], 0.6).mean_iou, None);
    }
}
