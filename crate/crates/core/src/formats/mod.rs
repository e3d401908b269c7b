//! File formats exchanged with detectors, evaluators and the simulator.

pub mod jsonl;
pub mod mot;
pub mod pgm;

pub use jsonl::{
    parse_detection_lines, parse_detections, parse_truth, write_detections, write_truth,
    ConfidenceScale, DetectionLine,
};
pub use mot::{parse_mot, write_mot, MotRow};
