//! Detector-agnostic stabilization of per-frame object detections.
//!
//! The crate turns noisy per-frame detector output into steadier tracks with a
//! small rule-based state machine (two confidence gates, box association and
//! correlation-based box prediction). Around it sit the pieces needed to
//! exercise and evaluate that machine:
//!
//! - [`geometry`] and [`correlation`]: box arithmetic and ZNCC template matching.
//! - [`tracker`]: the state machine itself.
//! - [`simulator`]: deterministic synthetic scenes with scripted confidence
//!   dips, plus scoring against ground truth.
//! - [`dataset`]: Pascal VOC parsing, YOLO-style text labels, heatmaps and
//!   corpus statistics.
//! - [`formats`]: PGM frames, detection/truth JSONL and MOT CSV.

pub mod config;
pub mod correlation;
pub mod dataset;
pub mod error;
pub mod formats;
pub mod geometry;
pub mod model;
pub mod simulator;
pub mod tracker;

pub use config::{AssociationWeights, TemplateMode, TrackerConfig};
pub use error::{
    ConfigError, CorrelationError, DatasetError, FormatError, ModelError, SimulationError,
    TrackerError,
};
pub use model::{AnnotationRecord, BoundingBox, Detection, FrameBuffer};
pub use tracker::{run_stream, FrameInput, Provenance, TrackOutput, Tracker, TrackerState};
