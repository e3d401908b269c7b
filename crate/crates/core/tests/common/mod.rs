#![allow(dead_code)]

use std::collections::BTreeSet;

use trackfuse_core::simulator::{self, Background, DetectorSpec, ObjectSpec, Scenario};
use trackfuse_core::{FrameInput, TrackerConfig};

/// A 100-frame scene with a slow diagonal object and the given confidence dips.
pub fn scripted(seed: u64, dips: impl IntoIterator<Item = u64>, dip_conf: f64) -> Scenario {
    Scenario {
        seed,
        frame_size: (320, 240),
        frame_count: 100,
        background: Background {
            noise_sigma: 6.0,
            base_level: 50,
        },
        object: ObjectSpec {
            size: (24.0, 18.0),
            intensity: 210,
            start: (30.0, 40.0),
            velocity: (2.0, 1.0),
        },
        detector: DetectorSpec {
            jitter_sigma: 0.0,
            base_conf: 0.85,
            dip_frames: dips.into_iter().collect(),
            dip_conf,
            dropout_frames: BTreeSet::new(),
        },
    }
}

/// Rendered frames paired with emulated detections.
pub fn stream(s: &Scenario) -> Vec<FrameInput> {
    let rendered = simulator::render(s).expect("valid scenario");
    let truths: Vec<_> = rendered.iter().map(|r| r.truth).collect();
    let dets = simulator::emulate_detector(s, &truths);
    rendered
        .into_iter()
        .zip(dets)
        .enumerate()
        .map(|(t, (r, detections))| FrameInput {
            frame_index: t as u64,
            frame: r.frame,
            detections,
        })
        .collect()
}

pub fn detections_of(frames: &[FrameInput]) -> Vec<Vec<trackfuse_core::Detection>> {
    frames.iter().map(|f| f.detections.clone()).collect()
}

pub fn default_config() -> TrackerConfig {
    TrackerConfig::default()
}
