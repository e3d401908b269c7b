//! Synthetic single-object scenes with scripted detector behavior.
//!
//! A [`Scenario`] describes a textured rectangle moving at constant velocity
//! over a noisy background, and a detector that reports it with position
//! jitter, occasional confidence dips and dropouts. Rendering and detector
//! emulation are pure functions of the scenario (including its seed), which
//! makes recovery rates exactly countable with [`score`].

pub mod rng;
mod score;

pub use score::{score, FrameBox, Metrics};

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::SimulationError;
use crate::model::{BoundingBox, Detection, FrameBuffer};
use rng::{SimRng, STREAM_BACKGROUND, STREAM_DETECTOR};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Background {
    pub noise_sigma: f64,
    pub base_level: u8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObjectSpec {
    pub size: (f64, f64),
    pub intensity: u8,
    pub start: (f64, f64),
    /// Pixels per frame.
    pub velocity: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DetectorSpec {
    pub jitter_sigma: f64,
    pub base_conf: f64,
    pub dip_frames: BTreeSet<u64>,
    pub dip_conf: f64,
    pub dropout_frames: BTreeSet<u64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub seed: u64,
    pub frame_size: (u32, u32),
    pub frame_count: u64,
    pub background: Background,
    pub object: ObjectSpec,
    pub detector: DetectorSpec,
}

/// Spread of the per-frame confidence noise around `base_conf`.
pub const CONF_NOISE: f64 = 0.05;

impl Scenario {
    /// Parses and validates a scenario JSON document.
    pub fn from_json(text: &str) -> Result<Self, SimulationError> {
        let s: Scenario =
            serde_json::from_str(text).map_err(|e| SimulationError::Invalid(e.to_string()))?;
        s.validate()?;
        Ok(s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serializes")
    }

    pub fn validate(&self) -> Result<(), SimulationError> {
        let invalid = |m: &str| Err(SimulationError::Invalid(m.to_string()));
        let (fw, fh) = self.frame_size;
        let (ow, oh) = self.object.size;
        if fw == 0 || fh == 0 {
            return invalid("frame_size must be positive");
        }
        if !(ow.is_finite() && oh.is_finite() && ow >= 1.0 && oh >= 1.0) {
            return invalid("object size must be at least 1 pixel");
        }
        if ow > f64::from(fw) || oh > f64::from(fh) {
            return Err(SimulationError::ObjectTooLarge {
                object: (ow, oh),
                frame: (fw, fh),
            });
        }
        let finite = |v: (f64, f64)| v.0.is_finite() && v.1.is_finite();
        if !finite(self.object.start) || !finite(self.object.velocity) {
            return invalid("object start and velocity must be finite");
        }
        if !(self.background.noise_sigma >= 0.0 && self.background.noise_sigma.is_finite()) {
            return invalid("noise_sigma must be >= 0");
        }
        let d = &self.detector;
        if !(d.jitter_sigma >= 0.0 && d.jitter_sigma.is_finite()) {
            return invalid("jitter_sigma must be >= 0");
        }
        if !(0.0..=1.0).contains(&d.base_conf) || !(0.0..=1.0).contains(&d.dip_conf) {
            return invalid("base_conf and dip_conf must lie in [0, 1]");
        }
        if let Some(&f) = d.dip_frames.intersection(&d.dropout_frames).next() {
            return Err(SimulationError::DipDropoutOverlap(f));
        }
        Ok(())
    }

    /// Ground-truth box at frame `t`; the trajectory stops at the frame border.
    pub fn true_box(&self, t: u64) -> BoundingBox {
        let (fw, fh) = (f64::from(self.frame_size.0), f64::from(self.frame_size.1));
        let (w, h) = self.object.size;
        let t = t as f64;
        let x = (self.object.start.0 + t * self.object.velocity.0).clamp(0.0, fw - w);
        let y = (self.object.start.1 + t * self.object.velocity.1).clamp(0.0, fh - h);
        BoundingBox::new(x, y, w, h).expect("validated object size")
    }
}

/// One rendered frame and the box the object occupies in it.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderedFrame {
    pub frame: FrameBuffer,
    pub truth: BoundingBox,
}

fn render_frame(s: &Scenario, t: u64) -> RenderedFrame {
    let (fw, fh) = (s.frame_size.0 as usize, s.frame_size.1 as usize);
    let base = f64::from(s.background.base_level);
    let sigma = s.background.noise_sigma;
    let data = if sigma == 0.0 {
        vec![s.background.base_level; fw * fh]
    } else {
        let mut rng = SimRng::for_stream(s.seed, STREAM_BACKGROUND, t);
        (0..fw * fh)
            .map(|_| (base + sigma * rng.gaussian()).round().clamp(0.0, 255.0) as u8)
            .collect()
    };
    let mut frame = FrameBuffer::new(fw, fh, data).expect("sized above");

    let truth = s.true_box(t);
    let c0 = truth.x().round() as usize;
    let r0 = truth.y().round() as usize;
    let c1 = (c0 + truth.w().round() as usize).min(fw);
    let r1 = (r0 + truth.h().round() as usize).min(fh);
    let fill = s.object.intensity;
    let border = fill / 2;
    for r in r0..r1 {
        for c in c0..c1 {
            let edge = r == r0 || r + 1 == r1 || c == c0 || c + 1 == c1;
            frame.set(c, r, if edge { border } else { fill });
        }
    }
    RenderedFrame { frame, truth }
}

/// Renders every frame of the scenario. Frames are independent and rendered in
/// parallel; each uses its own noise stream derived from `(seed, frame)`.
pub fn render(s: &Scenario) -> Result<Vec<RenderedFrame>, SimulationError> {
    s.validate()?;
    Ok((0..s.frame_count)
        .into_par_iter()
        .map(|t| render_frame(s, t))
        .collect())
}

/// Ground-truth boxes without rendering pixels.
pub fn true_boxes(s: &Scenario) -> Vec<BoundingBox> {
    (0..s.frame_count).map(|t| s.true_box(t)).collect()
}

/// Detector output per frame: none on dropout frames, otherwise exactly one
/// jittered detection of the true box.
pub fn emulate_detector(s: &Scenario, truths: &[BoundingBox]) -> Vec<Vec<Detection>> {
    let (fw, fh) = (f64::from(s.frame_size.0), f64::from(s.frame_size.1));
    let d = &s.detector;
    truths
        .iter()
        .enumerate()
        .map(|(t, truth)| {
            let t = t as u64;
            if d.dropout_frames.contains(&t) {
                return Vec::new();
            }
            let mut rng = SimRng::for_stream(s.seed, STREAM_DETECTOR, t);
            let bbox = if d.jitter_sigma > 0.0 {
                let dx = d.jitter_sigma * rng.gaussian();
                let dy = d.jitter_sigma * rng.gaussian();
                truth.translated(dx, dy).clamp_to(fw, fh).unwrap_or(*truth)
            } else {
                *truth
            };
            let conf = if d.dip_frames.contains(&t) {
                d.dip_conf
            } else {
                (d.base_conf + rng.uniform(-CONF_NOISE, CONF_NOISE)).clamp(0.0, 1.0)
            };
            vec![Detection::new(bbox, conf).expect("confidence clamped")]
        })
        .collect()
}
