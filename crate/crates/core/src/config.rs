use serde::{Deserialize, Serialize};

use crate::error::ConfigError;

/// How a track's correlation template evolves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TemplateMode {
    /// Re-extract the template at every accepted box (detected or substituted).
    #[default]
    Rolling,
    /// Keep the template from the last valid detection.
    Frozen,
}

/// Weights of the association cost
/// `iou * (1 - iou) + distance * center_distance / diagonal + size * size_dissimilarity`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AssociationWeights {
    pub iou: f64,
    pub distance: f64,
    pub size: f64,
    /// Pairs costing more than this stay unmatched.
    pub cutoff: f64,
}

impl Default for AssociationWeights {
    fn default() -> Self {
        Self {
            iou: 1.0,
            distance: 1.0,
            size: 0.5,
            cutoff: 1.5,
        }
    }
}

/// Thresholds and policies of the rule-based tracker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrackerConfig {
    /// Detections at or above this confidence are valid.
    pub conf_h: f64,
    /// Detections in `[conf_l, conf_h)` are provisional; below are discarded.
    pub conf_l: f64,
    /// Minimum IOU between predicted and provisional box to accept the provisional box.
    pub iou_thresh: f64,
    /// Minimum correlation peak to accept the predicted box.
    pub ncc_thresh: f64,
    /// Fractional enlargement of the last box on each side when searching.
    pub search_margin: f64,
    /// Consecutive confidence substitutions allowed before a track is suspended.
    pub max_substitutions: u32,
    pub template_mode: TemplateMode,
    pub association: AssociationWeights,
    /// Waiting tracks are dropped after this many consecutive waiting frames.
    pub retire_after: u32,
}

impl Default for TrackerConfig {
    fn default() -> Self {
        Self {
            conf_h: 0.6,
            conf_l: 0.25,
            iou_thresh: 0.3,
            ncc_thresh: 0.5,
            search_margin: 0.5,
            max_substitutions: 10,
            template_mode: TemplateMode::Rolling,
            association: AssociationWeights::default(),
            retire_after: 100,
        }
    }
}

impl TrackerConfig {
    /// Checks every constraint in declaration order and reports the first
    /// one that fails.
    pub fn validate(&self) -> Result<(), ConfigError> {
        let checks: [(bool, &'static str); 11] = [
            (self.conf_h > 0.0 && self.conf_h <= 1.0, "0 < conf_h <= 1"),
            (self.conf_l >= 0.0 && self.conf_l <= 1.0, "0 <= conf_l <= 1"),
            (self.conf_l < self.conf_h, "conf_l < conf_h"),
            (
                (0.0..=1.0).contains(&self.iou_thresh),
                "0 <= iou_thresh <= 1",
            ),
            (
                (-1.0..=1.0).contains(&self.ncc_thresh),
                "-1 <= ncc_thresh <= 1",
            ),
            (
                self.search_margin >= 0.0 && self.search_margin.is_finite(),
                "search_margin >= 0",
            ),
            (
                self.association.iou >= 0.0 && self.association.iou.is_finite(),
                "association.iou >= 0",
            ),
            (
                self.association.distance >= 0.0 && self.association.distance.is_finite(),
                "association.distance >= 0",
            ),
            (
                self.association.size >= 0.0 && self.association.size.is_finite(),
                "association.size >= 0",
            ),
            (
                self.association.cutoff >= 0.0 && !self.association.cutoff.is_nan(),
                "association.cutoff >= 0",
            ),
            (self.retire_after >= 1, "retire_after >= 1"),
        ];
        match checks.iter().find(|(ok, _)| !ok) {
            Some(&(_, constraint)) => Err(ConfigError { constraint }),
            None => Ok(()),
        }
    }
}
