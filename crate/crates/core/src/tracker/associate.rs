use std::collections::BTreeMap;

use crate::config::AssociationWeights;
use crate::geometry::{center_distance, iou, size_dissimilarity};
use crate::model::{BoundingBox, Detection};

use super::TrackEntry;

/// Matching cost between a track's last box and a candidate box. Lower is better.
pub fn association_cost(
    track: &BoundingBox,
    candidate: &BoundingBox,
    weights: &AssociationWeights,
    diagonal: f64,
) -> f64 {
    weights.iou * (1.0 - iou(track, candidate))
        + weights.distance * center_distance(track, candidate) / diagonal
        + weights.size * size_dissimilarity(track, candidate)
}

/// Greedy one-to-one matching of tracks to candidates by ascending cost.
///
/// Pairs costing more than `weights.cutoff` are never matched. Equal costs are
/// resolved by track id, then candidate index, so the result is deterministic.
/// Returns `track_id -> candidate index`.
pub fn associate<'a>(
    tracks: impl IntoIterator<Item = &'a TrackEntry>,
    candidates: &[Detection],
    weights: &AssociationWeights,
    frame_w: f64,
    frame_h: f64,
) -> BTreeMap<u64, usize> {
    let diagonal = frame_w.hypot(frame_h).max(f64::MIN_POSITIVE);
    let mut pairs: Vec<(f64, u64, usize)> = Vec::new();
    for track in tracks {
        for (ci, cand) in candidates.iter().enumerate() {
            let cost = association_cost(&track.last_box, cand.bbox(), weights, diagonal);
            if cost <= weights.cutoff {
                pairs.push((cost, track.id, ci));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut matched = BTreeMap::new();
    let mut taken = vec![false; candidates.len()];
    for (_, track_id, ci) in pairs {
        if taken[ci] || matched.contains_key(&track_id) {
            continue;
        }
        taken[ci] = true;
        matched.insert(track_id, ci);
    }
    matched
}
