mod common;

use std::collections::{BTreeMap, BTreeSet};

use common::stream;
use proptest::prelude::*;
use trackfuse_core::simulator::{Background, DetectorSpec, ObjectSpec, Scenario};
use trackfuse_core::{run_stream, FrameInput, Provenance, TrackOutput, TrackerConfig};

fn scenario() -> impl Strategy<Value = Scenario> {
    (
        any::<u64>(),
        0.0..12.0f64,
        (8.0..40.0f64, 8.0..40.0f64),
        (-4.0..4.0f64, -4.0..4.0f64),
        0.0..2.0f64,
        0.0..1.0f64,
        proptest::collection::btree_set(0u64..40, 0..8),
        proptest::collection::btree_set(0u64..40, 0..4),
    )
        .prop_map(
            |(seed, noise, size, velocity, jitter, dip_conf, dips, drops)| Scenario {
                seed,
                frame_size: (160, 120),
                frame_count: 40,
                background: Background {
                    noise_sigma: noise,
                    base_level: 40,
                },
                object: ObjectSpec {
                    size,
                    intensity: 220,
                    start: (60.0, 45.0),
                    velocity,
                },
                detector: DetectorSpec {
                    jitter_sigma: jitter,
                    base_conf: 0.8,
                    dropout_frames: drops.difference(&dips).copied().collect(),
                    dip_frames: dips,
                    dip_conf,
                },
            },
        )
}

fn check_monotone(
    frames: &[FrameInput],
    out: &[TrackOutput],
    cfg: &TrackerConfig,
) -> Result<(), TestCaseError> {
    let by_frame: BTreeMap<u64, Vec<&TrackOutput>> =
        out.iter().fold(BTreeMap::new(), |mut m, o| {
            m.entry(o.frame_index).or_default().push(o);
            m
        });
    for f in frames {
        for d in f.detections.iter().filter(|d| d.confidence() >= cfg.conf_h) {
            let emitted = by_frame.get(&f.frame_index).is_some_and(|os| {
                os.iter().any(|o| {
                    o.provenance == Provenance::Detected
                        && o.bbox == *d.bbox()
                        && o.confidence == d.confidence()
                })
            });
            prop_assert!(
                emitted,
                "valid detection at frame {} not emitted",
                f.frame_index
            );
        }
    }

    let mut last_conf: BTreeMap<u64, f64> = BTreeMap::new();
    for o in out {
        let frame = &frames[o.frame_index as usize];
        match o.provenance {
            Provenance::Detected => {
                prop_assert!(frame
                    .detections
                    .iter()
                    .any(|d| d.confidence() == o.confidence && d.confidence() >= cfg.conf_h));
            }
            _ => prop_assert_eq!(Some(&o.confidence), last_conf.get(&o.track_id)),
        }
        last_conf.insert(o.track_id, o.confidence);
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn emissions_cover_thresholding_and_reuse_reported_confidence(s in scenario()) {
        let frames = stream(&s);
        let cfg = TrackerConfig::default();
        let out = run_stream(&frames, &cfg).unwrap();
        check_monotone(&frames, &out, &cfg)?;
    }

    #[test]
    fn substitution_runs_respect_the_cap(s in scenario(), cap in 0u32..4) {
        let frames = stream(&s);
        let cfg = TrackerConfig { max_substitutions: cap, ..TrackerConfig::default() };
        let out = run_stream(&frames, &cfg).unwrap();
        for o in &out {
            prop_assert!(o.substitution_count <= cap);
            if o.provenance == Provenance::Detected {
                prop_assert_eq!(o.substitution_count, 0);
            }
        }
    }

    #[test]
    fn runs_are_deterministic(s in scenario()) {
        let frames = stream(&s);
        let cfg = TrackerConfig::default();
        prop_assert_eq!(run_stream(&frames, &cfg).unwrap(), run_stream(&frames, &cfg).unwrap());
    }
}

#[test]
fn at_most_one_emission_per_track_and_frame() {
    let s = common::scripted(4, [10, 11, 12, 40], 0.4);
    let frames = stream(&s);
    let out = run_stream(&frames, &TrackerConfig::default()).unwrap();
    let keys: BTreeSet<(u64, u64)> = out.iter().map(|o| (o.frame_index, o.track_id)).collect();
    assert_eq!(keys.len(), out.len());
    assert!(out.iter().all(|o| o.track_id == 1));
}
