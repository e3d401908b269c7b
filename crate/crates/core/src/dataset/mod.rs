//! Annotation tooling: VOC parsing, text label conversion, heatmaps and
//! corpus statistics.

pub mod heatmap;
pub mod stats;
pub mod text;
pub mod voc;

pub use heatmap::{accumulate_heatmap, Heatmap};
pub use stats::{corpus_stats, CorpusStats};
pub use text::{labels_file, text_to_record, voc_to_text};
pub use voc::{parse_voc, write_voc, VocDocument};

use crate::model::AnnotationRecord;

/// Drops objects flagged as difficult.
pub fn without_difficult(records: &[AnnotationRecord]) -> Vec<AnnotationRecord> {
    records.iter().filter(|r| !r.difficult).cloned().collect()
}
