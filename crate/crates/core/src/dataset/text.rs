//! Normalized center/size text labels, one object per line: `0 cx cy w h`.

use crate::error::DatasetError;
use crate::model::{AnnotationRecord, BoundingBox};

/// Formats one record as a text label line (no trailing newline).
pub fn voc_to_text(rec: &AnnotationRecord) -> String {
    let (iw, ih) = (f64::from(rec.image_width), f64::from(rec.image_height));
    let (cx, cy) = rec.bbox.center();
    format!(
        "0 {:.6} {:.6} {:.6} {:.6}",
        cx / iw,
        cy / ih,
        rec.bbox.w() / iw,
        rec.bbox.h() / ih
    )
}

/// Label file body for all objects of one image, newline terminated.
pub fn labels_file<'a>(records: impl IntoIterator<Item = &'a AnnotationRecord>) -> String {
    records.into_iter().map(|r| voc_to_text(r) + "\n").collect()
}

/// Parses a label line back into a record for an image of the given size.
pub fn text_to_record(
    line: &str,
    image_id: &str,
    image_width: u32,
    image_height: u32,
) -> Result<AnnotationRecord, DatasetError> {
    let fields: Vec<&str> = line.split_whitespace().collect();
    if fields.len() != 5 {
        return Err(DatasetError::Label(format!(
            "expected 5 fields, found {}",
            fields.len()
        )));
    }
    if fields[0] != "0" {
        return Err(DatasetError::Label(format!(
            "unsupported class id {:?}",
            fields[0]
        )));
    }
    let mut v = [0.0f64; 4];
    for (slot, raw) in v.iter_mut().zip(&fields[1..]) {
        *slot = raw
            .parse()
            .ok()
            .filter(|x: &f64| x.is_finite())
            .ok_or_else(|| DatasetError::Label(format!("bad number {raw:?}")))?;
    }
    let (iw, ih) = (f64::from(image_width), f64::from(image_height));
    let bbox = BoundingBox::from_center(v[0] * iw, v[1] * ih, v[2] * iw, v[3] * ih)
        .map_err(|e| DatasetError::Label(e.to_string()))?;
    let (record, _) = AnnotationRecord::clamped(image_id, image_width, image_height, bbox, false)
        .map_err(|e| DatasetError::Label(e.to_string()))?;
    Ok(record)
}
