//! Shared domain types: boxes, detections, frames and annotation records.
//!
//! Every type here is an immutable value once built. The public constructors
//! either reject invalid fields or normalize them, so a value that exists is a
//! value that satisfies its invariants.

use serde::{Deserialize, Serialize};

use crate::error::ModelError;

/// Axis-aligned rectangle in real-valued pixels, stored as (left, top, width, height).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawBox", into = "RawBox")]
pub struct BoundingBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

#[derive(Serialize, Deserialize)]
struct RawBox {
    x: f64,
    y: f64,
    w: f64,
    h: f64,
}

impl TryFrom<RawBox> for BoundingBox {
    type Error = ModelError;

    fn try_from(raw: RawBox) -> Result<Self, Self::Error> {
        BoundingBox::new(raw.x, raw.y, raw.w, raw.h)
    }
}

impl From<BoundingBox> for RawBox {
    fn from(b: BoundingBox) -> Self {
        RawBox {
            x: b.x,
            y: b.y,
            w: b.w,
            h: b.h,
        }
    }
}

impl BoundingBox {
    /// Builds a box from its left/top corner and extent. Width and height must
    /// be strictly positive and every field finite.
    pub fn new(x: f64, y: f64, w: f64, h: f64) -> Result<Self, ModelError> {
        if !(x.is_finite() && y.is_finite() && w.is_finite() && h.is_finite()) {
            return Err(ModelError::NonFinite);
        }
        if w <= 0.0 || h <= 0.0 {
            return Err(ModelError::EmptyBox { w, h });
        }
        Ok(Self { x, y, w, h })
    }

    /// Builds a box from corner coordinates (`x_max > x_min`, `y_max > y_min`).
    pub fn from_corners(
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    ) -> Result<Self, ModelError> {
        Self::new(x_min, y_min, x_max - x_min, y_max - y_min)
    }

    /// Builds a box from its center point and extent.
    pub fn from_center(cx: f64, cy: f64, w: f64, h: f64) -> Result<Self, ModelError> {
        Self::new(cx - w / 2.0, cy - h / 2.0, w, h)
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn w(&self) -> f64 {
        self.w
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn right(&self) -> f64 {
        self.x + self.w
    }

    pub fn bottom(&self) -> f64 {
        self.y + self.h
    }

    pub fn area(&self) -> f64 {
        self.w * self.h
    }

    pub fn center(&self) -> (f64, f64) {
        (self.x + self.w / 2.0, self.y + self.h / 2.0)
    }

    /// Same size, moved by `(dx, dy)`.
    pub fn translated(&self, dx: f64, dy: f64) -> Self {
        Self {
            x: self.x + dx,
            y: self.y + dy,
            ..*self
        }
    }

    /// Intersects the box with the frame `[0, width] x [0, height]`.
    ///
    /// Returns `None` when nothing of positive area is left.
    pub fn clamp_to(&self, width: f64, height: f64) -> Option<Self> {
        if self.is_within(width, height) {
            return Some(*self);
        }
        let (x, w) = clamp_span(self.x, self.right(), width)?;
        let (y, h) = clamp_span(self.y, self.bottom(), height)?;
        Self::new(x, y, w, h).ok()
    }

    /// True when the box already lies inside `[0, width] x [0, height]`.
    pub fn is_within(&self, width: f64, height: f64) -> bool {
        self.x >= 0.0 && self.y >= 0.0 && self.right() <= width && self.bottom() <= height
    }
}

// start + extent must not exceed the limit after float rounding, otherwise
// clamping would not be idempotent.
fn clamp_span(start: f64, end: f64, limit: f64) -> Option<(f64, f64)> {
    let lo = start.clamp(0.0, limit);
    let hi = end.clamp(0.0, limit);
    let mut extent = hi - lo;
    while extent > 0.0 && lo + extent > limit {
        extent = extent.next_down();
    }
    (extent > 0.0).then_some((lo, extent))
}

/// One detector output for one frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Detection {
    #[serde(rename = "box")]
    bbox: BoundingBox,
    confidence: f64,
}

impl Detection {
    pub fn new(bbox: BoundingBox, confidence: f64) -> Result<Self, ModelError> {
        if !(0.0..=1.0).contains(&confidence) {
            return Err(ModelError::Confidence(confidence));
        }
        Ok(Self { bbox, confidence })
    }

    /// Accepts a confidence given in percent (0..=100) and rescales it to [0, 1].
    pub fn from_percent(bbox: BoundingBox, percent: f64) -> Result<Self, ModelError> {
        if !(0.0..=100.0).contains(&percent) {
            return Err(ModelError::Confidence(percent));
        }
        Self::new(bbox, percent / 100.0)
    }

    pub fn bbox(&self) -> &BoundingBox {
        &self.bbox
    }

    pub fn confidence(&self) -> f64 {
        self.confidence
    }

    pub fn with_box(&self, bbox: BoundingBox) -> Self {
        Self {
            bbox,
            confidence: self.confidence,
        }
    }
}

/// Single-channel 8-bit image, row-major.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FrameBuffer {
    width: usize,
    height: usize,
    data: Vec<u8>,
}

impl FrameBuffer {
    pub fn new(width: usize, height: usize, data: Vec<u8>) -> Result<Self, ModelError> {
        let expected = width.checked_mul(height).ok_or(ModelError::FrameSize {
            width,
            height,
            len: data.len(),
        })?;
        if data.len() != expected {
            return Err(ModelError::FrameSize {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    /// A frame where every pixel has the same value.
    pub fn filled(width: usize, height: usize, value: u8) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn into_data(self) -> Vec<u8> {
        self.data
    }

    #[inline]
    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.data[row * self.width + col]
    }

    #[inline]
    pub fn set(&mut self, col: usize, row: usize, value: u8) {
        self.data[row * self.width + col] = value;
    }

    pub fn row(&self, row: usize) -> &[u8] {
        &self.data[row * self.width..(row + 1) * self.width]
    }
}

/// One labeled object read from an annotation file.
#[derive(Debug, Clone, PartialEq)]
pub struct AnnotationRecord {
    pub image_id: String,
    pub image_width: u32,
    pub image_height: u32,
    pub bbox: BoundingBox,
    pub difficult: bool,
}

impl AnnotationRecord {
    /// Builds a record, clamping the box into the image. The second value is
    /// true when clamping changed the box.
    pub fn clamped(
        image_id: impl Into<String>,
        image_width: u32,
        image_height: u32,
        bbox: BoundingBox,
        difficult: bool,
    ) -> Result<(Self, bool), ModelError> {
        if image_width == 0 || image_height == 0 {
            return Err(ModelError::ImageSize {
                width: image_width,
                height: image_height,
            });
        }
        let (w, h) = (f64::from(image_width), f64::from(image_height));
        let inside = bbox.clamp_to(w, h).ok_or(ModelError::OutsideImage)?;
        let changed = inside != bbox;
        Ok((
            Self {
                image_id: image_id.into(),
                image_width,
                image_height,
                bbox: inside,
                difficult,
            },
            changed,
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn rejects_degenerate_boxes() {
        assert!(BoundingBox::new(0.0, 0.0, 0.0, 1.0).is_err());
        assert!(BoundingBox::new(0.0, 0.0, 1.0, -1.0).is_err());
        assert!(BoundingBox::new(f64::NAN, 0.0, 1.0, 1.0).is_err());
        assert!(BoundingBox::from_corners(10.0, 0.0, 10.0, 5.0).is_err());
    }

    #[test]
    fn corners_convert_to_extent() {
        let b = BoundingBox::from_corners(10.0, 20.0, 30.0, 60.0).unwrap();
        assert_eq!((b.x(), b.y(), b.w(), b.h()), (10.0, 20.0, 20.0, 40.0));
    }

    #[test]
    fn clamp_trims_and_drops() {
        let b = BoundingBox::new(-5.0, 90.0, 20.0, 20.0).unwrap();
        let c = b.clamp_to(100.0, 100.0).unwrap();
        assert_eq!((c.x(), c.y(), c.w(), c.h()), (0.0, 90.0, 15.0, 10.0));
        let outside = BoundingBox::new(200.0, 0.0, 5.0, 5.0).unwrap();
        assert!(outside.clamp_to(100.0, 100.0).is_none());
    }

    #[test]
    fn detection_confidence_range() {
        let b = BoundingBox::new(0.0, 0.0, 1.0, 1.0).unwrap();
        assert!(Detection::new(b, 1.0).is_ok());
        assert!(Detection::new(b, 0.0).is_ok());
        assert!(Detection::new(b, 1.01).is_err());
        assert!(Detection::new(b, -0.01).is_err());
        assert_eq!(Detection::from_percent(b, 85.0).unwrap().confidence(), 0.85);
        assert!(Detection::from_percent(b, 101.0).is_err());
    }

    #[test]
    fn frame_length_must_match() {
        assert!(FrameBuffer::new(3, 2, vec![0; 6]).is_ok());
        assert!(FrameBuffer::new(3, 2, vec![0; 5]).is_err());
    }

    #[test]
    fn annotation_clamps_and_flags() {
        let b = BoundingBox::new(600.0, 10.0, 100.0, 10.0).unwrap();
        let (rec, changed) = AnnotationRecord::clamped("a", 640, 480, b, false).unwrap();
        assert!(changed);
        assert_eq!(rec.bbox.w(), 40.0);
        let (_, changed) = AnnotationRecord::clamped("a", 640, 480, rec.bbox, false).unwrap();
        assert!(!changed);
    }

    #[test]
    fn box_json_is_validated() {
        let ok: BoundingBox = serde_json::from_str(r#"{"x":1,"y":2,"w":3,"h":4}"#).unwrap();
        assert_eq!(ok.area(), 12.0);
        assert!(serde_json::from_str::<BoundingBox>(r#"{"x":1,"y":2,"w":0,"h":4}"#).is_err());
    }

    proptest! {
        #[test]
        fn clamp_is_idempotent(
            x in -200.0f64..400.0, y in -200.0f64..400.0,
            w in 0.1f64..300.0, h in 0.1f64..300.0,
            fw in 1.0f64..300.0, fh in 1.0f64..300.0,
        ) {
            let b = BoundingBox::new(x, y, w, h).unwrap();
            if let Some(once) = b.clamp_to(fw, fh) {
                prop_assert!(once.is_within(fw, fh));
                prop_assert_eq!(once.clamp_to(fw, fh), Some(once));
            }
        }
    }
}
