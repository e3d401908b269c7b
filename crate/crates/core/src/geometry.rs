//! Box arithmetic shared by association, prediction and dataset statistics.

use crate::model::BoundingBox;

/// Side length of the square canvas that annotation areas are normalized to.
pub const REFERENCE_SIZE: f64 = 1280.0;

pub fn intersection_area(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let w = a.right().min(b.right()) - a.x().max(b.x());
    let h = a.bottom().min(b.bottom()) - a.y().max(b.y());
    if w <= 0.0 || h <= 0.0 {
        0.0
    } else {
        w * h
    }
}

/// Intersection over union, using continuous area arithmetic.
pub fn iou(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let inter = intersection_area(a, b);
    if inter == 0.0 {
        return 0.0;
    }
    let union = a.area() + b.area() - inter;
    (inter / union).clamp(0.0, 1.0)
}

/// Euclidean distance between box centers.
pub fn center_distance(a: &BoundingBox, b: &BoundingBox) -> f64 {
    let (ax, ay) = a.center();
    let (bx, by) = b.center();
    (ax - bx).hypot(ay - by)
}

/// `|ln(area(a) / area(b))|`: zero for equal areas, symmetric, scale-free.
pub fn size_dissimilarity(a: &BoundingBox, b: &BoundingBox) -> f64 {
    (a.area().ln() - b.area().ln()).abs()
}

/// Grows `b` by `margin * w` left and right and `margin * h` above and below,
/// then clamps to the frame.
///
/// Returns `b` clamped to the frame if the grown box degenerates, and `None`
/// only if `b` itself lies entirely outside the frame.
pub fn expand(b: &BoundingBox, margin: f64, frame_w: f64, frame_h: f64) -> Option<BoundingBox> {
    let dx = margin * b.w();
    let dy = margin * b.h();
    BoundingBox::new(b.x() - dx, b.y() - dy, b.w() + 2.0 * dx, b.h() + 2.0 * dy)
        .ok()
        .and_then(|grown| grown.clamp_to(frame_w, frame_h))
        .or_else(|| b.clamp_to(frame_w, frame_h))
}

/// Box area expressed as if the source image were `reference x reference` pixels.
pub fn scaled_area_with(b: &BoundingBox, src_w: f64, src_h: f64, reference: f64) -> f64 {
    (b.w() * (reference / src_w)) * (b.h() * (reference / src_h))
}

/// [`scaled_area_with`] at the default 1280 x 1280 reference.
pub fn scaled_area(b: &BoundingBox, src_w: f64, src_h: f64) -> f64 {
    scaled_area_with(b, src_w, src_h, REFERENCE_SIZE)
}
