//! Annotation occupancy heatmaps on the 1280 x 1280 reference canvas.

use crate::geometry::REFERENCE_SIZE;
use crate::model::AnnotationRecord;

pub const CANVAS: usize = REFERENCE_SIZE as usize;

/// Per-pixel count of annotation boxes covering the pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Heatmap {
    width: usize,
    height: usize,
    counts: Vec<u32>,
}

impl Default for Heatmap {
    fn default() -> Self {
        Self::new()
    }
}

/// Canvas cells `[col0, col1) x [row0, row1)` touched by a record's box after
/// scaling to the canvas, rounding outward.
pub fn raster_span(
    rec: &AnnotationRecord,
    width: usize,
    height: usize,
) -> (usize, usize, usize, usize) {
    let sx = width as f64 / f64::from(rec.image_width);
    let sy = height as f64 / f64::from(rec.image_height);
    let b = &rec.bbox;
    let cells = |lo: f64, hi: f64, limit: usize| {
        let a = (lo.floor().max(0.0) as usize).min(limit);
        let z = (hi.ceil().max(0.0) as usize).min(limit);
        (a, z.max(a))
    };
    let (c0, c1) = cells(b.x() * sx, b.right() * sx, width);
    let (r0, r1) = cells(b.y() * sy, b.bottom() * sy, height);
    (c0, r0, c1, r1)
}

impl Heatmap {
    pub fn new() -> Self {
        Self::with_size(CANVAS, CANVAS)
    }

    pub fn with_size(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            counts: vec![0; width * height],
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn counts(&self) -> &[u32] {
        &self.counts
    }

    pub fn get(&self, col: usize, row: usize) -> u32 {
        self.counts[row * self.width + col]
    }

    pub fn add(&mut self, rec: &AnnotationRecord) {
        let (c0, r0, c1, r1) = raster_span(rec, self.width, self.height);
        for row in r0..r1 {
            let line = &mut self.counts[row * self.width..(row + 1) * self.width];
            for v in &mut line[c0..c1] {
                *v = v.saturating_add(1);
            }
        }
    }

    /// Cell-wise sum; associative and commutative.
    pub fn merge(&mut self, other: &Heatmap) {
        assert_eq!(
            (self.width, self.height),
            (other.width, other.height),
            "heatmap sizes differ"
        );
        for (a, b) in self.counts.iter_mut().zip(&other.counts) {
            *a = a.saturating_add(*b);
        }
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&v| u64::from(v)).sum()
    }

    pub fn max(&self) -> u32 {
        self.counts.iter().copied().max().unwrap_or(0)
    }

    pub fn covered(&self) -> usize {
        self.counts.iter().filter(|&&v| v > 0).count()
    }

    /// Counts divided by the number of images, for display.
    pub fn normalized(&self, image_count: usize) -> Vec<f64> {
        let n = image_count.max(1) as f64;
        self.counts.iter().map(|&v| f64::from(v) / n).collect()
    }
}

/// Sums the coverage of every record.
pub fn accumulate_heatmap<'a>(records: impl IntoIterator<Item = &'a AnnotationRecord>) -> Heatmap {
    let mut map = Heatmap::new();
    for rec in records {
        map.add(rec);
    }
    map
}
