use std::collections::BTreeMap;

use serde::Serialize;

use crate::geometry::scaled_area;
use crate::model::AnnotationRecord;

/// Counts and box-size statistics of an annotation corpus. Areas are in
/// pixels² at the 1280 x 1280 reference size.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorpusStats {
    pub image_count: usize,
    pub drone_count: usize,
    pub difficult_count: usize,
    pub zero_drone_images: usize,
    /// Number of images containing exactly `k` objects, for `k >= 1`.
    pub per_image_histogram: BTreeMap<usize, usize>,
    pub min_area: Option<f64>,
    pub max_area: Option<f64>,
    pub mean_area: Option<f64>,
    #[serde(skip)]
    area_sum: f64,
}

impl Default for CorpusStats {
    fn default() -> Self {
        Self {
            image_count: 0,
            drone_count: 0,
            difficult_count: 0,
            zero_drone_images: 0,
            per_image_histogram: BTreeMap::new(),
            min_area: None,
            max_area: None,
            mean_area: None,
            area_sum: 0.0,
        }
    }
}

impl CorpusStats {
    /// Statistics of a single image.
    pub fn from_image(records: &[AnnotationRecord]) -> Self {
        let mut s = Self {
            image_count: 1,
            ..Self::default()
        };
        if records.is_empty() {
            s.zero_drone_images = 1;
            return s;
        }
        s.per_image_histogram.insert(records.len(), 1);
        for r in records {
            s.drone_count += 1;
            s.difficult_count += usize::from(r.difficult);
            let area = scaled_area(&r.bbox, f64::from(r.image_width), f64::from(r.image_height));
            s.min_area = Some(s.min_area.map_or(area, |m| m.min(area)));
            s.max_area = Some(s.max_area.map_or(area, |m| m.max(area)));
            s.area_sum += area;
        }
        s.mean_area = Some(s.area_sum / s.drone_count as f64);
        s
    }

    /// Combines two partial results.
    pub fn merge(mut self, other: &CorpusStats) -> Self {
        self.image_count += other.image_count;
        self.drone_count += other.drone_count;
        self.difficult_count += other.difficult_count;
        self.zero_drone_images += other.zero_drone_images;
        for (&k, &n) in &other.per_image_histogram {
            *self.per_image_histogram.entry(k).or_default() += n;
        }
        let pick = |a: Option<f64>, b: Option<f64>, f: fn(f64, f64) -> f64| match (a, b) {
            (Some(a), Some(b)) => Some(f(a, b)),
            (a, b) => a.or(b),
        };
        self.min_area = pick(self.min_area, other.min_area, f64::min);
        self.max_area = pick(self.max_area, other.max_area, f64::max);
        self.area_sum += other.area_sum;
        self.mean_area = (self.drone_count > 0).then(|| self.area_sum / self.drone_count as f64);
        self
    }
}

/// Statistics over images given as per-image record lists.
pub fn corpus_stats<'a, I, R>(images: I) -> CorpusStats
where
    I: IntoIterator<Item = R>,
    R: AsRef<[AnnotationRecord]> + 'a,
{
    images.into_iter().fold(CorpusStats::default(), |acc, img| {
        acc.merge(&CorpusStats::from_image(img.as_ref()))
    })
}
