//! Patch extraction and zero-normalized cross-correlation (ZNCC).
//!
//! Scores are computed from exact integer moments,
//!
//! ```text
//! zncc = (n·ΣTW − ΣT·ΣW) / sqrt((n·ΣT² − (ΣT)²) · (n·ΣW² − (ΣW)²))
//! ```
//!
//! which is algebraically the mean-subtracted definition. Only the final
//! division and square root are rounded, so equal windows always score
//! bit-identically and a zero variance is detected exactly.
//!
//! Window sums come from integral images; the cross term is a direct dot
//! product per placement. Large searches are split across rows with rayon,
//! and the reduction uses a total order, so the result does not depend on
//! the number of threads.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::CorrelationError;
use crate::geometry;
use crate::model::{BoundingBox, FrameBuffer};

/// Best integer displacement of a template inside a search region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftEstimate {
    pub dx: i64,
    pub dy: i64,
    /// ZNCC at the best displacement, in [-1, 1].
    pub peak: f64,
}

/// Best placement as the top-left corner of the template inside the search region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Placement {
    pub col: usize,
    pub row: usize,
    pub peak: f64,
}

/// A template located in a full frame around an anchor box.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Located {
    /// Displacement relative to the anchor's pixel-rounded top-left corner.
    pub shift: ShiftEstimate,
    /// Top-left corner of the match in frame coordinates.
    pub col: usize,
    pub row: usize,
}

/// Converts interleaved 8-bit RGB to BT.601 luma.
pub fn to_luma(width: usize, height: usize, rgb: &[u8]) -> Result<FrameBuffer, CorrelationError> {
    let expected = width * height * 3;
    if rgb.len() != expected {
        return Err(CorrelationError::RgbLength {
            len: rgb.len(),
            expected,
        });
    }
    let data = rgb
        .chunks_exact(3)
        .map(|p| {
            let y = 0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2]);
            y.round().clamp(0.0, 255.0) as u8
        })
        .collect();
    Ok(FrameBuffer::new(width, height, data).expect("length checked above"))
}

/// Integer pixel rectangle `(col, row, width, height)` covered by a box:
/// `[round(x), round(x) + round(w))` by `[round(y), round(y) + round(h))`,
/// cut to the frame.
pub fn pixel_rect(
    bbox: &BoundingBox,
    frame_w: usize,
    frame_h: usize,
) -> Option<(usize, usize, usize, usize)> {
    let span = |start: f64, extent: f64, limit: usize| -> Option<(usize, usize)> {
        let lo = start.round().max(0.0);
        let hi = (start.round() + extent.round()).min(limit as f64);
        (hi > lo).then_some((lo as usize, (hi - lo) as usize))
    };
    let (col, w) = span(bbox.x(), bbox.w(), frame_w)?;
    let (row, h) = span(bbox.y(), bbox.h(), frame_h)?;
    Some((col, row, w, h))
}

/// Copies the pixels under `bbox` (see [`pixel_rect`]).
pub fn extract_patch(
    frame: &FrameBuffer,
    bbox: &BoundingBox,
) -> Result<FrameBuffer, CorrelationError> {
    let (col, row, w, h) =
        pixel_rect(bbox, frame.width(), frame.height()).ok_or(CorrelationError::EmptyRegion)?;
    let mut data = Vec::with_capacity(w * h);
    for r in row..row + h {
        data.extend_from_slice(&frame.row(r)[col..col + w]);
    }
    Ok(FrameBuffer::new(w, h, data).expect("size computed from rect"))
}

/// Moments of a patch needed for ZNCC.
#[derive(Debug, Clone, Copy)]
struct Moments {
    n: i128,
    sum: i128,
    /// `n·Σx² − (Σx)²`, i.e. `n²` times the variance.
    spread: i128,
}

impl Moments {
    fn of(data: &[u8]) -> Self {
        let (sum, sq) = data.iter().fold((0u64, 0u64), |(s, q), &v| {
            let v = u64::from(v);
            (s + v, q + v * v)
        });
        Self::from_sums(data.len() as i128, sum.into(), sq.into())
    }

    fn from_sums(n: i128, sum: i128, sum_sq: i128) -> Self {
        Self {
            n,
            sum,
            spread: n * sum_sq - sum * sum,
        }
    }
}

fn score(t: &Moments, w: &Moments, cross: i128) -> f64 {
    let num = t.n * cross - t.sum * w.sum;
    let den = (t.spread as f64 * w.spread as f64).sqrt();
    (num as f64 / den).clamp(-1.0, 1.0)
}

/// ZNCC between two equally sized patches.
pub fn zncc(template: &FrameBuffer, window: &FrameBuffer) -> Result<f64, CorrelationError> {
    let (td, wd) = (
        (template.width(), template.height()),
        (window.width(), window.height()),
    );
    if td != wd {
        return Err(CorrelationError::DimensionMismatch(td, wd));
    }
    let t = Moments::of(template.data());
    let w = Moments::of(window.data());
    if t.spread == 0 || w.spread == 0 {
        return Err(CorrelationError::FlatPatch);
    }
    let cross: u64 = template
        .data()
        .iter()
        .zip(window.data())
        .map(|(&a, &b)| u64::from(a) * u64::from(b))
        .sum();
    Ok(score(&t, &w, cross.into()))
}

/// Summed-area tables of values and squared values, `(w + 1) x (h + 1)`.
struct Integral {
    stride: usize,
    sum: Vec<u64>,
    sq: Vec<u64>,
}

impl Integral {
    fn new(img: &FrameBuffer) -> Self {
        let stride = img.width() + 1;
        let mut sum = vec![0u64; stride * (img.height() + 1)];
        let mut sq = vec![0u64; stride * (img.height() + 1)];
        for r in 0..img.height() {
            let (mut rs, mut rq) = (0u64, 0u64);
            for (c, &v) in img.row(r).iter().enumerate() {
                let v = u64::from(v);
                rs += v;
                rq += v * v;
                let i = (r + 1) * stride + c + 1;
                sum[i] = sum[i - stride] + rs;
                sq[i] = sq[i - stride] + rq;
            }
        }
        Self { stride, sum, sq }
    }

    fn window(&self, col: usize, row: usize, w: usize, h: usize) -> (u64, u64) {
        let s = self.stride;
        let (a, b, c, d) = (
            row * s + col,
            row * s + col + w,
            (row + h) * s + col,
            (row + h) * s + col + w,
        );
        (
            self.sum[d] + self.sum[a] - self.sum[b] - self.sum[c],
            self.sq[d] + self.sq[a] - self.sq[b] - self.sq[c],
        )
    }
}

#[derive(Debug, Clone, Copy)]
struct Candidate {
    peak: f64,
    dx: i64,
    dy: i64,
    col: usize,
    row: usize,
}

impl Candidate {
    /// Total order: higher peak, then smaller dx²+dy², then smaller dy, then smaller dx.
    fn rank(&self, other: &Self) -> Ordering {
        other
            .peak
            .total_cmp(&self.peak)
            .then_with(|| {
                (self.dx * self.dx + self.dy * self.dy)
                    .cmp(&(other.dx * other.dx + other.dy * other.dy))
            })
            .then_with(|| self.dy.cmp(&other.dy))
            .then_with(|| self.dx.cmp(&other.dx))
    }

    fn pick(a: Option<Self>, b: Option<Self>) -> Option<Self> {
        match (a, b) {
            (Some(a), Some(b)) => Some(if b.rank(&a) == Ordering::Less { b } else { a }),
            (a, b) => a.or(b),
        }
    }
}

// Below this many multiply-adds a single thread is faster.
const PARALLEL_WORK: usize = 1 << 20;

fn search(template: &FrameBuffer, region: &FrameBuffer) -> Result<Candidate, CorrelationError> {
    let (tw, th) = (template.width(), template.height());
    let (sw, sh) = (region.width(), region.height());
    if sw < tw || sh < th {
        return Err(CorrelationError::SearchTooSmall {
            template: (tw, th),
            search: (sw, sh),
        });
    }
    let t = Moments::of(template.data());
    if t.spread == 0 {
        return Err(CorrelationError::FlatPatch);
    }
    let integral = Integral::new(region);
    let (cols, rows) = (sw - tw + 1, sh - th + 1);
    let (center_col, center_row) = ((sw - tw) / 2, (sh - th) / 2);
    let n = (tw * th) as i128;

    let row_best = |row: usize| -> Option<Candidate> {
        let mut best = None;
        for col in 0..cols {
            let (s, q) = integral.window(col, row, tw, th);
            let w = Moments::from_sums(n, s.into(), q.into());
            if w.spread == 0 {
                continue;
            }
            let mut cross = 0u64;
            for r in 0..th {
                let trow = template.row(r);
                let srow = &region.row(row + r)[col..col + tw];
                cross += trow
                    .iter()
                    .zip(srow)
                    .map(|(&a, &b)| u32::from(a) * u32::from(b))
                    .map(u64::from)
                    .sum::<u64>();
            }
            let cand = Candidate {
                peak: score(&t, &w, cross.into()),
                dx: col as i64 - center_col as i64,
                dy: row as i64 - center_row as i64,
                col,
                row,
            };
            best = Candidate::pick(best, Some(cand));
        }
        best
    };

    let best = if cols * rows * tw * th >= PARALLEL_WORK {
        (0..rows)
            .into_par_iter()
            .map(row_best)
            .reduce(|| None, Candidate::pick)
    } else {
        (0..rows).map(row_best).fold(None, Candidate::pick)
    };
    best.ok_or(CorrelationError::FlatPatch)
}

/// Finds the integer placement of `template` inside `search_region` with the
/// highest ZNCC.
///
/// The shift is relative to the centered placement
/// `((sw - tw) / 2, (sh - th) / 2)` (integer division). Windows with zero
/// variance have no defined score and are skipped; if every window is flat the
/// result is [`CorrelationError::FlatPatch`].
pub fn best_shift(
    template: &FrameBuffer,
    search_region: &FrameBuffer,
) -> Result<ShiftEstimate, CorrelationError> {
    search(template, search_region).map(|c| ShiftEstimate {
        dx: c.dx,
        dy: c.dy,
        peak: c.peak,
    })
}

/// Like [`best_shift`] but reports the absolute top-left placement.
pub fn best_placement(
    template: &FrameBuffer,
    search_region: &FrameBuffer,
) -> Result<Placement, CorrelationError> {
    search(template, search_region).map(|c| Placement {
        col: c.col,
        row: c.row,
        peak: c.peak,
    })
}

/// Searches for `template` in `frame` within `anchor` grown by `margin`, and
/// expresses the result relative to the anchor's pixel position.
pub fn locate(
    template: &FrameBuffer,
    frame: &FrameBuffer,
    anchor: &BoundingBox,
    margin: f64,
) -> Result<Located, CorrelationError> {
    let (fw, fh) = (frame.width() as f64, frame.height() as f64);
    let region = geometry::expand(anchor, margin, fw, fh).ok_or(CorrelationError::EmptyRegion)?;
    let (rc, rr, _, _) =
        pixel_rect(&region, frame.width(), frame.height()).ok_or(CorrelationError::EmptyRegion)?;
    let patch = extract_patch(frame, &region)?;
    let best = best_placement(template, &patch)?;
    let (col, row) = (rc + best.col, rr + best.row);
    Ok(Located {
        shift: ShiftEstimate {
            dx: col as i64 - anchor.x().round() as i64,
            dy: row as i64 - anchor.y().round() as i64,
            peak: best.peak,
        },
        col,
        row,
    })
}

/// Local registration of a small patch from one image against a second image
/// around `seed_box`.
///
/// The shift is the displacement of the best match from the seed box's
/// pixel-rounded position, which equals the centered-placement shift of
/// [`best_shift`] whenever the grown region is not cut by the frame. Callers
/// should discard pairs whose peak is low; a flat patch is an error.
pub fn register_regions(
    patch: &FrameBuffer,
    frame: &FrameBuffer,
    seed_box: &BoundingBox,
    margin: f64,
) -> Result<ShiftEstimate, CorrelationError> {
    locate(patch, frame, seed_box, margin).map(|l| l.shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn frame(w: usize, h: usize, f: impl Fn(usize, usize) -> u8) -> FrameBuffer {
        let data = (0..h)
            .flat_map(|r| (0..w).map(move |c| (r, c)))
            .map(|(r, c)| f(c, r))
            .collect();
        FrameBuffer::new(w, h, data).unwrap()
    }

    fn hash_pixel(c: usize, r: usize) -> u8 {
        let mut x = (c as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)
            ^ (r as u64).wrapping_mul(0xC2B2_AE3D_27D4_EB4F);
        x ^= x >> 29;
        x = x.wrapping_mul(0xBF58_476D_1CE4_E5B9);
        (x >> 56) as u8
    }

    fn paste(dst: &mut FrameBuffer, src: &FrameBuffer, col: usize, row: usize) {
        for r in 0..src.height() {
            for c in 0..src.width() {
                dst.set(col + c, row + r, src.get(c, r));
            }
        }
    }

    #[test]
    fn luma_examples() {
        let gray: Vec<u8> = [0u8, 17, 128, 255]
            .iter()
            .flat_map(|&v| [v, v, v])
            .collect();
        assert_eq!(to_luma(2, 2, &gray).unwrap().data(), &[0, 17, 128, 255]);
        assert_eq!(to_luma(1, 1, &[255, 0, 0]).unwrap().data(), &[76]);
        assert_eq!(to_luma(2, 1, &[0; 6]).unwrap().data(), &[0, 0]);
        assert!(matches!(
            to_luma(2, 2, &[0; 11]),
            Err(CorrelationError::RgbLength { .. })
        ));
    }

    #[test]
    fn patch_examples() {
        let f = frame(8, 6, hash_pixel);
        let whole = BoundingBox::new(0.0, 0.0, 8.0, 6.0).unwrap();
        assert_eq!(extract_patch(&f, &whole).unwrap(), f);
        let one = BoundingBox::new(3.0, 4.0, 1.0, 1.0).unwrap();
        assert_eq!(extract_patch(&f, &one).unwrap().data(), &[f.get(3, 4)]);

        // Straddles the right edge after rounding: 5.6 -> 6, 2.6 -> 3, cut at 8.
        let edge = BoundingBox::new(5.6, 1.0, 2.4, 2.0).unwrap();
        let p = extract_patch(&f, &edge).unwrap();
        let mut expected = Vec::new();
        for r in 1..3 {
            for c in 6..8 {
                expected.push(f.get(c, r));
            }
        }
        assert_eq!((p.width(), p.height()), (2, 2));
        assert_eq!(p.data(), expected.as_slice());

        let tiny = BoundingBox::new(2.0, 2.0, 0.4, 3.0).unwrap();
        assert_eq!(extract_patch(&f, &tiny), Err(CorrelationError::EmptyRegion));
    }

    #[test]
    fn zncc_examples() {
        let p = frame(9, 7, |c, r| hash_pixel(c, r) / 2 + 20);
        assert!((zncc(&p, &p).unwrap() - 1.0).abs() < 1e-12);
        let neg = FrameBuffer::new(9, 7, p.data().iter().map(|v| 255 - v).collect()).unwrap();
        assert!((zncc(&p, &neg).unwrap() + 1.0).abs() < 1e-12);
        let affine = FrameBuffer::new(9, 7, p.data().iter().map(|v| v + 30).collect()).unwrap();
        assert!((zncc(&affine, &p).unwrap() - 1.0).abs() < 1e-12);
        let flat = FrameBuffer::filled(9, 7, 40);
        assert_eq!(zncc(&flat, &p), Err(CorrelationError::FlatPatch));
        assert_eq!(zncc(&p, &flat), Err(CorrelationError::FlatPatch));
        assert!(matches!(
            zncc(&p, &FrameBuffer::filled(7, 9, 1)),
            Err(CorrelationError::DimensionMismatch(..))
        ));
    }

    #[test]
    fn shift_of_centered_and_offset_copies() {
        let tpl = frame(10, 8, hash_pixel);
        // Centered: search 30x24 -> center placement (10, 8).
        let mut search = frame(30, 24, |c, r| hash_pixel(c + 100, r + 77));
        paste(&mut search, &tpl, 10, 8);
        let s = best_shift(&tpl, &search).unwrap();
        assert_eq!((s.dx, s.dy), (0, 0));
        assert!((s.peak - 1.0).abs() < 1e-12);

        let mut search = frame(30, 24, |c, r| hash_pixel(c + 100, r + 77));
        paste(&mut search, &tpl, 12, 11);
        let s = best_shift(&tpl, &search).unwrap();
        assert_eq!((s.dx, s.dy), (2, 3));
        assert!((s.peak - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ties_prefer_nearest_then_smaller_dy_then_dx() {
        let tpl = frame(4, 4, hash_pixel);
        // Flat background with two identical copies equally far from center.
        let base = |_, _| 0u8;
        // search 14x14 -> center placement (5, 5)
        let mut search = frame(14, 14, base);
        paste(&mut search, &tpl, 2, 5); // dx = -3
        paste(&mut search, &tpl, 8, 5); // dx = +3
        let s = best_shift(&tpl, &search).unwrap();
        assert_eq!((s.dx, s.dy), (-3, 0));

        let mut search = frame(14, 14, base);
        paste(&mut search, &tpl, 5, 8); // dy = +3
        paste(&mut search, &tpl, 8, 5); // dx = +3
        let s = best_shift(&tpl, &search).unwrap();
        assert_eq!((s.dx, s.dy), (3, 0));

        let mut search = frame(14, 14, base);
        paste(&mut search, &tpl, 10, 5); // distance 5
        paste(&mut search, &tpl, 5, 1); // distance 4 (dy = -4)
        let s = best_shift(&tpl, &search).unwrap();
        assert_eq!((s.dx, s.dy), (0, -4));
    }

    #[test]
    fn shift_errors() {
        let tpl = frame(10, 10, hash_pixel);
        assert!(matches!(
            best_shift(&tpl, &frame(9, 20, hash_pixel)),
            Err(CorrelationError::SearchTooSmall { .. })
        ));
        let flat = FrameBuffer::filled(5, 5, 9);
        assert_eq!(
            best_shift(&flat, &frame(20, 20, hash_pixel)),
            Err(CorrelationError::FlatPatch)
        );
        assert_eq!(
            best_shift(&tpl, &FrameBuffer::filled(20, 20, 3)),
            Err(CorrelationError::FlatPatch)
        );
    }

    #[test]
    fn translation_equivariance() {
        let tpl = frame(6, 6, |c, r| hash_pixel(c + 3, r));
        let mut prev = None;
        for col in 4..12 {
            let mut search = frame(24, 18, |c, r| hash_pixel(c + 500, r + 9));
            paste(&mut search, &tpl, col, 5);
            let s = best_shift(&tpl, &search).unwrap();
            if let Some(p) = prev {
                assert_eq!(s.dx, p + 1);
            }
            prev = Some(s.dx);
        }
    }

    #[test]
    fn parallel_path_is_deterministic() {
        let tpl = frame(40, 40, |c, r| hash_pixel(c * 3, r + 1));
        let mut search = frame(128, 128, |c, r| hash_pixel(c + 11, r * 7));
        paste(&mut search, &tpl, 70, 33);
        let a = best_shift(&tpl, &search).unwrap();
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(1)
            .build()
            .unwrap();
        let b = pool.install(|| best_shift(&tpl, &search).unwrap());
        assert_eq!(a.dx, b.dx);
        assert_eq!(a.dy, b.dy);
        assert_eq!(a.peak.to_bits(), b.peak.to_bits());
        assert_eq!((a.dx, a.dy), (70 - 44, 33 - 44));
    }

    #[test]
    fn register_regions_examples() {
        let f = frame(80, 60, hash_pixel);
        let seed = BoundingBox::new(30.0, 20.0, 12.0, 10.0).unwrap();
        let patch = extract_patch(&f, &seed).unwrap();
        let s = register_regions(&patch, &f, &seed, 0.5).unwrap();
        assert_eq!((s.dx, s.dy), (0, 0));
        assert!((s.peak - 1.0).abs() < 1e-12);

        let shifted = extract_patch(&f, &seed.translated(5.0, 0.0)).unwrap();
        let s = register_regions(&shifted, &f, &seed, 1.0).unwrap();
        assert_eq!((s.dx, s.dy), (5, 0));

        let sky = FrameBuffer::filled(12, 10, 200);
        assert_eq!(
            register_regions(&sky, &f, &seed, 0.5),
            Err(CorrelationError::FlatPatch)
        );
    }

    #[test]
    fn register_regions_near_edge_reports_anchor_relative_shift() {
        let f = frame(50, 40, hash_pixel);
        let seed = BoundingBox::new(2.0, 3.0, 10.0, 10.0).unwrap();
        let patch = extract_patch(&f, &seed.translated(-2.0, 1.0)).unwrap();
        let s = register_regions(&patch, &f, &seed, 0.5).unwrap();
        assert_eq!((s.dx, s.dy), (-2, 1));
    }
}
