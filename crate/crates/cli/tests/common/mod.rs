#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};

use trackfuse_core::simulator::{Background, DetectorSpec, ObjectSpec, Scenario};
use trackfuse_core::{AnnotationRecord, BoundingBox, FrameBuffer};

pub fn trackfuse(args: &[&dyn AsRef<std::ffi::OsStr>]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_trackfuse"));
    for a in args {
        cmd.arg(a);
    }
    cmd.output().expect("binary runs")
}

pub fn write_frames(dir: &Path, frames: &[FrameBuffer]) {
    std::fs::create_dir_all(dir).unwrap();
    for (t, f) in frames.iter().enumerate() {
        std::fs::write(
            dir.join(format!("f{t:04}.pgm")),
            trackfuse_core::formats::pgm::write_frame(f),
        )
        .unwrap();
    }
}

/// Single-object scene whose detector dips on `dips`.
pub fn scene(
    seed: u64,
    frame_size: (u32, u32),
    frame_count: u64,
    dips: &[u64],
    dip_conf: f64,
) -> Scenario {
    Scenario {
        seed,
        frame_size,
        frame_count,
        background: Background {
            noise_sigma: 6.0,
            base_level: 50,
        },
        object: ObjectSpec {
            size: (28.0, 20.0),
            intensity: 210,
            start: (20.0, 30.0),
            velocity: (2.0, 1.0),
        },
        detector: DetectorSpec {
            jitter_sigma: 0.4,
            base_conf: 0.85,
            dip_frames: dips.iter().copied().collect(),
            dip_conf,
            dropout_frames: BTreeSet::new(),
        },
    }
}

/// ZNCC straight from the definition in floating point; `None` for a flat input.
pub fn float_zncc(t: &[f64], w: &[f64]) -> Option<f64> {
    let n = t.len() as f64;
    let mt = t.iter().sum::<f64>() / n;
    let mw = w.iter().sum::<f64>() / n;
    let (mut num, mut st, mut sw) = (0.0, 0.0, 0.0);
    for (a, b) in t.iter().zip(w) {
        num += (a - mt) * (b - mw);
        st += (a - mt) * (a - mt);
        sw += (b - mw) * (b - mw);
    }
    (st > 0.0 && sw > 0.0).then(|| num / (st * sw).sqrt())
}

/// IOU of integer boxes by counting unit cells.
pub fn pixel_iou(a: (i64, i64, i64, i64), b: (i64, i64, i64, i64)) -> f64 {
    let inside = |r: (i64, i64, i64, i64), x: i64, y: i64| {
        x >= r.0 && x < r.0 + r.2 && y >= r.1 && y < r.1 + r.3
    };
    let (x0, y0) = (a.0.min(b.0), a.1.min(b.1));
    let (x1, y1) = ((a.0 + a.2).max(b.0 + b.2), (a.1 + a.3).max(b.1 + b.3));
    let (mut inter, mut union) = (0u64, 0u64);
    for y in y0..y1 {
        for x in x0..x1 {
            let (ia, ib) = (inside(a, x, y), inside(b, x, y));
            inter += u64::from(ia && ib);
            union += u64::from(ia || ib);
        }
    }
    inter as f64 / union as f64
}

/// Canvas cells whose unit interval overlaps `(lo, hi)`.
pub fn covered(lo: f64, hi: f64, n: usize) -> Vec<usize> {
    (0..n)
        .filter(|&i| (i as f64) < hi && (i + 1) as f64 > lo)
        .collect()
}

pub fn brute_heatmap<'a>(
    records: impl IntoIterator<Item = &'a AnnotationRecord>,
    size: usize,
) -> Vec<u32> {
    let mut grid = vec![0u32; size * size];
    for r in records {
        let sx = size as f64 / f64::from(r.image_width);
        let sy = size as f64 / f64::from(r.image_height);
        let cols = covered(r.bbox.x() * sx, r.bbox.right() * sx, size);
        for row in covered(r.bbox.y() * sy, r.bbox.bottom() * sy, size) {
            for &col in &cols {
                grid[row * size + col] += 1;
            }
        }
    }
    grid
}

/// Area at the 1280 x 1280 reference, computed from the scale factors by hand.
pub fn reference_area(b: &BoundingBox, iw: u32, ih: u32) -> f64 {
    let sx = 1280.0 / f64::from(iw);
    let sy = 1280.0 / f64::from(ih);
    (b.w() * sx) * (b.h() * sy)
}

/// VOC XML for one image with integer corner boxes `(xmin, ymin, xmax, ymax, difficult)`.
pub fn voc_xml(name: &str, w: u32, h: u32, boxes: &[(u32, u32, u32, u32, bool)]) -> String {
    let mut s = format!(
        "<annotation>\n  <filename>{name}</filename>\n  <size><width>{w}</width><height>{h}</height><depth>3</depth></size>\n"
    );
    for &(x0, y0, x1, y1, d) in boxes {
        s += &format!(
            "  <object><name>drone</name><difficult>{}</difficult><bndbox><xmin>{x0}</xmin><ymin>{y0}</ymin><xmax>{x1}</xmax><ymax>{y1}</ymax></bndbox></object>\n",
            u8::from(d)
        );
    }
    s + "</annotation>\n"
}

/// Big-endian 16-bit samples of a P5 image written by the heatmap command.
pub fn read_pgm16(bytes: &[u8]) -> (usize, usize, Vec<u16>) {
    let img = trackfuse_core::formats::pgm::decode(bytes).expect("valid pgm");
    assert_eq!(img.maxval, 65535);
    (img.width, img.height, img.samples)
}
