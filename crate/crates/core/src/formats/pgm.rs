//! Binary PGM (P5) reading and writing.
//!
//! Frames are 8-bit (`maxval <= 255`); heatmaps are written 16-bit big-endian
//! with `maxval = 65535`.

use thiserror::Error;

use crate::model::FrameBuffer;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("not a binary PGM (expected magic P5)")]
    Magic,
    #[error("truncated or malformed header")]
    Header,
    #[error("unsupported maxval {0}")]
    MaxVal(u32),
    #[error("pixel data has {got} bytes, expected {expected}")]
    Data { expected: usize, got: usize },
}

/// A decoded grayscale image with samples widened to 16 bits.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u32,
    pub samples: Vec<u16>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&c) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or(PgmError::Header)
    }
}

/// Decodes a P5 image of any maxval up to 65535.
pub fn decode(bytes: &[u8]) -> Result<GrayImage, PgmError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(PgmError::Magic);
    }
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number()? as usize;
    let height = cur.number()? as usize;
    let maxval = cur.number()?;
    if maxval == 0 || maxval > 65535 {
        return Err(PgmError::MaxVal(maxval));
    }
    // Exactly one whitespace byte separates the header from the raster.
    if !bytes.get(cur.pos).is_some_and(u8::is_ascii_whitespace) {
        return Err(PgmError::Header);
    }
    let raster = &bytes[cur.pos + 1..];
    let n = width.checked_mul(height).ok_or(PgmError::Header)?;
    let depth = if maxval < 256 { 1 } else { 2 };
    if raster.len() != n * depth {
        return Err(PgmError::Data {
            expected: n * depth,
            got: raster.len(),
        });
    }
    let samples = if depth == 1 {
        raster.iter().map(|&v| u16::from(v)).collect()
    } else {
        raster
            .chunks_exact(2)
            .map(|p| u16::from_be_bytes([p[0], p[1]]))
            .collect()
    };
    Ok(GrayImage {
        width,
        height,
        maxval,
        samples,
    })
}

/// Decodes an 8-bit P5 frame.
pub fn read_frame(bytes: &[u8]) -> Result<FrameBuffer, PgmError> {
    let img = decode(bytes)?;
    if img.maxval > 255 {
        return Err(PgmError::MaxVal(img.maxval));
    }
    let data = img.samples.into_iter().map(|v| v as u8).collect();
    Ok(FrameBuffer::new(img.width, img.height, data).expect("raster length checked"))
}

/// Encodes an 8-bit frame as `P5\n<w> <h>\n255\n` followed by the raw bytes.
pub fn write_frame(frame: &FrameBuffer) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", frame.width(), frame.height()).into_bytes();
    out.extend_from_slice(frame.data());
    out
}

/// Encodes 16-bit samples (big-endian, maxval 65535).
pub fn write_u16(width: usize, height: usize, samples: &[u16]) -> Vec<u8> {
    assert_eq!(
        samples.len(),
        width * height,
        "sample count must match dimensions"
    );
    let mut out = format!("P5\n{width} {height}\n65535\n").into_bytes();
    out.reserve(samples.len() * 2);
    for v in samples {
        out.extend_from_slice(&v.to_be_bytes());
    }
    out
}
