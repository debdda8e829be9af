//! Netpbm grayscale (PGM) reading and writing, plain (`P2`) and raw (`P5`).

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// A grayscale raster as stored in the file: row-major samples in
/// `0..=maxval`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub samples: Vec<u16>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, maxval: u16, samples: Vec<u16>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::InvalidParams("image must be at least 1x1".into()));
        }
        if maxval == 0 {
            return Err(Error::InvalidParams("maxval must be positive".into()));
        }
        if samples.len() != width * height {
            return Err(Error::InvalidParams(format!(
                "{}x{} image needs {} samples, got {}",
                width,
                height,
                width * height,
                samples.len()
            )));
        }
        if let Some(s) = samples.iter().find(|&&s| s > maxval) {
            return Err(Error::InvalidParams(format!(
                "sample {s} exceeds maxval {maxval}"
            )));
        }
        Ok(GrayImage {
            width,
            height,
            maxval,
            samples,
        })
    }

    pub fn get(&self, col: usize, row: usize) -> u16 {
        self.samples[row * self.width + col]
    }

    /// Raw (`P5`) encoding; samples take two big-endian bytes when
    /// `maxval > 255`.
    pub fn to_p5(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n{}\n", self.width, self.height, self.maxval).into_bytes();
        if self.maxval > 255 {
            for s in &self.samples {
                out.extend_from_slice(&s.to_be_bytes());
            }
        } else {
            out.extend(self.samples.iter().map(|&s| s as u8));
        }
        out
    }

    /// Plain (`P2`) encoding, one image row per line.
    pub fn to_p2(&self) -> Vec<u8> {
        let mut out = format!("P2\n{} {}\n{}\n", self.width, self.height, self.maxval);
        for row in self.samples.chunks(self.width) {
            let line: Vec<String> = row.iter().map(u16::to_string).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out.into_bytes()
    }
}

pub fn read_pgm(path: impl AsRef<Path>) -> Result<GrayImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    parse_pgm(&bytes)
}

pub fn write_pgm(path: impl AsRef<Path>, image: &GrayImage) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, image.to_p5()).map_err(|e| Error::io(path, e))
}

fn malformed(offset: usize, message: impl Into<String>) -> Error {
    Error::Pgm {
        offset,
        message: message.into(),
    }
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
                    if c == b'\n' || c == b'\r' {
                        break;
                    }
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(match self.bytes.get(self.pos) {
                None => malformed(start, format!("truncated before {what}")),
                Some(b) => malformed(start, format!("expected {what}, found byte 0x{b:02x}")),
            });
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).expect("ascii digits");
        text.parse()
            .map_err(|_| malformed(start, format!("{what} {text} is out of range")))
    }
}

/// Parses a `P2` or `P5` file.
pub fn parse_pgm(bytes: &[u8]) -> Result<GrayImage> {
    let magic = bytes
        .get(..2)
        .ok_or_else(|| malformed(0, "truncated magic number"))?;
    let raw = match magic {
        b"P5" => true,
        b"P2" => false,
        _ => {
            return Err(malformed(
                0,
                format!(
                    "magic number {:?} is not a grayscale PGM (P2 or P5)",
                    String::from_utf8_lossy(magic)
                ),
            ))
        }
    };
    let mut cur = Cursor { bytes, pos: 2 };
    if !cur
        .bytes
        .get(2)
        .is_some_and(|b| b.is_ascii_whitespace() || *b == b'#')
    {
        return Err(malformed(2, "expected whitespace after magic number"));
    }
    let width_at = cur.pos;
    let width = cur.number("width")? as usize;
    let height = cur.number("height")? as usize;
    if width == 0 || height == 0 {
        return Err(malformed(width_at, "zero image dimension"));
    }
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(malformed(
            maxval_at,
            format!("maxval {maxval} outside 1..=65535"),
        ));
    }
    let maxval = maxval as u16;
    let count = width
        .checked_mul(height)
        .ok_or_else(|| malformed(width_at, "image dimensions overflow"))?;

    let mut samples = Vec::with_capacity(count);
    if raw {
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            Some(_) => return Err(malformed(cur.pos, "expected whitespace before raster")),
            None => return Err(malformed(cur.pos, "truncated before raster")),
        }
        let width_bytes = if maxval > 255 { 2 } else { 1 };
        let need = count * width_bytes;
        let raster = &bytes[cur.pos..];
        if raster.len() < need {
            return Err(malformed(
                bytes.len(),
                format!(
                    "raster truncated: expected {need} bytes, found {}",
                    raster.len()
                ),
            ));
        }
        for k in 0..count {
            let at = cur.pos + k * width_bytes;
            let s = if width_bytes == 2 {
                u16::from_be_bytes([bytes[at], bytes[at + 1]])
            } else {
                bytes[at] as u16
            };
            if s > maxval {
                return Err(malformed(at, format!("sample {s} exceeds maxval {maxval}")));
            }
            samples.push(s);
        }
    } else {
        for _ in 0..count {
            let at = cur.pos;
            let s = cur.number("sample")?;
            if s > maxval as u32 {
                return Err(malformed(at, format!("sample {s} exceeds maxval {maxval}")));
            }
            samples.push(s as u16);
        }
    }
    Ok(GrayImage {
        width,
        height,
        maxval,
        samples,
    })
}
