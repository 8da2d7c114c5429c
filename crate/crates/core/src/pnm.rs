//! Binary portable graymap (P5) and pixmap (P6) rasters.
//!
//! Both are written as `P5`/`P6`, a single space, width, a space, height,
//! a space, `255`, one newline, then row-major pixel bytes starting at the
//! top row. The reader also accepts arbitrary whitespace and `#` comments
//! in the header.

use crate::error::{Error, Result};
use std::io::Write;
use std::path::Path;

/// 8-bit grayscale raster, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

/// 8-bit RGB raster, row 0 at the top.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<[u8; 3]>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, fill: u8) -> Self {
        GrayImage {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.pixels[row * self.width + col]
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P5 {} {} 255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.pixels);
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let (width, height, body) = parse_header(bytes, b"P5")?;
        let n = width * height;
        if body.len() < n {
            return Err(Error::Format(format!(
                "expected {n} pixel bytes, found {}",
                body.len()
            )));
        }
        Ok(GrayImage {
            width,
            height,
            pixels: body[..n].to_vec(),
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        let bytes = std::fs::read(path).map_err(|e| Error::Config(format!("cannot read `{}`: {e}", path.display())))?;
        Self::decode(&bytes)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.encode())
    }
}

impl RgbImage {
    pub fn new(width: usize, height: usize, fill: [u8; 3]) -> Self {
        RgbImage {
            width,
            height,
            pixels: vec![fill; width * height],
        }
    }

    pub fn get(&self, col: usize, row: usize) -> [u8; 3] {
        self.pixels[row * self.width + col]
    }

    /// Set a pixel, silently ignoring coordinates outside the raster.
    pub fn put(&mut self, col: i64, row: i64, rgb: [u8; 3]) {
        if col >= 0 && row >= 0 && (col as usize) < self.width && (row as usize) < self.height {
            self.pixels[row as usize * self.width + col as usize] = rgb;
        }
    }

    pub fn encode(&self) -> Vec<u8> {
        let mut out = format!("P6 {} {} 255\n", self.width, self.height).into_bytes();
        out.reserve(self.pixels.len() * 3);
        for px in &self.pixels {
            out.extend_from_slice(px);
        }
        out
    }

    pub fn decode(bytes: &[u8]) -> Result<Self> {
        let (width, height, body) = parse_header(bytes, b"P6")?;
        let n = width * height;
        if body.len() < 3 * n {
            return Err(Error::Format(format!(
                "expected {} pixel bytes, found {}",
                3 * n,
                body.len()
            )));
        }
        let pixels = body[..3 * n]
            .chunks_exact(3)
            .map(|c| [c[0], c[1], c[2]])
            .collect();
        Ok(RgbImage {
            width,
            height,
            pixels,
        })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        write_file(path, &self.encode())
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut f = std::fs::File::create(path)?;
    f.write_all(bytes)?;
    Ok(())
}

fn parse_header<'a>(bytes: &'a [u8], magic: &[u8]) -> Result<(usize, usize, &'a [u8])> {
    if bytes.len() < 2 || &bytes[..2] != magic {
        return Err(Error::Format(format!(
            "missing {} magic number",
            String::from_utf8_lossy(magic)
        )));
    }
    let mut pos = 2;
    let mut fields = [0usize; 3];
    for field in fields.iter_mut() {
        // skip whitespace and comments
        loop {
            match bytes.get(pos) {
                Some(b) if b.is_ascii_whitespace() => pos += 1,
                Some(b'#') => {
                    while bytes.get(pos).is_some_and(|&b| b != b'\n') {
                        pos += 1;
                    }
                }
                _ => break,
            }
        }
        let start = pos;
        while bytes.get(pos).is_some_and(u8::is_ascii_digit) {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Format("truncated or malformed header".into()));
        }
        *field = std::str::from_utf8(&bytes[start..pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Format("header value out of range".into()))?;
    }
    match bytes.get(pos) {
        Some(b) if b.is_ascii_whitespace() => pos += 1,
        _ => return Err(Error::Format("missing whitespace after header".into())),
    }
    let [width, height, maxval] = fields;
    if width == 0 || height == 0 {
        return Err(Error::Format("image has zero width or height".into()));
    }
    if maxval != 255 {
        return Err(Error::Format(format!(
            "only 8-bit rasters are supported (maxval {maxval})"
        )));
    }
    Ok((width, height, &bytes[pos..]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gray_header_is_exact() {
        let img = GrayImage::new(3, 2, 7);
        let bytes = img.encode();
        assert_eq!(&bytes[..11], b"P5 3 2 255\n");
        assert_eq!(bytes.len(), 11 + 6);
        assert_eq!(GrayImage::decode(&bytes).unwrap(), img);
    }

    #[test]
    fn accepts_comments_and_newlines() {
        let bytes = b"P5\n# made by hand\n2\n1\n255\n\x00\xff";
        let img = GrayImage::decode(bytes).unwrap();
        assert_eq!(img.pixels, vec![0, 255]);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(GrayImage::decode(b"").is_err());
        assert!(GrayImage::decode(b"P6 1 1 255\n\0\0\0").is_err());
        assert!(GrayImage::decode(b"P5 0 4 255\n").is_err());
        assert!(GrayImage::decode(b"P5 2 2 255\n\0").is_err());
        assert!(GrayImage::decode(b"P5 2 2 65535\n\0\0\0\0\0\0\0\0").is_err());
        assert!(GrayImage::decode(b"P5 2").is_err());
    }

    #[test]
    fn rgb_round_trip() {
        let mut img = RgbImage::new(4, 3, [1, 2, 3]);
        img.put(3, 2, [9, 8, 7]);
        img.put(-1, 0, [0, 0, 0]);
        img.put(4, 0, [0, 0, 0]);
        let back = RgbImage::decode(&img.encode()).unwrap();
        assert_eq!(back, img);
        assert_eq!(back.get(3, 2), [9, 8, 7]);
    }
}
