//! Greyscale PGM: reads P2 and P5 with maxval up to 255, writes P5.

use std::path::Path;

use rldeconv_core::Image;

use crate::error::{io_err, Error, Result};

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Cursor<'a> {
    fn err<T>(&self, message: impl Into<String>) -> Result<T> {
        Err(Error::Pgm {
            offset: self.pos,
            message: message.into(),
        })
    }

    /// Skips whitespace and `#` comments running to end of line.
    fn skip_separators(&mut self) {
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

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_separators();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return match self.bytes.get(self.pos) {
                None => self.err(format!("unexpected end of data, expected {what}")),
                Some(&b) => self.err(format!("expected {what}, found byte 0x{b:02x}")),
            };
        }
        let text = std::str::from_utf8(&self.bytes[start..self.pos]).unwrap();
        text.parse().or_else(|_| {
            self.pos = start;
            self.err(format!("{what} {text} is out of range"))
        })
    }
}

/// Decodes a P2 or P5 greymap. Samples are scaled to `[0, 255]` when maxval
/// is below 255.
pub fn read_pgm(bytes: &[u8]) -> Result<Image> {
    let mut cur = Cursor { bytes, pos: 0 };
    let binary = match bytes.get(..2) {
        Some(b"P5") => true,
        Some(b"P2") => false,
        _ => return cur.err("missing P2/P5 magic number"),
    };
    cur.pos = 2;
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    cur.skip_separators();
    let maxval_at = cur.pos;
    let maxval = cur.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(Error::Pgm {
            offset: maxval_at,
            message: format!("image dimensions {width}x{height} are empty"),
        });
    }
    if maxval == 0 || maxval > 255 {
        return Err(Error::Pgm {
            offset: maxval_at,
            message: format!("unsupported maxval {maxval} (must be 1..=255)"),
        });
    }
    let count = width
        .checked_mul(height)
        .filter(|&n| n <= bytes.len().max(1) * 4)
        .ok_or(Error::Pgm {
            offset: maxval_at,
            message: format!("image dimensions {width}x{height} exceed the payload"),
        })?;
    let scale = 255.0 / maxval as f64;
    let sample = |v: usize| if maxval == 255 { v as f64 } else { v as f64 * scale };

    let mut data = Vec::with_capacity(count);
    if binary {
        // Exactly one whitespace byte separates the header from the raster.
        match bytes.get(cur.pos) {
            Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
            _ => return cur.err("expected a single whitespace byte after maxval"),
        }
        let raster = &bytes[cur.pos..];
        if raster.len() < count {
            cur.pos = bytes.len();
            return cur.err(format!(
                "truncated payload: {} of {count} pixel bytes",
                raster.len()
            ));
        }
        for (i, &b) in raster[..count].iter().enumerate() {
            if b as usize > maxval {
                cur.pos += i;
                return cur.err(format!("sample {b} exceeds maxval {maxval}"));
            }
            data.push(sample(b as usize));
        }
    } else {
        for _ in 0..count {
            cur.skip_separators();
            let at = cur.pos;
            let v = cur.number("sample")?;
            if v > maxval {
                cur.pos = at;
                return cur.err(format!("sample {v} exceeds maxval {maxval}"));
            }
            data.push(sample(v));
        }
    }
    Ok(Image::new(width, height, data)?)
}

/// Encodes as binary P5 with maxval 255, rounding to nearest and clamping.
pub fn write_pgm(img: &Image) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| v.round().clamp(0.0, 255.0) as u8));
    out
}

pub fn read_pgm_file(path: impl AsRef<Path>) -> Result<Image> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(io_err(path))?;
    read_pgm(&bytes)
}

pub fn write_pgm_file(path: impl AsRef<Path>, img: &Image) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, write_pgm(img)).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn offset_of(e: Error) -> usize {
        match e {
            Error::Pgm { offset, .. } => offset,
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn binary_two_by_two() {
        let mut bytes = b"P5 2 2 255\n".to_vec();
        bytes.extend([0, 64, 128, 255]);
        let img = read_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (2, 2));
        assert_eq!(img.data(), &[0.0, 64.0, 128.0, 255.0]);
    }

    #[test]
    fn ascii_with_comments() {
        let text = b"P2\n# made by hand\n3 1\n# max\n255\n10 20\n 30\n";
        assert_eq!(read_pgm(text).unwrap().data(), &[10.0, 20.0, 30.0]);
    }

    #[test]
    fn small_maxval_is_rescaled() {
        let img = read_pgm(b"P2 2 1 15 0 15").unwrap();
        assert_eq!(img.data(), &[0.0, 255.0]);
    }

    #[test]
    fn write_clamps_and_rounds() {
        let img = Image::new(4, 1, vec![255.4, -3.0, 12.5, 99.49]).unwrap();
        let bytes = write_pgm(&img);
        assert!(bytes.starts_with(b"P5\n4 1\n255\n"));
        assert_eq!(&bytes[bytes.len() - 4..], &[255, 0, 13, 99]);
    }

    #[test]
    fn malformed_inputs_report_offsets() {
        assert_eq!(offset_of(read_pgm(b"P6 1 1 255\n\0").unwrap_err()), 0);
        assert_eq!(offset_of(read_pgm(b"P5 2 x 255\n").unwrap_err()), 5);
        assert_eq!(offset_of(read_pgm(b"P5 1 1 65535\n\0\0").unwrap_err()), 7);
        assert_eq!(offset_of(read_pgm(b"P5 2 2 255\n\x01\x02").unwrap_err()), 13);
        assert_eq!(offset_of(read_pgm(b"P2 2 1 255 1").unwrap_err()), 12);
        assert_eq!(offset_of(read_pgm(b"P2 2 1 100 1 101").unwrap_err()), 13);
        let msg = read_pgm(b"P5 2 2 255\n\x01").unwrap_err().to_string();
        assert!(msg.contains("byte 12") && msg.contains("truncated"), "{msg}");
        assert!(read_pgm(b"P5 0 2 255\n").is_err());
        assert!(read_pgm(b"").is_err());
    }

    proptest! {
        #[test]
        fn integer_images_round_trip(w in 1usize..20, h in 1usize..20, seed in any::<u64>()) {
            let mut s = seed;
            let img = Image::from_fn(w, h, |_, _| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1);
                (s >> 56) as f64
            });
            prop_assert_eq!(read_pgm(&write_pgm(&img)).unwrap(), img.clone());
            // P2 text of the same image decodes identically.
            let mut text = format!("P2\n{w} {h}\n255\n");
            for v in img.data() {
                text.push_str(&format!("{v} "));
            }
            prop_assert_eq!(read_pgm(text.as_bytes()).unwrap(), img);
        }
    }
}
