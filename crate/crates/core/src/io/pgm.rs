//! Binary PGM (P5) snapshots.
//!
//! Values in `[0, display_max]` map affinely onto `0..=255`; larger values
//! saturate. The top row of the image is the largest `y`. `display_max` is
//! stored next to the image in a one-line sidecar.

use super::ParseError;
use crate::grid::Field;

/// An 8-bit gray image, rows top to bottom.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
}

impl Pgm {
    pub fn from_field(f: &Field, display_max: f64) -> Pgm {
        let scale = if display_max > 0.0 && display_max.is_finite() {
            255.0 / display_max
        } else {
            0.0
        };
        let mut pixels = Vec::with_capacity(f.width * f.height);
        for row in (0..f.height).rev() {
            for i in 0..f.width {
                let v = f.values[row * f.width + i];
                let g = if v.is_nan() { 0.0 } else { (v * scale).round().clamp(0.0, 255.0) };
                pixels.push(g as u8);
            }
        }
        Pgm {
            width: f.width,
            height: f.height,
            pixels,
        }
    }
}

/// Header is exactly `P5\n<w> <h>\n255\n`.
pub fn encode_pgm(img: &Pgm) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width, img.height).into_bytes();
    out.extend_from_slice(&img.pixels);
    out
}

/// Sidecar text recording the gray-scale mapping.
pub fn snapshot_sidecar(t: f64, display_max: f64) -> String {
    format!("t = {t}\ndisplay_max = {display_max}\n")
}

struct Header<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Header<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                b' ' | b'\t' | b'\r' | b'\n' => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize, ParseError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse::<usize>().ok())
            .ok_or_else(|| ParseError::new(format!("PGM header: bad {what}")))
    }
}

/// Decodes P5 with `maxval ≤ 255`; header comments are allowed.
pub fn decode_pgm(bytes: &[u8]) -> Result<Pgm, ParseError> {
    if !bytes.starts_with(b"P5") {
        return Err(ParseError::new("PGM: magic number must be P5"));
    }
    let mut h = Header { bytes, pos: 2 };
    let width = h.number("width")?;
    let height = h.number("height")?;
    let maxval = h.number("maxval")?;
    if width == 0 || height == 0 {
        return Err(ParseError::new("PGM: width and height must be positive"));
    }
    if maxval == 0 || maxval > 255 {
        return Err(ParseError::new(format!("PGM: maxval {maxval} outside 1..=255")));
    }
    // exactly one whitespace byte separates the header from the raster
    match bytes.get(h.pos) {
        Some(b) if b.is_ascii_whitespace() => h.pos += 1,
        _ => return Err(ParseError::new("PGM: missing whitespace after maxval")),
    }
    let n = width
        .checked_mul(height)
        .ok_or_else(|| ParseError::new("PGM: image size overflows"))?;
    let raster = &bytes[h.pos..];
    if raster.len() != n {
        return Err(ParseError::new(format!(
            "PGM: expected {n} raster bytes, found {}",
            raster.len()
        )));
    }
    if let Some(&b) = raster.iter().find(|&&b| usize::from(b) > maxval) {
        return Err(ParseError::new(format!("PGM: sample {b} exceeds maxval {maxval}")));
    }
    Ok(Pgm {
        width,
        height,
        pixels: raster.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::DomainSpec;
    use crate::grid::Grid;

    #[test]
    fn header_is_exact_and_round_trips() {
        let img = Pgm {
            width: 3,
            height: 2,
            pixels: vec![0, 10, 20, 30, 40, 255],
        };
        let bytes = encode_pgm(&img);
        assert!(bytes.starts_with(b"P5\n3 2\n255\n"));
        assert_eq!(decode_pgm(&bytes).unwrap(), img);
    }

    #[test]
    fn comments_in_header_are_skipped() {
        let mut bytes = b"P5\n# made by hand\n2 1\n# depth\n200\n".to_vec();
        bytes.extend_from_slice(&[7, 200]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!((img.width, img.height, img.pixels), (2, 1, vec![7, 200]));
    }

    #[test]
    fn field_maps_affinely_with_top_row_first() {
        let grid = Grid::new(DomainSpec::unit_square(), 4).unwrap();
        let mut f = Field::zeros(&grid);
        let top_left = grid.index(0, grid.height - 1);
        f.values[top_left] = 2.0;
        f.values[grid.index(1, 0)] = 1.0;
        f.values[grid.index(2, 0)] = 9.0;
        let img = Pgm::from_field(&f, 2.0);
        assert_eq!(img.pixels[0], 255);
        let bottom = (grid.height - 1) * grid.width;
        assert_eq!(img.pixels[bottom + 1], 128);
        assert_eq!(img.pixels[bottom + 2], 255);
    }

    #[test]
    fn malformed_images_are_rejected() {
        let cases: [&[u8]; 6] = [
            b"P2\n1 1\n255\n\x00",
            b"P5\n1 1\n256\n\x00",
            b"P5\n2 1\n255\n\x00",
            b"P5\n0 1\n255\n",
            b"P5\n1 1\n10\n\xff",
            b"P5\n1 1\n255",
        ];
        for c in cases {
            assert!(decode_pgm(c).is_err(), "{c:?}");
        }
    }
}
