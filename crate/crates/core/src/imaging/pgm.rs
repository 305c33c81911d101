//! Binary PGM (P5, maxval 255) codec.

use super::{GrayImage, ImagingError, Raster};

struct HeaderReader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> HeaderReader<'a> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            let b = self.bytes[self.pos];
            if b == b'#' {
                while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                    self.pos += 1;
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, ImagingError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(ImagingError::MalformedHeader(format!("missing {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| ImagingError::MalformedHeader(format!("invalid {what}")))
    }
}

pub fn decode_pgm(bytes: &[u8]) -> Result<GrayImage, ImagingError> {
    if bytes.len() < 2 || &bytes[..2] != b"P5" {
        return Err(ImagingError::MalformedHeader("expected magic P5".into()));
    }
    let mut reader = HeaderReader { bytes, pos: 2 };
    let width = reader.number("width")? as usize;
    let height = reader.number("height")? as usize;
    let maxval = reader.number("maxval")?;
    if maxval != 255 {
        return Err(ImagingError::UnsupportedMaxval(maxval));
    }
    // Exactly one whitespace byte separates the header from the payload.
    match bytes.get(reader.pos) {
        Some(b) if b.is_ascii_whitespace() => reader.pos += 1,
        _ => return Err(ImagingError::MalformedHeader("missing separator after maxval".into())),
    }
    let expected = width * height;
    let payload = &bytes[reader.pos..];
    if payload.len() < expected {
        return Err(ImagingError::TruncatedData { expected, found: payload.len() });
    }
    let data = payload[..expected].iter().map(|&b| f64::from(b) / 255.0).collect();
    GrayImage::new(width, height, data)
}

/// Encodes any raster as P5; values are clamped to `[0, 1]` and rounded.
pub fn encode_pgm<R: Raster>(img: &R) -> Vec<u8> {
    let mut out = format!("P5\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.data().iter().map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p5(width: usize, height: usize, payload: &[u8]) -> Vec<u8> {
        let mut v = format!("P5\n{width} {height}\n255\n").into_bytes();
        v.extend_from_slice(payload);
        v
    }

    #[test]
    fn maps_bytes_to_unit_interval() {
        let payload: Vec<u8> = [0u8, 255, 128, 64].iter().cycle().take(64).copied().collect();
        let img = decode_pgm(&p5(8, 8, &payload)).unwrap();
        assert_eq!(img.data()[0], 0.0);
        assert_eq!(img.data()[1], 1.0);
        assert_eq!(img.data()[2], 128.0 / 255.0);
        assert_eq!(img.data()[3], 64.0 / 255.0);
    }

    #[test]
    fn truncated_payload() {
        let bytes = p5(8, 8, &[7u8; 40]);
        assert_eq!(
            decode_pgm(&bytes),
            Err(ImagingError::TruncatedData { expected: 64, found: 40 })
        );
    }

    #[test]
    fn rejects_color_magic() {
        let mut bytes = p5(8, 8, &[0u8; 192]);
        bytes[1] = b'6';
        assert!(matches!(decode_pgm(&bytes), Err(ImagingError::MalformedHeader(_))));
    }

    #[test]
    fn rejects_16_bit() {
        let mut bytes = b"P5\n8 8\n65535\n".to_vec();
        bytes.extend_from_slice(&[0u8; 128]);
        assert_eq!(decode_pgm(&bytes), Err(ImagingError::UnsupportedMaxval(65535)));
    }

    #[test]
    fn header_comments_are_skipped() {
        let mut bytes = b"P5\n# scanner dump\n8 8\n# depth\n255\n".to_vec();
        bytes.extend_from_slice(&[17u8; 64]);
        let img = decode_pgm(&bytes).unwrap();
        assert_eq!((img.width(), img.height()), (8, 8));
    }

    proptest! {
        #[test]
        fn payload_round_trips(w in 8usize..24, h in 8usize..24, seed in any::<u64>()) {
            let payload: Vec<u8> = (0..w * h)
                .map(|i| (seed.wrapping_mul(6364136223846793005).wrapping_add((i as u64).wrapping_mul(1442695040888963407)) >> 56) as u8)
                .collect();
            let bytes = p5(w, h, &payload);
            let encoded = encode_pgm(&decode_pgm(&bytes).unwrap());
            prop_assert_eq!(encoded, bytes);
        }
    }
}
