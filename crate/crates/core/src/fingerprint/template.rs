//! `FPT1` template files: magic, little-endian u16 count/width/height, then
//! 16-byte records `(f32 x, f32 y, f32 theta, u8 kind, 3 pad bytes)`.

use super::{FingerprintError, FingerprintTemplate, Minutia, MinutiaKind, MAX_MINUTIAE};

const MAGIC: &[u8; 4] = b"FPT1";
const HEADER: usize = 10;
const RECORD: usize = 16;

pub fn encode_template(t: &FingerprintTemplate) -> Vec<u8> {
    assert!(t.minutiae.len() <= MAX_MINUTIAE, "template holds more than {MAX_MINUTIAE} minutiae");
    let mut out = Vec::with_capacity(HEADER + RECORD * t.minutiae.len());
    out.extend_from_slice(MAGIC);
    for v in [t.minutiae.len(), t.image_width, t.image_height] {
        out.extend_from_slice(&(v as u16).to_le_bytes());
    }
    for m in &t.minutiae {
        out.extend_from_slice(&m.x.to_le_bytes());
        out.extend_from_slice(&m.y.to_le_bytes());
        out.extend_from_slice(&m.theta.to_le_bytes());
        out.extend_from_slice(&[m.kind.code(), 0, 0, 0]);
    }
    out
}

pub fn decode_template(bytes: &[u8]) -> Result<FingerprintTemplate, FingerprintError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(FingerprintError::BadMagic);
    }
    if bytes.len() < HEADER {
        return Err(FingerprintError::Truncated { expected: HEADER, found: bytes.len() });
    }
    let u16_at = |i: usize| usize::from(u16::from_le_bytes([bytes[i], bytes[i + 1]]));
    let f32_at = |i: usize| f32::from_le_bytes([bytes[i], bytes[i + 1], bytes[i + 2], bytes[i + 3]]);
    let (n, width, height) = (u16_at(4), u16_at(6), u16_at(8));
    let expected = HEADER + RECORD * n;
    if bytes.len() < expected {
        return Err(FingerprintError::Truncated { expected, found: bytes.len() });
    }
    if n > MAX_MINUTIAE {
        return Err(FingerprintError::BadRecord { index: n, reason: format!("count exceeds {MAX_MINUTIAE}") });
    }
    let mut minutiae = Vec::with_capacity(n);
    for index in 0..n {
        let o = HEADER + RECORD * index;
        let (x, y, theta) = (f32_at(o), f32_at(o + 4), f32_at(o + 8));
        let kind = MinutiaKind::from_code(bytes[o + 12])
            .ok_or_else(|| FingerprintError::BadRecord { index, reason: format!("kind code {}", bytes[o + 12]) })?;
        let inside = x >= 0.0 && y >= 0.0 && (x as f64) < width as f64 && (y as f64) < height as f64;
        if !inside || !(0.0..std::f32::consts::TAU).contains(&theta) {
            return Err(FingerprintError::BadRecord { index, reason: format!("({x}, {y}, {theta}) out of range") });
        }
        minutiae.push(Minutia { x, y, theta, kind });
    }
    Ok(FingerprintTemplate { minutiae, image_width: width, image_height: height, quality: 0.0 })
}
