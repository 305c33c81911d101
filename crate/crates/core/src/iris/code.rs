//! `IRC1` iris code files: magic, scheme byte, u32 LE bit length, then the
//! bits and the mask, each packed LSB-first.

use super::{haar_layout, mellin_layout, IrisCode, IrisError, IrisScheme, MellinParams, Segment};

const MAGIC: &[u8; 4] = b"IRC1";
const HEADER: usize = 9;

fn pack(bits: &[bool], out: &mut Vec<u8>) {
    for chunk in bits.chunks(8) {
        out.push(chunk.iter().enumerate().fold(0u8, |acc, (i, &b)| acc | (u8::from(b) << i)));
    }
}

fn unpack(bytes: &[u8], len: usize) -> Vec<bool> {
    (0..len).map(|i| bytes[i / 8] >> (i % 8) & 1 == 1).collect()
}

pub fn encode_code(code: &IrisCode) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER + 2 * code.len().div_ceil(8));
    out.extend_from_slice(MAGIC);
    out.push(code.scheme.code());
    out.extend_from_slice(&(code.len() as u32).to_le_bytes());
    pack(&code.bits, &mut out);
    pack(&code.mask, &mut out);
    out
}

/// The file stores only the bit count, so the segment layout is rebuilt
/// assuming the given strip height (Haar) or Mellin anchor grid.
fn layout(scheme: IrisScheme, length: usize, radial: usize, mellin: &MellinParams) -> Option<Vec<Segment>> {
    match scheme {
        IrisScheme::Haar => {
            // R·A/256·3 + R·A/1024·4 = R·A/64 bits.
            let area = length.checked_mul(64)?;
            (radial.is_multiple_of(32) && radial > 0 && area % radial == 0 && (area / radial).is_multiple_of(32))
                .then(|| haar_layout(radial, area / radial))
        }
        IrisScheme::Mellin => {
            let per_row = mellin.operators.len() * mellin.anchor_rows;
            (per_row > 0 && length.is_multiple_of(per_row) && length > 0)
                .then(|| mellin_layout(mellin.operators.len(), mellin.anchor_rows, length / per_row))
        }
    }
}

pub fn decode_code(bytes: &[u8], radial: usize, mellin: &MellinParams) -> Result<IrisCode, IrisError> {
    if bytes.len() < 4 || &bytes[..4] != MAGIC {
        return Err(IrisError::BadMagic);
    }
    if bytes.len() < HEADER {
        return Err(IrisError::Truncated { expected: HEADER, found: bytes.len() });
    }
    let scheme = IrisScheme::from_code(bytes[4]).ok_or(IrisError::UnknownScheme(bytes[4]))?;
    let length = u32::from_le_bytes(bytes[5..9].try_into().unwrap()) as usize;
    let packed = length.div_ceil(8);
    let expected = HEADER + 2 * packed;
    if bytes.len() < expected {
        return Err(IrisError::Truncated { expected, found: bytes.len() });
    }
    let segments = layout(scheme, length, radial, mellin).ok_or(IrisError::BadLength { scheme, length })?;
    Ok(IrisCode {
        scheme,
        bits: unpack(&bytes[HEADER..], length),
        mask: unpack(&bytes[HEADER + packed..], length),
        segments,
    })
}
