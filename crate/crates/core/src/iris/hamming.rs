use super::{IrisCode, IrisError};

/// Fewest jointly valid bits for a shift to count.
pub const MIN_COMPARABLE_BITS: usize = 64;

/// Fractional Hamming distance over jointly valid bits, minimized over
/// circular shifts of `b` by up to `max_shift` columns within every segment
/// row.
pub fn hamming_distance(a: &IrisCode, b: &IrisCode, max_shift: usize) -> Result<f64, IrisError> {
    if a.scheme != b.scheme {
        return Err(IrisError::SchemeMismatch(a.scheme, b.scheme));
    }
    if a.len() != b.len() || a.segments != b.segments {
        return Err(IrisError::BadLength { scheme: b.scheme, length: b.len() });
    }
    let shift = max_shift as isize;
    let mut best: Option<f64> = None;
    for s in -shift..=shift {
        let (mut differ, mut joint) = (0usize, 0usize);
        let mut offset = 0;
        for seg in &a.segments {
            let cols = seg.cols as isize;
            for r in 0..seg.rows {
                let row = offset + r * seg.cols;
                for c in 0..seg.cols {
                    let i = row + c;
                    let k = row + (c as isize - s).rem_euclid(cols) as usize;
                    if a.mask[i] && b.mask[k] {
                        joint += 1;
                        differ += usize::from(a.bits[i] != b.bits[k]);
                    }
                }
            }
            offset += seg.rows * seg.cols;
        }
        if joint >= MIN_COMPARABLE_BITS {
            let d = differ as f64 / joint as f64;
            best = Some(best.map_or(d, |b: f64| b.min(d)));
        }
    }
    best.ok_or(IrisError::IncomparableCodes(MIN_COMPARABLE_BITS))
}
