use super::{haar_layout, IrisCode, IrisError, IrisScheme, NormalizedStrip};

/// Detail subbands of one decomposition level, each `rows x cols`.
#[derive(Debug, Clone, PartialEq)]
pub struct Subbands {
    pub rows: usize,
    pub cols: usize,
    /// Radial difference of angular sums.
    pub h: Vec<f64>,
    /// Radial sum of angular differences.
    pub v: Vec<f64>,
    pub d: Vec<f64>,
}

/// Unnormalized Haar decomposition: `levels[k]` holds level `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HaarPyramid {
    pub rows: usize,
    pub cols: usize,
    pub levels: Vec<Subbands>,
    pub approx: Vec<f64>,
}

/// Decomposes a `rows x cols` raster; both sides must be divisible by
/// `2^levels`.
pub fn haar_forward(values: &[f64], rows: usize, cols: usize, levels: usize) -> Result<HaarPyramid, IrisError> {
    let step = 1usize << levels;
    if rows == 0 || cols == 0 || !rows.is_multiple_of(step) || !cols.is_multiple_of(step) || values.len() != rows * cols {
        return Err(IrisError::BadDimensions { radial: rows, angular: cols });
    }
    let mut a = values.to_vec();
    let (mut r, mut c) = (rows, cols);
    let mut out = Vec::with_capacity(levels);
    for _ in 0..levels {
        let (hr, hc) = (r / 2, c / 2);
        let mut lo = vec![0.0; r * hc];
        let mut hi = vec![0.0; r * hc];
        for i in 0..r {
            for j in 0..hc {
                let (p, q) = (a[i * c + 2 * j], a[i * c + 2 * j + 1]);
                lo[i * hc + j] = p + q;
                hi[i * hc + j] = p - q;
            }
        }
        let mut band = Subbands { rows: hr, cols: hc, h: vec![0.0; hr * hc], v: vec![0.0; hr * hc], d: vec![0.0; hr * hc] };
        let mut ll = vec![0.0; hr * hc];
        for i in 0..hr {
            for j in 0..hc {
                let (top, bottom) = ((2 * i) * hc + j, (2 * i + 1) * hc + j);
                ll[i * hc + j] = lo[top] + lo[bottom];
                band.h[i * hc + j] = lo[top] - lo[bottom];
                band.v[i * hc + j] = hi[top] + hi[bottom];
                band.d[i * hc + j] = hi[top] - hi[bottom];
            }
        }
        out.push(band);
        a = ll;
        (r, c) = (hr, hc);
    }
    Ok(HaarPyramid { rows, cols, levels: out, approx: a })
}

pub fn haar_inverse(p: &HaarPyramid) -> Vec<f64> {
    let mut a = p.approx.clone();
    for band in p.levels.iter().rev() {
        let (hr, hc) = (band.rows, band.cols);
        let (r, c) = (2 * hr, 2 * hc);
        let mut lo = vec![0.0; r * hc];
        let mut hi = vec![0.0; r * hc];
        for i in 0..hr {
            for j in 0..hc {
                let k = i * hc + j;
                lo[2 * i * hc + j] = (a[k] + band.h[k]) / 2.0;
                lo[(2 * i + 1) * hc + j] = (a[k] - band.h[k]) / 2.0;
                hi[2 * i * hc + j] = (band.v[k] + band.d[k]) / 2.0;
                hi[(2 * i + 1) * hc + j] = (band.v[k] - band.d[k]) / 2.0;
            }
        }
        let mut next = vec![0.0; r * c];
        for i in 0..r {
            for j in 0..hc {
                let (l, h) = (lo[i * hc + j], hi[i * hc + j]);
                next[i * c + 2 * j] = (l + h) / 2.0;
                next[i * c + 2 * j + 1] = (l - h) / 2.0;
            }
        }
        a = next;
    }
    a
}

/// `true` where any cell of the `2^level`-square support is invalid.
fn pooled_invalid(strip: &NormalizedStrip, level: usize) -> Vec<bool> {
    let step = 1 << level;
    let (r, c) = (strip.radial / step, strip.angular / step);
    let mut out = vec![false; r * c];
    for i in 0..strip.radial {
        for j in 0..strip.angular {
            if !strip.is_valid(i, j) {
                out[(i / step) * c + j / step] = true;
            }
        }
    }
    out
}

/// Sign bits of the level-4 and level-5 details plus the level-5
/// approximation. Zero maps to 0.
pub fn haar_code(strip: &NormalizedStrip) -> Result<IrisCode, IrisError> {
    let p = haar_forward(&strip.values, strip.radial, strip.angular, 5)?;
    let (l4, l5) = (&p.levels[3], &p.levels[4]);
    let (inv4, inv5) = (pooled_invalid(strip, 4), pooled_invalid(strip, 5));

    let mut bits = Vec::new();
    let mut mask = Vec::new();
    for (band, inv) in [(&l4.h, &inv4), (&l4.v, &inv4), (&l4.d, &inv4), (&l5.h, &inv5), (&l5.v, &inv5), (&l5.d, &inv5), (&p.approx, &inv5)] {
        bits.extend(band.iter().map(|&v| v > 0.0));
        mask.extend(inv.iter().map(|&bad| !bad));
    }
    Ok(IrisCode { scheme: IrisScheme::Haar, bits, mask, segments: haar_layout(strip.radial, strip.angular) })
}
