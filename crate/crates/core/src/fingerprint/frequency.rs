use super::orientation::check_block;
use super::FingerprintError;
use crate::imaging::{FieldKind, FloatField, GrayImage, Raster};

pub const MIN_FREQUENCY: f64 = 1.0 / 25.0;
pub const MAX_FREQUENCY: f64 = 1.0 / 3.0;
/// Used wherever no block in the neighborhood yields a reliable estimate.
pub const DEFAULT_FREQUENCY: f64 = 1.0 / 9.0;

const SIGNATURE_LEN: usize = 32;
const SIGNATURE_DEPTH: usize = 16;
/// Reliable neighbors needed before a block can be judged an outlier.
const OUTLIER_QUORUM: usize = 3;
/// Relative deviation from the neighbor median that marks an outlier.
const OUTLIER_TOLERANCE: f64 = 0.25;

/// Intensity profile across the ridges through a block center: each sample
/// averages `SIGNATURE_DEPTH` points taken along the ridge direction.
fn signature(img: &GrayImage, cx: f64, cy: f64, theta: f64) -> Vec<f64> {
    let (dx, dy) = (theta.cos(), theta.sin());
    let (nx, ny) = (-dy, dx);
    (0..SIGNATURE_LEN)
        .map(|k| {
            let s = k as f64 - SIGNATURE_LEN as f64 / 2.0 + 0.5;
            let total: f64 = (0..SIGNATURE_DEPTH)
                .map(|t| {
                    let t = t as f64 - SIGNATURE_DEPTH as f64 / 2.0 + 0.5;
                    img.bilinear(cx + s * nx + t * dx, cy + s * ny + t * dy)
                })
                .sum();
            total / SIGNATURE_DEPTH as f64
        })
        .collect()
}

/// Mean spacing between sub-sample peak positions, if at least two peaks
/// rise above the profile mean.
fn peak_spacing(sig: &[f64]) -> Option<f64> {
    let mean = sig.iter().sum::<f64>() / sig.len() as f64;
    let (lo, hi) = sig.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), &v| (l.min(v), h.max(v)));
    if hi - lo < 1e-6 {
        return None;
    }
    let mut peaks: Vec<(f64, f64)> = Vec::new();
    for k in 1..sig.len() - 1 {
        let (a, b, c) = (sig[k - 1], sig[k], sig[k + 1]);
        if b > a && b >= c && b > mean {
            let denom = a - 2.0 * b + c;
            let offset = if denom.abs() > 1e-12 { 0.5 * (a - c) / denom } else { 0.0 };
            let pos = k as f64 + offset.clamp(-0.5, 0.5);
            match peaks.last_mut() {
                // Ripples on one crest: keep the taller.
                Some(last) if pos - last.0 < 2.0 => {
                    if b > last.1 {
                        *last = (pos, b);
                    }
                }
                _ => peaks.push((pos, b)),
            }
        }
    }
    if peaks.len() < 2 {
        return None;
    }
    Some((peaks[peaks.len() - 1].0 - peaks[0].0) / (peaks.len() - 1) as f64)
}

fn median(vals: &mut [f64]) -> f64 {
    vals.sort_by(f64::total_cmp);
    let n = vals.len();
    if n % 2 == 1 {
        vals[n / 2]
    } else {
        0.5 * (vals[n / 2 - 1] + vals[n / 2])
    }
}

/// Block ridge frequency (cycles per pixel) from x-signatures. Unreliable
/// blocks (no usable peaks, or far off their neighbors) take the median of
/// their reliable 8-neighbors, or the default when none exist; every value
/// is clamped to the valid band.
pub fn estimate_frequency(
    img: &GrayImage,
    orientation: &FloatField,
    block: usize,
) -> Result<FloatField, FingerprintError> {
    check_block(block)?;
    let (bw, bh) = (orientation.width, orientation.height);
    let mut raw: Vec<Option<f64>> = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            let cx = ((bx * block) as f64 + block as f64 / 2.0).min(img.width() as f64 - 1.0);
            let cy = ((by * block) as f64 + block as f64 / 2.0).min(img.height() as f64 - 1.0);
            let sig = signature(img, cx, cy, orientation.get(bx, by));
            let f = peak_spacing(&sig).map(|d| 1.0 / d).filter(|f| (MIN_FREQUENCY..=MAX_FREQUENCY).contains(f));
            raw.push(f);
        }
    }

    let neighbors = |raw: &[Option<f64>], bx: usize, by: usize| -> Vec<f64> {
        (by.saturating_sub(1)..(by + 2).min(bh))
            .flat_map(|ny| (bx.saturating_sub(1)..(bx + 2).min(bw)).map(move |nx| (nx, ny)))
            .filter(|&(nx, ny)| (nx, ny) != (bx, by))
            .filter_map(|(nx, ny)| raw[ny * bw + nx])
            .collect()
    };

    // A missed or doubled peak shows up as an outlier against the
    // neighborhood; such blocks are treated as unreliable.
    let checked: Vec<Option<f64>> = (0..bw * bh)
        .map(|i| {
            let f = raw[i]?;
            let mut near = neighbors(&raw, i % bw, i / bw);
            if near.len() >= OUTLIER_QUORUM {
                let m = median(&mut near);
                if (f - m).abs() > OUTLIER_TOLERANCE * m {
                    return None;
                }
            }
            Some(f)
        })
        .collect();

    let mut values = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            let v = match checked[by * bw + bx] {
                Some(f) => f,
                None => {
                    let mut near = neighbors(&checked, bx, by);
                    if near.is_empty() {
                        DEFAULT_FREQUENCY
                    } else {
                        median(&mut near)
                    }
                }
            };
            values.push(v.clamp(MIN_FREQUENCY, MAX_FREQUENCY));
        }
    }
    Ok(FloatField::new(bw, bh, block, FieldKind::Frequency, values))
}
