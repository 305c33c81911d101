use std::f64::consts::PI;

use super::FingerprintError;
use crate::imaging::{gradients, FieldKind, FloatField, GrayImage, Raster};

pub(crate) fn check_block(block: usize) -> Result<(), FingerprintError> {
    if block < 8 || !block.is_multiple_of(2) {
        return Err(FingerprintError::BlockTooSmall(block));
    }
    Ok(())
}

/// Number of blocks needed to cover `len` pixels; the last block may be partial.
pub(crate) fn blocks(len: usize, block: usize) -> usize {
    len.div_ceil(block)
}

/// Block ridge orientation in `[0, π)` from least-squares gradient
/// directions, smoothed as doubled-angle vectors over 3x3 blocks.
/// Blocks without gradient energy get orientation 0.
pub fn estimate_orientation(img: &GrayImage, block: usize) -> Result<FloatField, FingerprintError> {
    check_block(block)?;
    let (w, h) = (img.width(), img.height());
    let (bw, bh) = (blocks(w, block), blocks(h, block));
    let (gx, gy) = gradients(img);

    let mut vx = vec![0.0; bw * bh];
    let mut vy = vec![0.0; bw * bh];
    for y in 0..h {
        for x in 0..w {
            let i = y * w + x;
            let b = (y / block) * bw + x / block;
            let (gx, gy) = (gx.data[i], gy.data[i]);
            vx[b] += gx * gx - gy * gy;
            vy[b] += 2.0 * gx * gy;
        }
    }

    let mut values = Vec::with_capacity(bw * bh);
    for by in 0..bh {
        for bx in 0..bw {
            let (mut sx, mut sy) = (0.0, 0.0);
            for ny in by.saturating_sub(1)..(by + 2).min(bh) {
                for nx in bx.saturating_sub(1)..(bx + 2).min(bw) {
                    sx += vx[ny * bw + nx];
                    sy += vy[ny * bw + nx];
                }
            }
            let theta = if sx.hypot(sy) <= 1e-12 {
                0.0
            } else {
                let phi = 0.5 * sy.atan2(sx);
                (phi + PI / 2.0).rem_euclid(PI)
            };
            values.push(if theta >= PI { 0.0 } else { theta });
        }
    }
    Ok(FloatField::new(bw, bh, block, FieldKind::Orientation, values))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fingerprint::axial_diff;

    fn rotated_ridges(size: usize, period: f64, angle: f64) -> GrayImage {
        GrayImage::from_fn(size, size, |x, y| {
            let t = x as f64 * angle.cos() + y as f64 * angle.sin();
            0.5 + 0.5 * (2.0 * PI * t / period).cos()
        })
        .unwrap()
    }

    #[test]
    fn vertical_ridges() {
        let field = estimate_orientation(&rotated_ridges(96, 8.0, 0.0), 16).unwrap();
        for by in 1..field.height - 1 {
            for bx in 1..field.width - 1 {
                assert!((field.get(bx, by) - PI / 2.0).abs() <= 0.05);
            }
        }
    }

    #[test]
    fn rotated_by_30_degrees() {
        let a = 30f64.to_radians();
        let field = estimate_orientation(&rotated_ridges(128, 8.0, a), 16).unwrap();
        let target = (PI / 2.0 + a).rem_euclid(PI);
        for by in 1..field.height - 1 {
            for bx in 1..field.width - 1 {
                let got = field.get(bx, by);
                assert!(axial_diff(got, target) <= 0.07, "block ({bx},{by}): {got} vs {target}");
            }
        }
    }

    #[test]
    fn constant_image_is_zero() {
        let img = GrayImage::from_fn(64, 64, |_, _| 0.7).unwrap();
        let field = estimate_orientation(&img, 16).unwrap();
        assert!(field.values.iter().all(|&t| t == 0.0));
    }

    #[test]
    fn odd_or_tiny_block_rejected() {
        let img = GrayImage::from_fn(64, 64, |_, _| 0.7).unwrap();
        assert_eq!(estimate_orientation(&img, 6), Err(FingerprintError::BlockTooSmall(6)));
        assert_eq!(estimate_orientation(&img, 15), Err(FingerprintError::BlockTooSmall(15)));
    }
}
