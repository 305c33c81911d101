use super::{FingerprintError, SegmentationParams};
use crate::imaging::{gradients, morph_close_open, BinaryImage, FieldKind, FloatField, GrayImage, Raster};

/// Summed-area table with a zero row and column prepended.
pub(crate) struct Integral {
    w: usize,
    sums: Vec<f64>,
}

impl Integral {
    pub(crate) fn new(width: usize, height: usize, values: impl Fn(usize) -> f64) -> Self {
        let w = width + 1;
        let mut sums = vec![0.0; w * (height + 1)];
        for y in 0..height {
            let mut row = 0.0;
            for x in 0..width {
                row += values(y * width + x);
                sums[(y + 1) * w + x + 1] = sums[y * w + x + 1] + row;
            }
        }
        Self { w, sums }
    }

    /// Sum over `[x0, x1) x [y0, y1)`.
    pub(crate) fn rect(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> f64 {
        let w = self.w;
        self.sums[y1 * w + x1] - self.sums[y0 * w + x1] - self.sums[y1 * w + x0] + self.sums[y0 * w + x0]
    }
}

/// Structure-tensor coherence over a `W x W` window centered on each pixel
/// (clipped at the image border).
pub fn coherence_image(img: &GrayImage, params: &SegmentationParams) -> Result<FloatField, FingerprintError> {
    params.validate()?;
    let (w, h) = (img.width(), img.height());
    let win = params.window;
    if w < win || h < win {
        return Err(FingerprintError::ImageTooSmall { width: w, height: h, window: win });
    }
    let (gx, gy) = gradients(img);
    let (gx, gy) = (&gx.data, &gy.data);
    let dxx = Integral::new(w, h, |i| gx[i] * gx[i] - gy[i] * gy[i]);
    let dxy = Integral::new(w, h, |i| 2.0 * gx[i] * gy[i]);
    let energy = Integral::new(w, h, |i| gx[i] * gx[i] + gy[i] * gy[i]);

    let half = win / 2;
    let mut values = Vec::with_capacity(w * h);
    for y in 0..h {
        let (y0, y1) = (y.saturating_sub(half), (y + half).min(h));
        for x in 0..w {
            let (x0, x1) = (x.saturating_sub(half), (x + half).min(w));
            let e = energy.rect(x0, y0, x1, y1);
            let a = dxx.rect(x0, y0, x1, y1);
            let b = dxy.rect(x0, y0, x1, y1);
            // Window sums of exact zeros stay exactly zero; anything below
            // round-off of the table is treated the same way.
            let coh = if e > 1e-12 { (a.hypot(b) / e).clamp(0.0, 1.0) } else { 0.0 };
            values.push(coh);
        }
    }
    Ok(FloatField::new(w, h, 1, FieldKind::Coherence, values))
}

/// Coherence-based foreground mask, cleaned morphologically, and the image
/// multiplied by it.
pub fn segment(img: &GrayImage, params: &SegmentationParams) -> Result<(BinaryImage, GrayImage), FingerprintError> {
    let coh = coherence_image(img, params)?;
    let n = coh.values.len() as f64;
    let mean = coh.mean();
    let std = (coh.values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n).sqrt();
    let cut = mean + params.k * std;
    let raw = BinaryImage::new(img.width(), img.height(), coh.values.iter().map(|&c| c >= cut).collect())
        .expect("coherence field matches image size");
    let mask = morph_close_open(&raw, params.morph_radius);
    let segmented = img.masked(&mask);
    Ok((mask, segmented))
}
