use std::collections::HashMap;
use std::f64::consts::PI;

use crate::imaging::{adaptive_threshold, BinaryImage, FloatField, GrayImage, Kernel, Raster, RealImage};

pub const GABOR_SIGMA: f64 = 4.0;
/// Kernel half-size, `2σ`: kernels are 17x17.
pub const GABOR_HALF: usize = 8;

/// Even-symmetric Gabor kernel for ridges running along `theta` at
/// frequency `freq`, with its mean removed so flat regions respond with 0.
pub fn gabor_kernel(theta: f64, freq: f64) -> Kernel {
    let n = 2 * GABOR_HALF + 1;
    let half = GABOR_HALF as f64;
    let (s, c) = theta.sin_cos();
    let mut vals = Vec::with_capacity(n * n);
    for ky in 0..n {
        for kx in 0..n {
            let (x, y) = (kx as f64 - half, ky as f64 - half);
            let across = -x * s + y * c;
            let envelope = (-(x * x + y * y) / (2.0 * GABOR_SIGMA * GABOR_SIGMA)).exp();
            vals.push(envelope * (2.0 * PI * freq * across).cos());
        }
    }
    let mean = vals.iter().sum::<f64>() / vals.len() as f64;
    for v in &mut vals {
        *v -= mean;
    }
    Kernel::new(n, n, vals).expect("gabor kernel is odd-sized")
}

/// Filters every pixel with the kernel tuned to its block's orientation and
/// frequency. Returns the raw response.
pub fn gabor_enhance(img: &GrayImage, orientation: &FloatField, frequency: &FloatField) -> RealImage {
    let (w, h) = (img.width(), img.height());
    let mut cache: HashMap<(u64, u64), Kernel> = HashMap::new();
    let n = 2 * GABOR_HALF + 1;
    let half = GABOR_HALF as isize;
    let mut out = RealImage::zeros(w, h);
    for y in 0..h {
        for x in 0..w {
            let theta = orientation.at_pixel(x, y);
            let freq = frequency.at_pixel(x, y);
            let kernel = cache
                .entry((theta.to_bits(), freq.to_bits()))
                .or_insert_with(|| gabor_kernel(theta, freq));
            let kv = kernel.data();
            let mut acc = 0.0;
            for ky in 0..n {
                let sy = y as isize + ky as isize - half;
                for kx in 0..n {
                    acc += kv[ky * n + kx] * img.clamped(x as isize + kx as isize - half, sy);
                }
            }
            out.data[y * w + x] = acc;
        }
    }
    out
}

/// Ridge map from the enhanced image. Ridges are dark, so the response is
/// negated before thresholding; pixels outside the mask are cleared.
pub fn binarize(enhanced: &RealImage, mask: &BinaryImage, window: usize) -> BinaryImage {
    let inverted = enhanced.map(|v| -v);
    adaptive_threshold(&inverted, window).expect("binarization window is odd").and(mask)
}
