use std::f64::consts::PI;

use super::{IrisGeometry, NormalizedStrip};
use crate::imaging::{GrayImage, Raster};

/// Rubber-sheet unwrap of the annulus between the pupil and iris circles.
/// Row `i` samples radius `pupil_r + (i + 0.5) / radial * (iris_r - pupil_r)`.
pub fn normalize(img: &GrayImage, geom: &IrisGeometry, radial: usize, angular: usize) -> NormalizedStrip {
    let band = geom.iris_r - geom.pupil_r;
    let trig: Vec<(f64, f64)> = (0..angular)
        .map(|j| {
            let t = 2.0 * PI * j as f64 / angular as f64;
            (t.cos(), t.sin())
        })
        .collect();
    NormalizedStrip::from_fn(radial, angular, |i, j| {
        let r = geom.pupil_r + (i as f64 + 0.5) / radial as f64 * band;
        let (c, s) = trig[j];
        img.bilinear(geom.pupil_cx + r * c, geom.pupil_cy - r * s).clamp(0.0, 1.0)
    })
}
