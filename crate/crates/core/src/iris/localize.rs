use std::f64::consts::PI;

use super::IrisError;
use crate::imaging::{label_components, BinaryImage, GrayImage, Raster};

/// Pixels darker than this belong to the pupil candidate mask.
pub const PUPIL_THRESHOLD: f64 = 0.25;
pub const MIN_PUPIL_AREA: usize = 16;
const PERIMETER_SAMPLES: usize = 256;

/// Returns `(cx, cy, r)`: the centroid of the largest dark component and the
/// distance from it to the nearest pixel outside that component.
pub fn locate_pupil(img: &GrayImage) -> Result<(f64, f64, f64), IrisError> {
    let (w, h) = (img.width(), img.height());
    let dark = BinaryImage::from_fn(w, h, |x, y| img.at(x, y) < PUPIL_THRESHOLD);
    let comps = label_components(&dark);
    let label = comps.largest().ok_or(IrisError::NoPupilFound)?;
    if comps.sizes[label as usize - 1] < MIN_PUPIL_AREA {
        return Err(IrisError::NoPupilFound);
    }

    let (mut sx, mut sy, mut n) = (0.0, 0.0, 0usize);
    let (mut x0, mut y0, mut x1, mut y1) = (w, h, 0, 0);
    for y in 0..h {
        for x in 0..w {
            if comps.label_at(x, y) == label {
                sx += x as f64;
                sy += y as f64;
                n += 1;
                (x0, y0, x1, y1) = (x0.min(x), y0.min(y), x1.max(x), y1.max(y));
            }
        }
    }
    let (cx, cy) = (sx / n as f64, sy / n as f64);

    // The nearest outside pixel lies within the bounding box grown by one;
    // stepping past the image edge counts as outside too.
    let mut best = f64::INFINITY;
    for y in y0 as isize - 1..=y1 as isize + 1 {
        for x in x0 as isize - 1..=x1 as isize + 1 {
            let inside = x >= 0 && y >= 0 && (x as usize) < w && (y as usize) < h
                && comps.label_at(x as usize, y as usize) == label;
            if !inside {
                best = best.min((x as f64 - cx).hypot(y as f64 - cy));
            }
        }
    }
    Ok((cx, cy, best))
}

/// Mean intensity over a circle, bilinear at evenly spaced angles.
pub(crate) fn perimeter_mean(img: &GrayImage, cx: f64, cy: f64, r: f64) -> f64 {
    (0..PERIMETER_SAMPLES)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / PERIMETER_SAMPLES as f64;
            img.bilinear(cx + r * t.cos(), cy - r * t.sin())
        })
        .sum::<f64>()
        / PERIMETER_SAMPLES as f64
}

/// The integer radius with the largest jump in perimeter mean relative to the
/// circle one pixel inside, searched from `pupil_r + 4` out to the nearest
/// image edge. Ties go to the smaller radius.
pub fn locate_iris_boundary(img: &GrayImage, cx: f64, cy: f64, pupil_r: f64) -> Result<f64, IrisError> {
    let margin = cx.min(cy).min(img.width() as f64 - 1.0 - cx).min(img.height() as f64 - 1.0 - cy);
    let first = pupil_r.round() as i64 + 4;
    let last = margin.floor() as i64;
    if first > last {
        return Err(IrisError::BoundaryNotFound);
    }
    let mut prev = perimeter_mean(img, cx, cy, (first - 1) as f64);
    let (mut best_r, mut best) = (first, f64::NEG_INFINITY);
    for r in first..=last {
        let s = perimeter_mean(img, cx, cy, r as f64);
        let change = (s - prev).abs();
        if change > best {
            (best_r, best) = (r, change);
        }
        prev = s;
    }
    Ok(best_r as f64)
}
