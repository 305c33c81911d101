use super::{BinaryImage, ImagingError, Raster};

/// Marks pixels strictly brighter than the mean of the surrounding
/// `window x window` neighborhood (replicated edges).
///
/// Differences within `1e-9` of the image's dynamic range count as ties and
/// map to `false`, so flat regions never flicker on summation round-off.
pub fn adaptive_threshold<R: Raster>(img: &R, window: usize) -> Result<BinaryImage, ImagingError> {
    if window < 3 || window.is_multiple_of(2) {
        return Err(ImagingError::EvenWindow(window));
    }
    let (w, h) = (img.width(), img.height());
    let half = (window / 2) as isize;
    let n = (window * window) as f64;

    let mut rows = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            rows[y * w + x] = (-half..=half).map(|d| img.clamped(x as isize + d, y as isize)).sum();
        }
    }

    let (lo, hi) = img
        .data()
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let tol = 1e-9 * (hi - lo).max(f64::MIN_POSITIVE);

    let bits = (0..h)
        .flat_map(|y| (0..w).map(move |x| (x, y)))
        .map(|(x, y)| {
            let sum: f64 = (-half..=half)
                .map(|d| rows[(y as isize + d).clamp(0, h as isize - 1) as usize * w + x])
                .sum();
            img.at(x, y) - sum / n > tol
        })
        .collect();
    BinaryImage::new(w, h, bits)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::RealImage;
    use proptest::prelude::*;

    /// Local mean computed directly from the definition.
    fn oracle(img: &RealImage, window: usize) -> Vec<bool> {
        let half = (window / 2) as isize;
        let mut out = Vec::new();
        for y in 0..img.height as isize {
            for x in 0..img.width as isize {
                let mut s = 0.0;
                for dy in -half..=half {
                    for dx in -half..=half {
                        s += img.clamped(x + dx, y + dy);
                    }
                }
                out.push(img.clamped(x, y) > s / (window * window) as f64 + 1e-12);
            }
        }
        out
    }

    #[test]
    fn even_window_rejected() {
        let img = RealImage::zeros(8, 8);
        assert_eq!(adaptive_threshold(&img, 4), Err(ImagingError::EvenWindow(4)));
        assert_eq!(adaptive_threshold(&img, 1), Err(ImagingError::EvenWindow(1)));
    }

    #[test]
    fn constant_image_is_all_background() {
        let img = RealImage::from_fn(16, 16, |_, _| 0.3);
        assert_eq!(adaptive_threshold(&img, 9).unwrap().count(), 0);
    }

    #[test]
    fn square_wave_selects_bright_half() {
        let img = RealImage::from_fn(32, 8, |x, _| if x % 8 < 4 { 1.0 } else { 0.0 });
        let out = adaptive_threshold(&img, 9).unwrap();
        let expected = oracle(&img, 9);
        assert_eq!(out.bits(), &expected[..]);
        for y in 0..8 {
            for x in 1..31 {
                assert_eq!(out.get(x, y), x % 8 < 4, "x={x}");
            }
        }
    }

    #[test]
    fn checkerboard_matches_local_mean() {
        let img = RealImage::from_fn(12, 12, |x, y| ((x + y) % 2) as f64);
        let out = adaptive_threshold(&img, 3).unwrap();
        assert_eq!(out.bits(), &oracle(&img, 3)[..]);
        // White cells sit above a 5/9 local mean; black cells sit below 4/9.
        for y in 1..11 {
            for x in 1..11 {
                assert_eq!(out.get(x, y), (x + y) % 2 == 1);
            }
        }
    }

    proptest! {
        #[test]
        fn affine_invariance(
            vals in prop::collection::vec(0.0f64..1.0, 20 * 14),
            a in 0.1f64..5.0, b in -2.0f64..2.0
        ) {
            let img = RealImage { width: 20, height: 14, data: vals };
            let scaled = img.map(|v| a * v + b);
            prop_assert_eq!(adaptive_threshold(&img, 5).unwrap(), adaptive_threshold(&scaled, 5).unwrap());
        }
    }
}
