use super::{ImagingError, Raster, RealImage};

/// Dense correlation kernel with odd side lengths, centered at
/// `(width / 2, height / 2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl Kernel {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImagingError> {
        if width.is_multiple_of(2) || height.is_multiple_of(2) {
            return Err(ImagingError::EvenKernel { width, height });
        }
        if data.len() != width * height {
            return Err(ImagingError::SizeMismatch { width, height, len: data.len() });
        }
        Ok(Self { width, height, data })
    }

    pub fn from_rows(rows: &[&[f64]]) -> Result<Self, ImagingError> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        Self::new(width, height, rows.iter().flat_map(|r| r.iter().copied()).collect())
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn sum(&self) -> f64 {
        self.data.iter().sum()
    }
}

/// Replicated-edge correlation; the output has the input's size.
pub fn convolve<R: Raster>(img: &R, kernel: &Kernel) -> RealImage {
    let (w, h) = (img.width(), img.height());
    let (kw, kh) = (kernel.width as isize, kernel.height as isize);
    let (rx, ry) = (kw / 2, kh / 2);
    let mut out = RealImage::zeros(w, h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let mut acc = 0.0;
            for ky in 0..kh {
                let row = &kernel.data[(ky * kw) as usize..((ky + 1) * kw) as usize];
                for (kx, &k) in row.iter().enumerate() {
                    acc += k * img.clamped(x + kx as isize - rx, y + ky - ry);
                }
            }
            out.data[y as usize * w + x as usize] = acc;
        }
    }
    out
}

/// 3x3 Sobel gradients (x rightward, y downward) with replicated borders.
pub fn gradients<R: Raster>(img: &R) -> (RealImage, RealImage) {
    let (w, h) = (img.width(), img.height());
    let mut gx = RealImage::zeros(w, h);
    let mut gy = RealImage::zeros(w, h);
    for y in 0..h as isize {
        for x in 0..w as isize {
            let p = |dx: isize, dy: isize| img.clamped(x + dx, y + dy);
            let i = y as usize * w + x as usize;
            gx.data[i] = (p(1, -1) + 2.0 * p(1, 0) + p(1, 1)) - (p(-1, -1) + 2.0 * p(-1, 0) + p(-1, 1));
            gy.data[i] = (p(-1, 1) + 2.0 * p(0, 1) + p(1, 1)) - (p(-1, -1) + 2.0 * p(0, -1) + p(1, -1));
        }
    }
    (gx, gy)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::imaging::GrayImage;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    /// Straightforward four-loop correlation used as the reference.
    fn naive(input: &[f64], w: usize, h: usize, k: &[f64], kw: usize, kh: usize) -> Vec<f64> {
        let mut out = vec![0.0; w * h];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for j in 0..kh {
                    for i in 0..kw {
                        let sx = (x as isize + i as isize - (kw / 2) as isize).clamp(0, w as isize - 1) as usize;
                        let sy = (y as isize + j as isize - (kh / 2) as isize).clamp(0, h as isize - 1) as usize;
                        acc += k[j * kw + i] * input[sy * w + sx];
                    }
                }
                out[y * w + x] = acc;
            }
        }
        out
    }

    #[test]
    fn even_kernel_rejected() {
        assert_eq!(
            Kernel::new(2, 3, vec![0.0; 6]),
            Err(ImagingError::EvenKernel { width: 2, height: 3 })
        );
    }

    #[test]
    fn identity_kernel() {
        let img = RealImage::from_fn(12, 9, |x, y| (x * 7 + y * 3) as f64 * 0.01);
        let k = Kernel::new(1, 1, vec![1.0]).unwrap();
        assert_eq!(convolve(&img, &k), img);
    }

    #[test]
    fn constant_image_scales_by_kernel_sum() {
        let img = RealImage::from_fn(10, 10, |_, _| 0.25);
        let k = Kernel::new(3, 3, vec![0.5, 1.0, 0.5, 0.0, 2.0, 0.0, 0.25, 0.25, 0.5]).unwrap();
        for v in convolve(&img, &k).data {
            assert!((v - 0.25 * k.sum()).abs() < 1e-12);
        }
    }

    #[test]
    fn constant_image_has_zero_gradient() {
        let img = GrayImage::from_fn(16, 16, |_, _| 0.4).unwrap();
        let (gx, gy) = gradients(&img);
        assert!(gx.data.iter().chain(&gy.data).all(|&v| v == 0.0));
    }

    #[test]
    fn ramp_gradient_points_right() {
        let img = GrayImage::from_fn(16, 16, |x, _| x as f64 / 16.0).unwrap();
        let (gx, gy) = gradients(&img);
        for y in 1..15 {
            for x in 1..15 {
                assert!(gx.at(x, y) > 0.0);
                assert_eq!(gy.at(x, y), 0.0);
            }
        }
    }

    #[test]
    fn sobel_matches_direct_convolution_on_cosine() {
        let (w, h) = (32, 16);
        let img = GrayImage::from_fn(w, h, |x, _| 0.5 + 0.5 * (2.0 * PI * x as f64 / 8.0).cos()).unwrap();
        let sobel_x = [-1.0, 0.0, 1.0, -2.0, 0.0, 2.0, -1.0, 0.0, 1.0];
        let expected = naive(img.data(), w, h, &sobel_x, 3, 3);
        let (gx, _) = gradients(&img);
        for (a, b) in gx.data.iter().zip(&expected) {
            assert!((a - b).abs() < 1e-6);
        }
        // Interior response equals 4 * (f(x+1) - f(x-1)) = -4 sin(w) sin(w x).
        let omega = 2.0 * PI / 8.0;
        for x in 1..w - 1 {
            let analytic = -4.0 * omega.sin() * (omega * x as f64).sin();
            assert!((gx.at(x, 5) - analytic).abs() < 1e-9);
        }
    }

    proptest! {
        #[test]
        fn matches_naive_oracle(
            w in 1usize..=32, h in 1usize..=32,
            kw in prop::sample::select(vec![1usize, 3, 5]), kh in prop::sample::select(vec![1usize, 3, 5]),
            seed in any::<u64>()
        ) {
            let mut s = seed | 1;
            let mut next = || { s ^= s << 13; s ^= s >> 7; s ^= s << 17; (s >> 11) as f64 / (1u64 << 53) as f64 };
            let input: Vec<f64> = (0..w * h).map(|_| next()).collect();
            let kdata: Vec<f64> = (0..kw * kh).map(|_| next() - 0.5).collect();
            let img = RealImage { width: w, height: h, data: input.clone() };
            let k = Kernel::new(kw, kh, kdata.clone()).unwrap();
            prop_assert_eq!(convolve(&img, &k).data, naive(&input, w, h, &kdata, kw, kh));
        }
    }
}
