//! Raster primitives shared by the fingerprint and iris pipelines.
//!
//! All images are row-major. Intensities are `f64` in `[0, 1]`; 8-bit values
//! only appear at the PGM boundary.

mod components;
mod filter;
mod morph;
mod pgm;
mod thin;
mod threshold;

pub use components::{fill_holes, label_components, Components};
pub use filter::{convolve, gradients, Kernel};
pub use morph::{dilate, erode, morph_close_open};
pub use pgm::{decode_pgm, encode_pgm};
pub use thin::{neighbors8, thin};
pub use threshold::adaptive_threshold;

use thiserror::Error;

/// Smallest accepted side length of a [`GrayImage`].
pub const MIN_SIDE: usize = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ImagingError {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported PGM maxval {0} (only 255 is accepted)")]
    UnsupportedMaxval(u32),
    #[error("truncated PGM payload: expected {expected} bytes, found {found}")]
    TruncatedData { expected: usize, found: usize },
    #[error("image {width}x{height} is smaller than the {MIN_SIDE}x{MIN_SIDE} minimum")]
    TooSmall { width: usize, height: usize },
    #[error("pixel buffer length {len} does not match {width}x{height}")]
    SizeMismatch { width: usize, height: usize, len: usize },
    #[error("pixel value {value} at index {index} is outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },
    #[error("kernel dimensions {width}x{height} must both be odd")]
    EvenKernel { width: usize, height: usize },
    #[error("threshold window {0} must be odd and at least 3")]
    EvenWindow(usize),
}

/// Read access shared by every real-valued raster.
pub trait Raster {
    fn width(&self) -> usize;
    fn height(&self) -> usize;
    fn data(&self) -> &[f64];

    fn at(&self, x: usize, y: usize) -> f64 {
        self.data()[y * self.width() + x]
    }

    /// Sample with replicated edges.
    fn clamped(&self, x: isize, y: isize) -> f64 {
        let cx = x.clamp(0, self.width() as isize - 1) as usize;
        let cy = y.clamp(0, self.height() as isize - 1) as usize;
        self.at(cx, cy)
    }

    /// Bilinear interpolation with replicated edges.
    fn bilinear(&self, x: f64, y: f64) -> f64 {
        let x0 = x.floor();
        let y0 = y.floor();
        let fx = x - x0;
        let fy = y - y0;
        let (ix, iy) = (x0 as isize, y0 as isize);
        let top = self.clamped(ix, iy) * (1.0 - fx) + self.clamped(ix + 1, iy) * fx;
        let bottom = self.clamped(ix, iy + 1) * (1.0 - fx) + self.clamped(ix + 1, iy + 1) * fx;
        top * (1.0 - fy) + bottom * fy
    }
}

/// Grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    data: Vec<f64>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, data: Vec<f64>) -> Result<Self, ImagingError> {
        if width < MIN_SIDE || height < MIN_SIDE {
            return Err(ImagingError::TooSmall { width, height });
        }
        if data.len() != width * height {
            return Err(ImagingError::SizeMismatch { width, height, len: data.len() });
        }
        if let Some((index, &value)) =
            data.iter().enumerate().find(|(_, v)| !v.is_finite() || **v < 0.0 || **v > 1.0)
        {
            return Err(ImagingError::OutOfRange { index, value });
        }
        Ok(Self { width, height, data })
    }

    /// Builds an image from a per-pixel function, clamping results into `[0, 1]`.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> f64,
    ) -> Result<Self, ImagingError> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                let v = f(x, y);
                data.push(if v.is_nan() { 0.0 } else { v.clamp(0.0, 1.0) });
            }
        }
        Self::new(width, height, data)
    }

    /// Normalizes an arbitrary real raster into `[0, 1]` by min/max stretch.
    /// A flat raster maps to 0.5.
    pub fn from_real_stretched(real: &RealImage) -> Result<Self, ImagingError> {
        let (lo, hi) = real
            .data
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        let span = hi - lo;
        let data = real
            .data
            .iter()
            .map(|&v| if span > 0.0 { (v - lo) / span } else { 0.5 })
            .collect();
        Self::new(real.width, real.height, data)
    }

    pub fn to_real(&self) -> RealImage {
        RealImage { width: self.width, height: self.height, data: self.data.clone() }
    }

    /// Pixelwise product with a mask (false pixels become 0).
    pub fn masked(&self, mask: &BinaryImage) -> GrayImage {
        let data = self
            .data
            .iter()
            .zip(mask.bits())
            .map(|(&v, &keep)| if keep { v } else { 0.0 })
            .collect();
        GrayImage { width: self.width, height: self.height, data }
    }
}

impl Raster for GrayImage {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Unbounded real-valued raster (filter responses, gradients).
#[derive(Debug, Clone, PartialEq)]
pub struct RealImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<f64>,
}

impl RealImage {
    pub fn zeros(width: usize, height: usize) -> Self {
        Self { width, height, data: vec![0.0; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y));
            }
        }
        Self { width, height, data }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self { width: self.width, height: self.height, data: self.data.iter().map(|&v| f(v)).collect() }
    }
}

impl Raster for RealImage {
    fn width(&self) -> usize {
        self.width
    }
    fn height(&self) -> usize {
        self.height
    }
    fn data(&self) -> &[f64] {
        &self.data
    }
}

/// Boolean raster: masks, binarized ridges, skeletons.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryImage {
    width: usize,
    height: usize,
    bits: Vec<bool>,
}

impl BinaryImage {
    pub fn new(width: usize, height: usize, bits: Vec<bool>) -> Result<Self, ImagingError> {
        if bits.len() != width * height {
            return Err(ImagingError::SizeMismatch { width, height, len: bits.len() });
        }
        Ok(Self { width, height, bits })
    }

    pub fn filled(width: usize, height: usize, value: bool) -> Self {
        Self { width, height, bits: vec![value; width * height] }
    }

    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> bool) -> Self {
        let mut bits = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                bits.push(f(x, y));
            }
        }
        Self { width, height, bits }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.width + x]
    }

    /// Out-of-bounds reads are `false`.
    pub fn get_or_false(&self, x: isize, y: isize) -> bool {
        if x < 0 || y < 0 || x >= self.width as isize || y >= self.height as isize {
            false
        } else {
            self.bits[y as usize * self.width + x as usize]
        }
    }

    pub fn set(&mut self, x: usize, y: usize, value: bool) {
        self.bits[y * self.width + x] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn and(&self, other: &BinaryImage) -> BinaryImage {
        let bits = self.bits.iter().zip(&other.bits).map(|(&a, &b)| a && b).collect();
        BinaryImage { width: self.width, height: self.height, bits }
    }

    pub fn not(&self) -> BinaryImage {
        BinaryImage { width: self.width, height: self.height, bits: self.bits.iter().map(|b| !b).collect() }
    }

    /// True when every set pixel of `self` is also set in `other`.
    pub fn is_subset_of(&self, other: &BinaryImage) -> bool {
        self.bits.iter().zip(&other.bits).all(|(&a, &b)| !a || b)
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let w = self.width;
        self.bits.iter().enumerate().filter(|(_, &b)| b).map(move |(i, _)| (i % w, i / w))
    }

    /// White (1.0) for set pixels, black otherwise.
    pub fn to_gray(&self) -> RealImage {
        RealImage {
            width: self.width,
            height: self.height,
            data: self.bits.iter().map(|&b| if b { 1.0 } else { 0.0 }).collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Orientation,
    Frequency,
    Coherence,
}

/// Grid of per-cell values. `cell` is the side in pixels covered by one value
/// (1 for per-pixel fields, the block size for block-wise fields).
#[derive(Debug, Clone, PartialEq)]
pub struct FloatField {
    pub width: usize,
    pub height: usize,
    pub cell: usize,
    pub kind: FieldKind,
    pub values: Vec<f64>,
}

impl FloatField {
    pub fn new(width: usize, height: usize, cell: usize, kind: FieldKind, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), width * height);
        Self { width, height, cell, kind, values }
    }

    pub fn get(&self, cx: usize, cy: usize) -> f64 {
        self.values[cy * self.width + cx]
    }

    /// Value of the cell containing pixel `(x, y)`.
    pub fn at_pixel(&self, x: usize, y: usize) -> f64 {
        let cx = (x / self.cell).min(self.width - 1);
        let cy = (y / self.cell).min(self.height - 1);
        self.get(cx, cy)
    }

    pub fn mean(&self) -> f64 {
        if self.values.is_empty() {
            return 0.0;
        }
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }
}
