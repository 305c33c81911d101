//! Fingerprint pipeline: segmentation, enhancement, minutiae extraction and
//! filtering, Hough registration and minutiae matching.
//!
//! Angles: ridge orientation fields live in `[0, π)` measured from +x with
//! y pointing down; minutia directions are lifted to `[0, 2π)`.

mod false_minutiae;
mod frequency;
mod gabor;
mod matching;
mod minutiae;
mod orientation;
mod pipeline;
mod segment;
mod template;
mod trace;

pub use false_minutiae::filter_false_minutiae;
pub use frequency::{estimate_frequency, DEFAULT_FREQUENCY, MAX_FREQUENCY, MIN_FREQUENCY};
pub use gabor::{binarize, gabor_enhance, gabor_kernel, GABOR_HALF, GABOR_SIGMA};
pub use matching::{match_minutiae, register_minutiae};
pub use minutiae::{crossing_number, extract_minutiae};
pub use orientation::estimate_orientation;
pub use pipeline::{extract_template, FingerprintParams, FingerprintStages};
pub use segment::{coherence_image, segment};
pub use template::{decode_template, encode_template};

use std::f64::consts::PI;

use thiserror::Error;

/// Upper bound on minutiae kept per template.
pub const MAX_MINUTIAE: usize = 256;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FingerprintError {
    #[error("image {width}x{height} is smaller than the {window}-pixel coherence window")]
    ImageTooSmall { width: usize, height: usize, window: usize },
    #[error("block size {0} must be even and at least 8")]
    BlockTooSmall(usize),
    #[error("invalid segmentation parameters: {0}")]
    BadParams(String),
    #[error("registration needs two non-empty minutiae sets")]
    EmptyTemplate,
    #[error("template does not start with FPT1")]
    BadMagic,
    #[error("template truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("template record {index} is invalid: {reason}")]
    BadRecord { index: usize, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentationParams {
    /// Side of the coherence window.
    pub window: usize,
    /// Mask threshold offset in units of the coherence standard deviation.
    pub k: f64,
    pub morph_radius: usize,
}

impl Default for SegmentationParams {
    fn default() -> Self {
        Self { window: 16, k: 0.0, morph_radius: 2 }
    }
}

impl SegmentationParams {
    pub fn validate(&self) -> Result<(), FingerprintError> {
        if self.window < 8 || !self.window.is_multiple_of(2) {
            return Err(FingerprintError::BadParams(format!(
                "window {} must be even and at least 8",
                self.window
            )));
        }
        if self.morph_radius < 1 {
            return Err(FingerprintError::BadParams("morph_radius must be at least 1".into()));
        }
        if !self.k.is_finite() {
            return Err(FingerprintError::BadParams("k must be finite".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MinutiaKind {
    Ending,
    Bifurcation,
}

impl MinutiaKind {
    pub fn code(self) -> u8 {
        match self {
            MinutiaKind::Ending => 0,
            MinutiaKind::Bifurcation => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(MinutiaKind::Ending),
            1 => Some(MinutiaKind::Bifurcation),
            _ => None,
        }
    }
}

/// Single-precision fields so that templates survive the on-disk format
/// bit-for-bit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Minutia {
    pub x: f32,
    pub y: f32,
    /// Ridge direction in `[0, 2π)`.
    pub theta: f32,
    pub kind: MinutiaKind,
}

impl Minutia {
    pub fn new(x: f64, y: f64, theta: f64, kind: MinutiaKind) -> Self {
        Self { x: x as f32, y: y as f32, theta: wrap_2pi(theta) as f32, kind }
    }

    pub fn distance(&self, other: &Minutia) -> f64 {
        (f64::from(self.x) - f64::from(other.x)).hypot(f64::from(self.y) - f64::from(other.y))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FingerprintTemplate {
    pub minutiae: Vec<Minutia>,
    pub image_width: usize,
    pub image_height: usize,
    /// Fraction of the image covered by the segmentation mask. Not part of
    /// the stored format; decoded templates carry 0.
    pub quality: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MatchParams {
    /// Spatial pairing threshold in pixels.
    pub theta0: f64,
    /// Orientation pairing threshold in radians.
    pub theta1: f64,
    pub hough_xy_bin: f64,
    pub hough_angle_bin: f64,
}

impl Default for MatchParams {
    fn default() -> Self {
        Self {
            theta0: 12.0,
            theta1: 20f64.to_radians(),
            hough_xy_bin: 8.0,
            hough_angle_bin: 10f64.to_radians(),
        }
    }
}

/// Maps template coordinates onto input coordinates: rotate by `dtheta`
/// about the image center, then translate by `(dx, dy)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegistrationTransform {
    pub dx: f64,
    pub dy: f64,
    pub dtheta: f64,
    pub support: usize,
}

pub(crate) fn wrap_2pi(a: f64) -> f64 {
    let w = a.rem_euclid(2.0 * PI);
    // rem_euclid can round up to exactly 2π for tiny negative inputs.
    if w >= 2.0 * PI {
        0.0
    } else {
        w
    }
}

/// Wraps into `[-π, π)`.
pub(crate) fn wrap_pi(a: f64) -> f64 {
    wrap_2pi(a + PI) - PI
}

/// Absolute circular difference of two directions, in `[0, π]`.
pub(crate) fn angle_diff(a: f64, b: f64) -> f64 {
    wrap_pi(a - b).abs()
}

/// Absolute difference of two axial orientations (period π), in `[0, π/2]`.
pub(crate) fn axial_diff(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(PI);
    d.min(PI - d)
}
