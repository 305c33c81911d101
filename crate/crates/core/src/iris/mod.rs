//! Iris pipeline: pupil and limbus localization, polar normalization, eyelid
//! masking, Haar and circular-Mellin iris codes, and masked Hamming matching.
//!
//! Polar angles run counterclockwise on screen from +x, so with image rows
//! growing downward a point at angle `t` sits at `(cx + r cos t, cy - r sin t)`.

mod code;
mod eyelid;
mod haar;
mod hamming;
mod localize;
mod mellin;
mod normalize;
mod pipeline;

pub use code::{decode_code, encode_code};
pub use eyelid::detect_eyelids;
pub use haar::{haar_code, haar_forward, haar_inverse, HaarPyramid};
pub use hamming::hamming_distance;
pub use localize::{locate_iris_boundary, locate_pupil};
pub use mellin::{mellin_code, MellinParams};
pub use normalize::normalize;
pub use pipeline::{extract_iris, IrisParams, IrisTemplate};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IrisError {
    #[error("no dark component large enough to be a pupil")]
    NoPupilFound,
    #[error("no room between the pupil and the image edge to search for the iris boundary")]
    BoundaryNotFound,
    #[error("strip {radial}x{angular} must have both sides divisible by 32")]
    BadDimensions { radial: usize, angular: usize },
    #[error("invalid iris geometry: {0}")]
    BadGeometry(String),
    #[error("invalid iris parameters: {0}")]
    BadParams(String),
    #[error("cannot compare a {0:?} code with a {1:?} code")]
    SchemeMismatch(IrisScheme, IrisScheme),
    #[error("codes share fewer than {0} valid bits at every shift")]
    IncomparableCodes(usize),
    #[error("iris code does not start with IRC1")]
    BadMagic,
    #[error("unknown iris code scheme {0}")]
    UnknownScheme(u8),
    #[error("iris code truncated: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("iris code length {length} does not fit the {scheme:?} layout")]
    BadLength { scheme: IrisScheme, length: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IrisGeometry {
    pub pupil_cx: f64,
    pub pupil_cy: f64,
    pub pupil_r: f64,
    pub iris_r: f64,
}

impl IrisGeometry {
    pub fn validate(&self, width: usize, height: usize) -> Result<(), IrisError> {
        if !(self.pupil_r >= 4.0) {
            return Err(IrisError::BadGeometry(format!("pupil radius {} is below 4", self.pupil_r)));
        }
        if !(self.iris_r > self.pupil_r) {
            return Err(IrisError::BadGeometry(format!(
                "iris radius {} does not exceed pupil radius {}",
                self.iris_r, self.pupil_r
            )));
        }
        let (cx, cy, r) = (self.pupil_cx, self.pupil_cy, self.iris_r);
        if cx - r < -0.5 || cy - r < -0.5 || cx + r > width as f64 - 0.5 || cy + r > height as f64 - 0.5 {
            return Err(IrisError::BadGeometry(format!("iris circle of radius {r} leaves the image")));
        }
        Ok(())
    }
}

/// The iris annulus unwrapped to `radial x angular` cells. Row 0 touches the
/// pupil, column `j` sits at angle `2πj / angular`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedStrip {
    pub radial: usize,
    pub angular: usize,
    pub values: Vec<f64>,
    /// `false` marks occluded cells.
    pub valid: Vec<bool>,
}

impl NormalizedStrip {
    pub fn from_fn(radial: usize, angular: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut values = Vec::with_capacity(radial * angular);
        for i in 0..radial {
            for j in 0..angular {
                values.push(f(i, j));
            }
        }
        Self { radial, angular, values, valid: vec![true; radial * angular] }
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.angular + j]
    }

    pub fn is_valid(&self, i: usize, j: usize) -> bool {
        self.valid[i * self.angular + j]
    }

    /// Rotates the strip by `k` columns: column `j` of the result is column
    /// `j - k` of `self`.
    pub fn shifted(&self, k: isize) -> Self {
        let a = self.angular as isize;
        let src = |i: usize, j: usize| i * self.angular + (j as isize - k).rem_euclid(a) as usize;
        let mut out = self.clone();
        for i in 0..self.radial {
            for j in 0..self.angular {
                out.values[i * self.angular + j] = self.values[src(i, j)];
                out.valid[i * self.angular + j] = self.valid[src(i, j)];
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IrisScheme {
    Haar,
    Mellin,
}

impl IrisScheme {
    pub fn code(self) -> u8 {
        match self {
            IrisScheme::Haar => 0,
            IrisScheme::Mellin => 1,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(IrisScheme::Haar),
            1 => Some(IrisScheme::Mellin),
            _ => None,
        }
    }
}

/// A rectangular block of bits inside a code, stored in raster order. Shift
/// search rotates every segment row independently.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Segment {
    pub rows: usize,
    pub cols: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrisCode {
    pub scheme: IrisScheme,
    pub bits: Vec<bool>,
    /// `true` marks a usable bit.
    pub mask: Vec<bool>,
    pub segments: Vec<Segment>,
}

impl IrisCode {
    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn valid_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// Fraction of valid bits that are set.
    pub fn balance(&self) -> f64 {
        let ones = self.bits.iter().zip(&self.mask).filter(|&(&b, &m)| b && m).count();
        ones as f64 / self.valid_count().max(1) as f64
    }
}

/// Segment layout of a Haar code over an `R x A` strip: level-4 H, V, D,
/// then level-5 H, V, D and approximation.
pub fn haar_layout(radial: usize, angular: usize) -> Vec<Segment> {
    let l4 = Segment { rows: radial / 16, cols: angular / 16 };
    let l5 = Segment { rows: radial / 32, cols: angular / 32 };
    vec![l4, l4, l4, l5, l5, l5, l5]
}

/// One `anchor_rows x anchor_cols` segment per Mellin operator.
pub fn mellin_layout(operators: usize, anchor_rows: usize, anchor_cols: usize) -> Vec<Segment> {
    vec![Segment { rows: anchor_rows, cols: anchor_cols }; operators]
}
