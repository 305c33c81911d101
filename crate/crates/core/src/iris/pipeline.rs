use super::{
    detect_eyelids, hamming_distance, haar_code, locate_iris_boundary, locate_pupil, mellin_code, normalize,
    IrisCode, IrisError, IrisGeometry, MellinParams, NormalizedStrip,
};
use crate::imaging::{GrayImage, Raster};

#[derive(Debug, Clone, PartialEq)]
pub struct IrisParams {
    pub radial: usize,
    pub angular: usize,
    pub eyelids: bool,
    pub mellin: MellinParams,
    /// Shift search in code columns. One column is 16 strip columns at Haar
    /// level 4 and one anchor stride (8 strip columns) for Mellin, so a
    /// single column already covers several degrees of head tilt.
    pub haar_max_shift: usize,
    pub mellin_max_shift: usize,
}

impl Default for IrisParams {
    fn default() -> Self {
        Self {
            radial: 64,
            angular: 512,
            eyelids: true,
            mellin: MellinParams::default(),
            haar_max_shift: 1,
            mellin_max_shift: 1,
        }
    }
}

impl IrisParams {
    pub fn validate(&self) -> Result<(), IrisError> {
        if self.radial == 0 || self.angular == 0 || !self.radial.is_multiple_of(32) || !self.angular.is_multiple_of(32) {
            return Err(IrisError::BadDimensions { radial: self.radial, angular: self.angular });
        }
        self.mellin.validate(self.angular)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IrisTemplate {
    pub geometry: IrisGeometry,
    /// Normalized strip after eyelid masking.
    pub strip: NormalizedStrip,
    pub haar: IrisCode,
    pub mellin: IrisCode,
}

impl IrisTemplate {
    /// Haar and Mellin Hamming distances to `other`.
    pub fn distances(&self, other: &IrisTemplate, params: &IrisParams) -> Result<(f64, f64), IrisError> {
        Ok((
            hamming_distance(&self.haar, &other.haar, params.haar_max_shift)?,
            hamming_distance(&self.mellin, &other.mellin, params.mellin_max_shift)?,
        ))
    }
}

/// Localize, unwrap, mask eyelids and encode with both schemes.
pub fn extract_iris(img: &GrayImage, params: &IrisParams) -> Result<IrisTemplate, IrisError> {
    params.validate()?;
    let (cx, cy, pupil_r) = locate_pupil(img)?;
    if pupil_r < 4.0 {
        return Err(IrisError::NoPupilFound);
    }
    let iris_r = locate_iris_boundary(img, cx, cy, pupil_r)?;
    let geometry = IrisGeometry { pupil_cx: cx, pupil_cy: cy, pupil_r, iris_r };
    geometry.validate(img.width(), img.height())?;
    let mut strip = normalize(img, &geometry, params.radial, params.angular);
    if params.eyelids {
        strip = detect_eyelids(&strip);
    }
    let haar = haar_code(&strip)?;
    let mellin = mellin_code(&strip, &params.mellin)?;
    Ok(IrisTemplate { geometry, strip, haar, mellin })
}
