use super::false_minutiae::distance_to_background;
use super::{
    binarize, estimate_frequency, estimate_orientation, extract_minutiae, filter_false_minutiae, gabor_enhance,
    segment, FingerprintError, FingerprintTemplate, MatchParams, Minutia, SegmentationParams, MAX_MINUTIAE,
};
use super::GABOR_HALF;
use crate::imaging::{erode, thin, BinaryImage, FloatField, GrayImage, Raster, RealImage};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FingerprintParams {
    pub segmentation: SegmentationParams,
    /// Block size of the orientation and frequency fields.
    pub block: usize,
    /// Adaptive-threshold window used to binarize the enhanced image.
    pub binarize_window: usize,
    pub matching: MatchParams,
}

impl Default for FingerprintParams {
    fn default() -> Self {
        Self {
            segmentation: SegmentationParams::default(),
            block: 16,
            binarize_window: 17,
            matching: MatchParams::default(),
        }
    }
}

/// Intermediate rasters, kept for inspection dumps.
#[derive(Debug, Clone)]
pub struct FingerprintStages {
    pub mask: BinaryImage,
    pub orientation: FloatField,
    pub frequency: FloatField,
    pub enhanced: RealImage,
    pub binary: BinaryImage,
    pub thinned: BinaryImage,
    /// Minutiae before false-minutiae filtering.
    pub candidates: Vec<Minutia>,
    pub ridge_gap: f64,
}

/// Median frequency over blocks whose center lies in the mask (all blocks
/// when the mask is empty), as a ridge period in pixels.
fn ridge_gap(frequency: &FloatField, mask: &BinaryImage) -> f64 {
    let cell = frequency.cell;
    let mut inside: Vec<f64> = Vec::new();
    for by in 0..frequency.height {
        for bx in 0..frequency.width {
            let cx = (bx * cell + cell / 2).min(mask.width() - 1);
            let cy = (by * cell + cell / 2).min(mask.height() - 1);
            if mask.get(cx, cy) {
                inside.push(frequency.get(bx, by));
            }
        }
    }
    if inside.is_empty() {
        inside = frequency.values.clone();
    }
    inside.sort_by(f64::total_cmp);
    1.0 / inside[inside.len() / 2]
}

/// Keeps the `MAX_MINUTIAE` minutiae farthest from the mask border.
fn cap(minutiae: Vec<Minutia>, mask: &BinaryImage) -> Vec<Minutia> {
    if minutiae.len() <= MAX_MINUTIAE {
        return minutiae;
    }
    let depth = |m: &Minutia| {
        let (x, y) = (m.x.round() as usize, m.y.round() as usize);
        distance_to_background(mask, x, y, 64.0).unwrap_or(65.0)
    };
    let mut ranked: Vec<(usize, f64)> = minutiae.iter().enumerate().map(|(i, m)| (i, depth(m))).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    let mut keep: Vec<usize> = ranked[..MAX_MINUTIAE].iter().map(|r| r.0).collect();
    keep.sort_unstable();
    keep.into_iter().map(|i| minutiae[i]).collect()
}

/// Segment, enhance, binarize, thin, extract and filter.
pub fn extract_template(
    img: &GrayImage,
    params: &FingerprintParams,
) -> Result<(FingerprintTemplate, FingerprintStages), FingerprintError> {
    let (mask, _) = segment(img, &params.segmentation)?;
    let orientation = estimate_orientation(img, params.block)?;
    let frequency = estimate_frequency(img, &orientation, params.block)?;
    let enhanced = gabor_enhance(img, &orientation, &frequency);
    // Filter responses within a kernel half-size of the background mix in
    // flat pixels and produce broken ridges; they are left out of the map.
    let ridge_area = erode(&mask, GABOR_HALF);
    let binary = binarize(&enhanced, &ridge_area, params.binarize_window);
    let thinned = thin(&binary);
    let candidates = extract_minutiae(&thinned, &orientation, &ridge_area);
    let gap = ridge_gap(&frequency, &mask);
    let kept = cap(filter_false_minutiae(&candidates, &thinned, &ridge_area, gap), &ridge_area);
    let template = FingerprintTemplate {
        minutiae: kept,
        image_width: img.width(),
        image_height: img.height(),
        quality: mask.count() as f64 / (img.width() * img.height()) as f64,
    };
    Ok((template, FingerprintStages { mask, orientation, frequency, enhanced, binary, thinned, candidates, ridge_gap: gap }))
}
