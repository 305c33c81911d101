use super::NormalizedStrip;

/// Angular sectors (degrees) where eyelids can intrude: above and below the
/// pupil.
const SECTORS: [(f64, f64); 2] = [(60.0, 120.0), (240.0, 300.0)];
const DEVIATION: f64 = 2.0;

/// Invalidates the outer half of every eyelid-sector column whose outer-half
/// mean strays more than two standard deviations from the strip median.
pub fn detect_eyelids(strip: &NormalizedStrip) -> NormalizedStrip {
    let (rows, cols) = (strip.radial, strip.angular);
    let mut samples: Vec<f64> =
        strip.values.iter().zip(&strip.valid).filter(|&(_, &ok)| ok).map(|(&v, _)| v).collect();
    if samples.is_empty() {
        return strip.clone();
    }
    samples.sort_by(f64::total_cmp);
    let n = samples.len();
    let median = if n % 2 == 1 { samples[n / 2] } else { 0.5 * (samples[n / 2 - 1] + samples[n / 2]) };
    let mean = samples.iter().sum::<f64>() / n as f64;
    let std = (samples.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64).sqrt();

    let mut out = strip.clone();
    for j in 0..cols {
        let deg = 360.0 * j as f64 / cols as f64;
        if !SECTORS.iter().any(|&(lo, hi)| (lo..=hi).contains(&deg)) {
            continue;
        }
        let outer: Vec<f64> =
            (rows / 2..rows).filter(|&i| strip.is_valid(i, j)).map(|i| strip.get(i, j)).collect();
        if outer.is_empty() {
            continue;
        }
        let col_mean = outer.iter().sum::<f64>() / outer.len() as f64;
        if (col_mean - median).abs() > DEVIATION * std {
            for i in rows / 2..rows {
                out.valid[i * cols + j] = false;
            }
        }
    }
    out
}
