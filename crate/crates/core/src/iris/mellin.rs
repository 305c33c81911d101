use std::f64::consts::PI;

use super::{mellin_layout, IrisCode, IrisError, IrisScheme, NormalizedStrip};

#[derive(Debug, Clone, PartialEq)]
pub struct MellinParams {
    /// `(p, q)`: angular cycles per window and log-radial cycles per window.
    pub operators: Vec<(f64, f64)>,
    pub window_rows: usize,
    pub window_cols: usize,
    pub anchor_rows: usize,
    pub anchor_cols: usize,
    /// A window with a larger invalid fraction yields a masked bit.
    pub max_invalid: f64,
}

impl Default for MellinParams {
    fn default() -> Self {
        Self {
            operators: vec![(2.0, 1.0), (4.0, 1.0), (3.0, 2.0)],
            window_rows: 16,
            window_cols: 128,
            anchor_rows: 8,
            anchor_cols: 64,
            max_invalid: 0.5,
        }
    }
}

impl MellinParams {
    pub fn validate(&self, angular: usize) -> Result<(), IrisError> {
        let bad = |m: String| Err(IrisError::BadParams(m));
        if self.operators.is_empty() {
            return bad("at least one Mellin operator is required".into());
        }
        if self.window_rows < 2 || self.window_cols < 2 || self.anchor_rows == 0 || self.anchor_cols == 0 {
            return bad("Mellin window and anchor grid must be non-empty".into());
        }
        if !angular.is_multiple_of(self.anchor_cols) {
            return bad(format!("{} anchor columns do not divide {angular} strip columns", self.anchor_cols));
        }
        if self.window_cols > angular {
            return bad(format!("window of {} columns exceeds the strip", self.window_cols));
        }
        Ok(())
    }
}

struct Kernel {
    re: Vec<f64>,
    im: Vec<f64>,
}

/// Hann-windowed harmonic in angle times a harmonic in log radius. Window
/// row `i` sits at radius `1 + i` (in rows), so `s_i = ln(1 + i) / ln(R_w)`
/// runs from 0 to 1 across the window.
fn kernel(p: f64, q: f64, rows: usize, cols: usize) -> Kernel {
    let hann = |k: usize, n: usize| 0.5 - 0.5 * (2.0 * PI * (k as f64 + 0.5) / n as f64).cos();
    let log_span = (rows as f64).ln();
    let mut re = Vec::with_capacity(rows * cols);
    let mut im = Vec::with_capacity(rows * cols);
    for i in 0..rows {
        let s = (1.0 + i as f64).ln() / log_span;
        for j in 0..cols {
            let w = hann(i, rows) * hann(j, cols);
            let t = p * 2.0 * PI * j as f64 / cols as f64 + q * 2.0 * PI * s;
            re.push(w * t.cos());
            im.push(w * t.sin());
        }
    }
    Kernel { re, im }
}

/// Phase-quadrant code of the strip correlated with circular-Mellin
/// operators on an anchor grid: bit 1 iff the response phase lies in
/// `(0, π]`. Angles wrap; radii clamp to the strip.
pub fn mellin_code(strip: &NormalizedStrip, params: &MellinParams) -> Result<IrisCode, IrisError> {
    params.validate(strip.angular)?;
    let (rows, cols) = (strip.radial as isize, strip.angular);
    let (wr, wc) = (params.window_rows, params.window_cols);
    let stride = cols / params.anchor_cols;
    let cells = (wr * wc) as f64;

    let mut bits = Vec::with_capacity(params.operators.len() * params.anchor_rows * params.anchor_cols);
    let mut mask = Vec::with_capacity(bits.capacity());
    for &(p, q) in &params.operators {
        let k = kernel(p, q, wr, wc);
        for ai in 0..params.anchor_rows {
            let centre = ((ai as f64 + 0.5) * strip.radial as f64 / params.anchor_rows as f64) as isize;
            let row_of = |i: usize| (centre - (wr / 2) as isize + i as isize).clamp(0, rows - 1) as usize;
            for aj in 0..params.anchor_cols {
                let start = (aj * stride) as isize - (wc / 2) as isize;
                let (mut re, mut im, mut invalid) = (0.0, 0.0, 0usize);
                for i in 0..wr {
                    let base = row_of(i) * cols;
                    for j in 0..wc {
                        let col = (start + j as isize).rem_euclid(cols as isize) as usize;
                        let v = strip.values[base + col];
                        // Correlation: strip times the conjugate kernel.
                        re += v * k.re[i * wc + j];
                        im -= v * k.im[i * wc + j];
                        invalid += usize::from(!strip.valid[base + col]);
                    }
                }
                bits.push(im > 0.0 || (im == 0.0 && re < 0.0));
                mask.push(invalid as f64 <= params.max_invalid * cells);
            }
        }
    }
    Ok(IrisCode {
        scheme: IrisScheme::Mellin,
        bits,
        mask,
        segments: mellin_layout(params.operators.len(), params.anchor_rows, params.anchor_cols),
    })
}
