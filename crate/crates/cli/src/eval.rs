//! FAR/FRR sweep over fused genuine and impostor scores.

use std::fmt::Write as _;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RocRow {
    pub threshold: f64,
    pub far: f64,
    pub frr: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalReport {
    pub rows: Vec<RocRow>,
    pub genuine: Vec<f64>,
    pub impostor: Vec<f64>,
}

/// Fraction of `scores` for which `pred` holds; 0 for an empty set.
fn rate(scores: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    if scores.is_empty() {
        0.0
    } else {
        scores.iter().filter(|&&s| pred(s)).count() as f64 / scores.len() as f64
    }
}

impl EvalReport {
    /// Thresholds 0.00, 0.01, ..., 1.00; a score at the threshold is
    /// accepted.
    pub fn new(genuine: Vec<f64>, impostor: Vec<f64>) -> Self {
        let rows = (0..=100)
            .map(|k| {
                let t = f64::from(k) / 100.0;
                RocRow { threshold: t, far: rate(&impostor, |s| s >= t), frr: rate(&genuine, |s| s < t) }
            })
            .collect();
        Self { rows, genuine, impostor }
    }

    /// Row minimizing |far - frr|, earliest on ties.
    pub fn equal_error(&self) -> RocRow {
        let mut best = self.rows[0];
        for r in &self.rows[1..] {
            if (r.far - r.frr).abs() < (best.far - best.frr).abs() {
                best = *r;
            }
        }
        best
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,far,frr\n");
        for r in &self.rows {
            let _ = writeln!(out, "{:.2},{:.4},{:.4}", r.threshold, r.far, r.frr);
        }
        out
    }
}
