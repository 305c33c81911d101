//! Score-level fusion: normalization, distance-to-similarity conversion,
//! common-threshold rescaling, sum-rule fusion within and across traits,
//! and the accept/reject decision.

mod config;

pub use config::FusionConfig;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FusionError {
    #[error("normalization range [{lo}, {hi}] is empty")]
    DegenerateRange { lo: f64, hi: f64 },
    #[error("fusion weights sum to zero")]
    ZeroWeights,
    #[error("no scores to fuse")]
    NoScores,
    #[error("classifier {0:?} scored twice")]
    DuplicateClassifier(Classifier),
    #[error("invalid fusion config: {0}")]
    BadConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Modality {
    Finger,
    Iris,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Classifier {
    Minutiae,
    /// Reference-point fingerprint classifier; no extractor exists, the slot
    /// is kept for externally supplied scores.
    Ref,
    Haar,
    Mellin,
}

impl Classifier {
    pub fn modality(self) -> Modality {
        match self {
            Classifier::Minutiae | Classifier::Ref => Modality::Finger,
            Classifier::Haar | Classifier::Mellin => Modality::Iris,
        }
    }

    /// The α-weighted classifier of each trait comes first in its equation:
    /// Ref for fingers, Haar for irises.
    fn is_alpha(self) -> bool {
        matches!(self, Classifier::Ref | Classifier::Haar)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierScore {
    pub classifier: Classifier,
    pub value: f64,
    pub is_distance: bool,
    pub range_lo: f64,
    pub range_hi: f64,
}

impl ClassifierScore {
    /// A similarity already in `[0, 1]`.
    pub fn similarity(classifier: Classifier, value: f64) -> Self {
        Self { classifier, value, is_distance: false, range_lo: 0.0, range_hi: 1.0 }
    }

    /// A distance already in `[0, 1]`.
    pub fn distance(classifier: Classifier, value: f64) -> Self {
        Self { classifier, value, is_distance: true, range_lo: 0.0, range_hi: 1.0 }
    }

    pub fn modality(&self) -> Modality {
        self.classifier.modality()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decision {
    Genuine,
    Impostor,
}

/// Fused result; a trait score is `None` when that trait was not presented.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusedScore {
    pub ms_finger: Option<f64>,
    pub ms_iris: Option<f64>,
    pub ms_final: f64,
    pub decision: Decision,
}

pub fn normalize_score(raw: f64, range_lo: f64, range_hi: f64) -> Result<f64, FusionError> {
    if !(range_lo < range_hi) {
        return Err(FusionError::DegenerateRange { lo: range_lo, hi: range_hi });
    }
    Ok(((raw - range_lo) / (range_hi - range_lo)).clamp(0.0, 1.0))
}

pub fn to_similarity(score: f64, is_distance: bool) -> f64 {
    if is_distance {
        1.0 - score
    } else {
        score
    }
}

/// Piecewise-linear map through `(0, 0)`, `(t_classifier, t_common)` and
/// `(1, 1)`. Scores below the classifier threshold are kept strictly below
/// the common one even when the product rounds up.
pub fn rescale_to_common_threshold(score: f64, t_classifier: f64, t_common: f64) -> f64 {
    if score < t_classifier {
        let r = score * (t_common / t_classifier);
        if r >= t_common {
            t_common.next_down()
        } else {
            r.max(0.0)
        }
    } else {
        (t_common + (score - t_classifier) * ((1.0 - t_common) / (1.0 - t_classifier))).clamp(t_common, 1.0)
    }
}

/// Weighted sum rule; with unit weights this is `(s1 + s2) / 2`.
pub fn fuse_classifiers(s1: f64, s2: f64, w1: f64, w2: f64) -> Result<f64, FusionError> {
    if !(w1 + w2 > 0.0) {
        return Err(FusionError::ZeroWeights);
    }
    Ok((w1 * s1 + w2 * s2) / (w1 + w2))
}

/// Cross-trait sum rule. The normalized form divides by `a + b`; the
/// `paper_faithful_final` form divides by four whatever the weights,
/// so with unit weights a perfect match scores one half.
pub fn fuse_modalities(ms_finger: f64, ms_iris: f64, cfg: &FusionConfig) -> Result<f64, FusionError> {
    if !(cfg.a + cfg.b > 0.0) {
        return Err(FusionError::ZeroWeights);
    }
    let sum = cfg.a * ms_finger + cfg.b * ms_iris;
    Ok(if cfg.paper_faithful_final { sum / 4.0 } else { sum / (cfg.a + cfg.b) })
}

pub fn decide(ms_final: f64, threshold: f64) -> Decision {
    if ms_final >= threshold {
        Decision::Genuine
    } else {
        Decision::Impostor
    }
}

fn fuse_trait(scores: &[(Classifier, f64)], cfg: &FusionConfig) -> Result<Option<f64>, FusionError> {
    match scores {
        [] => Ok(None),
        [(_, s)] => Ok(Some(*s)),
        [(c1, s1), (_, s2)] => {
            let (alpha_score, beta_score) = if c1.is_alpha() { (s1, s2) } else { (s2, s1) };
            fuse_classifiers(*alpha_score, *beta_score, cfg.alpha, cfg.beta).map(Some)
        }
        _ => unreachable!("at most two classifiers per trait"),
    }
}

/// Normalize, convert, rescale, fuse per trait, fuse across traits, decide.
pub fn fuse_pipeline(scores: &[ClassifierScore], cfg: &FusionConfig) -> Result<FusedScore, FusionError> {
    if scores.is_empty() {
        return Err(FusionError::NoScores);
    }
    let mut finger = Vec::new();
    let mut iris = Vec::new();
    for s in scores {
        let side = if s.modality() == Modality::Finger { &mut finger } else { &mut iris };
        if side.iter().any(|&(c, _)| c == s.classifier) {
            return Err(FusionError::DuplicateClassifier(s.classifier));
        }
        let sim = to_similarity(normalize_score(s.value, s.range_lo, s.range_hi)?, s.is_distance);
        let t = cfg.threshold(s.classifier);
        side.push((s.classifier, rescale_to_common_threshold(sim, t, cfg.common_threshold)));
    }
    let ms_finger = fuse_trait(&finger, cfg)?;
    let ms_iris = fuse_trait(&iris, cfg)?;
    let ms_final = match (ms_finger, ms_iris) {
        (Some(f), Some(i)) => fuse_modalities(f, i, cfg)?,
        (Some(only), None) | (None, Some(only)) => only,
        (None, None) => unreachable!("scores is non-empty"),
    };
    Ok(FusedScore { ms_finger, ms_iris, ms_final, decision: decide(ms_final, cfg.common_threshold) })
}
