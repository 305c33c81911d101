use std::fmt::Write as _;
use std::path::Path;

use super::{Classifier, FusionError};

/// Per-classifier decision thresholds on the similarity scale.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassifierThresholds {
    pub minutiae: f64,
    pub reference: f64,
    pub haar: f64,
    pub mellin: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FusionConfig {
    pub alpha: f64,
    pub beta: f64,
    pub a: f64,
    pub b: f64,
    /// Parsed and written back, never used: the fused equations only have
    /// two traits.
    pub c: f64,
    pub d: f64,
    pub common_threshold: f64,
    pub thresholds: ClassifierThresholds,
    pub paper_faithful_final: bool,
}

impl Default for FusionConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            a: 1.0,
            b: 1.0,
            c: 1.0,
            d: 1.0,
            common_threshold: 0.5,
            thresholds: ClassifierThresholds { minutiae: 0.5, reference: 0.5, haar: 0.5, mellin: 0.5 },
            paper_faithful_final: false,
        }
    }
}

impl FusionConfig {
    pub fn threshold(&self, classifier: Classifier) -> f64 {
        match classifier {
            Classifier::Minutiae => self.thresholds.minutiae,
            Classifier::Ref => self.thresholds.reference,
            Classifier::Haar => self.thresholds.haar,
            Classifier::Mellin => self.thresholds.mellin,
        }
    }

    pub fn validate(&self) -> Result<(), FusionError> {
        let bad = |m: String| Err(FusionError::BadConfig(m));
        for (name, w) in [("alpha", self.alpha), ("beta", self.beta), ("a", self.a), ("b", self.b), ("c", self.c), ("d", self.d)] {
            if !(w >= 0.0 && w.is_finite()) {
                return bad(format!("weight {name} = {w} must be finite and non-negative"));
            }
        }
        if !(self.alpha + self.beta > 0.0) || !(self.a + self.b > 0.0) {
            return Err(FusionError::ZeroWeights);
        }
        let t = &self.thresholds;
        for (name, v) in [
            ("common_threshold", self.common_threshold),
            ("threshold.minutiae", t.minutiae),
            ("threshold.ref", t.reference),
            ("threshold.haar", t.haar),
            ("threshold.mellin", t.mellin),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return bad(format!("{name} = {v} must lie strictly between 0 and 1"));
            }
        }
        Ok(())
    }

    /// Parses `key = value` lines; `#` starts a comment. Missing keys keep
    /// their defaults, unknown keys are rejected.
    pub fn parse(text: &str) -> Result<Self, FusionError> {
        let mut cfg = Self::default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| FusionError::BadConfig(format!("line {}: expected key = value", n + 1)))?;
            let number = || {
                value
                    .parse::<f64>()
                    .map_err(|_| FusionError::BadConfig(format!("line {}: {key} needs a number, got {value:?}", n + 1)))
            };
            match key {
                "alpha" => cfg.alpha = number()?,
                "beta" => cfg.beta = number()?,
                "a" => cfg.a = number()?,
                "b" => cfg.b = number()?,
                "c" => cfg.c = number()?,
                "d" => cfg.d = number()?,
                "common_threshold" => cfg.common_threshold = number()?,
                "threshold.minutiae" => cfg.thresholds.minutiae = number()?,
                "threshold.ref" => cfg.thresholds.reference = number()?,
                "threshold.haar" => cfg.thresholds.haar = number()?,
                "threshold.mellin" => cfg.thresholds.mellin = number()?,
                "paper_faithful_final" => {
                    cfg.paper_faithful_final = match value {
                        "true" => true,
                        "false" => false,
                        _ => return Err(FusionError::BadConfig(format!("line {}: paper_faithful_final must be true or false", n + 1))),
                    }
                }
                _ => return Err(FusionError::BadConfig(format!("line {}: unknown key {key:?}", n + 1))),
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, FusionError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| FusionError::BadConfig(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn to_conf(&self) -> String {
        let t = &self.thresholds;
        let mut out = String::new();
        for (k, v) in [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("a", self.a),
            ("b", self.b),
            ("c", self.c),
            ("d", self.d),
            ("common_threshold", self.common_threshold),
            ("threshold.minutiae", t.minutiae),
            ("threshold.ref", t.reference),
            ("threshold.haar", t.haar),
            ("threshold.mellin", t.mellin),
        ] {
            let _ = writeln!(out, "{k} = {v}");
        }
        let _ = writeln!(out, "paper_faithful_final = {}", self.paper_faithful_final);
        out
    }
}
