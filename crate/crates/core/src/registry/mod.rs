//! Template database: enrollment, 1:1 verification, 1:N identification and
//! access decisions with an audit trail.

mod audit;
mod store;

pub use audit::{AuditEvent, AuditKind, AuditLog};

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, SecondsFormat, SubsecRound, Utc};
use thiserror::Error;

use crate::fingerprint::{
    decode_template, encode_template, extract_template, match_minutiae, FingerprintParams, FingerprintTemplate,
};
use crate::fusion::{fuse_pipeline, Classifier, ClassifierScore, Decision, FusedScore, FusionConfig, FusionError, Modality};
use crate::imaging::GrayImage;
use crate::iris::{
    decode_code, encode_code, extract_iris, hamming_distance, IrisCode, IrisError, IrisParams, IrisScheme, IrisTemplate,
};
use store::{IrisEntry, Manifest, SubjectEntry};

/// Default audit file inside a database directory.
pub const AUDIT_FILE: &str = "audit.log";

#[derive(Debug, Error)]
pub enum RegistryError {
    #[error("duplicate subject {0:?}: already enrolled")]
    DuplicateSubject(String),
    #[error("unknown subject {0:?}")]
    UnknownSubject(String),
    #[error("invalid subject id {0:?}: expected 1-64 characters from [A-Za-z0-9_-]")]
    InvalidSubjectId(String),
    #[error("enrollment needs at least one finger or iris image")]
    EmptyEnrollment,
    #[error("no probe image supplied")]
    NoProbe,
    #[error("database is empty")]
    EmptyDatabase,
    #[error("{modality:?} image {index}: {message}")]
    PipelineFailure { modality: Modality, index: usize, message: String },
    #[error("corrupt manifest: {0}")]
    CorruptManifest(String),
    #[error("manifest references missing file {}", .0.display())]
    MissingTemplateFile(PathBuf),
    #[error("bad template file {}: {reason}", file.display())]
    BadTemplate { file: PathBuf, reason: String },
    #[error("corrupt audit log: {0}")]
    CorruptLog(String),
    #[error("subject {0:?} has no enrolled trait matching the probe")]
    NoComparableTrait(String),
    #[error("{}: {source}", path.display())]
    Io { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Fusion(#[from] FusionError),
    #[error(transparent)]
    Iris(#[from] IrisError),
}

impl RegistryError {
    pub(crate) fn io(path: &Path, source: std::io::Error) -> Self {
        RegistryError::Io { path: path.to_path_buf(), source }
    }
}

pub fn is_valid_subject_id(id: &str) -> bool {
    (1..=64).contains(&id.len()) && id.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_' || b == b'-')
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersonRecord {
    pub subject_id: String,
    pub fingerprints: Vec<FingerprintTemplate>,
    /// `(haar, mellin)` per enrolled eye image.
    pub iris_codes: Vec<(IrisCode, IrisCode)>,
    pub enrolled_at: DateTime<Utc>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedMatch {
    pub subject_id: String,
    pub ms_final: f64,
    pub ms_finger: Option<f64>,
    pub ms_iris: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AccessResult {
    Unlock,
    Alarm,
}

/// Extraction settings shared by enrollment, probes and code decoding.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Pipelines {
    pub finger: FingerprintParams,
    pub iris: IrisParams,
}

/// Features extracted once from the probe images, reused for every
/// comparison.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Probe {
    pub finger: Option<FingerprintTemplate>,
    pub iris: Option<IrisTemplate>,
}

impl Probe {
    pub fn from_images(
        finger: Option<&GrayImage>,
        iris: Option<&GrayImage>,
        pipelines: &Pipelines,
    ) -> Result<Self, RegistryError> {
        if finger.is_none() && iris.is_none() {
            return Err(RegistryError::NoProbe);
        }
        let finger = finger.map(|img| extract_finger(img, 0, &pipelines.finger)).transpose()?;
        let iris = iris.map(|img| extract_eye(img, 0, &pipelines.iris)).transpose()?;
        Ok(Self { finger, iris })
    }

    fn is_empty(&self) -> bool {
        self.finger.is_none() && self.iris.is_none()
    }
}

fn extract_finger(img: &GrayImage, index: usize, params: &FingerprintParams) -> Result<FingerprintTemplate, RegistryError> {
    extract_template(img, params).map(|(t, _)| t).map_err(|e| RegistryError::PipelineFailure {
        modality: Modality::Finger,
        index,
        message: e.to_string(),
    })
}

fn extract_eye(img: &GrayImage, index: usize, params: &IrisParams) -> Result<IrisTemplate, RegistryError> {
    extract_iris(img, params).map_err(|e| RegistryError::PipelineFailure { modality: Modality::Iris, index, message: e.to_string() })
}

/// Hamming distance as a fusion input; `None` when too few bits overlap.
fn iris_score(
    classifier: Classifier,
    enrolled: &IrisCode,
    probe: &IrisCode,
    max_shift: usize,
) -> Result<Option<ClassifierScore>, RegistryError> {
    match hamming_distance(enrolled, probe, max_shift) {
        Ok(d) => Ok(Some(ClassifierScore::distance(classifier, d))),
        Err(IrisError::IncomparableCodes(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

#[derive(Debug, Clone)]
pub struct Database {
    root: PathBuf,
    pipelines: Pipelines,
    records: Vec<PersonRecord>,
    manifest: Manifest,
}

impl Database {
    /// Loads every template the manifest references. A directory without a
    /// manifest is an empty database.
    pub fn open(root: impl Into<PathBuf>, pipelines: Pipelines) -> Result<Self, RegistryError> {
        let root = root.into();
        let meta = fs::metadata(&root).map_err(|e| RegistryError::io(&root, e))?;
        if !meta.is_dir() {
            return Err(RegistryError::io(&root, std::io::Error::other("not a directory")));
        }
        let manifest = store::read_manifest(&root)?.unwrap_or_default();
        let mut records = Vec::with_capacity(manifest.subjects.len());
        for entry in &manifest.subjects {
            records.push(load_record(&root, entry, &pipelines)?);
        }
        Ok(Self { root, pipelines, records, manifest })
    }

    /// Creates the directory when needed, then opens it.
    pub fn open_or_create(root: impl Into<PathBuf>, pipelines: Pipelines) -> Result<Self, RegistryError> {
        let root = root.into();
        fs::create_dir_all(&root).map_err(|e| RegistryError::io(&root, e))?;
        Self::open(root, pipelines)
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn pipelines(&self) -> &Pipelines {
        &self.pipelines
    }

    pub fn records(&self) -> &[PersonRecord] {
        &self.records
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn get(&self, subject_id: &str) -> Option<&PersonRecord> {
        self.records.iter().find(|r| r.subject_id == subject_id)
    }

    /// The log that `enroll` writes to.
    pub fn default_audit(&self) -> AuditLog {
        AuditLog::new(self.root.join(AUDIT_FILE))
    }

    /// Runs every pipeline before touching the disk; any failure leaves the
    /// database as it was.
    pub fn enroll(
        &mut self,
        subject_id: &str,
        fingers: &[GrayImage],
        irises: &[GrayImage],
        audit: &AuditLog,
    ) -> Result<&PersonRecord, RegistryError> {
        if !is_valid_subject_id(subject_id) {
            return Err(RegistryError::InvalidSubjectId(subject_id.to_string()));
        }
        if self.get(subject_id).is_some() {
            return Err(RegistryError::DuplicateSubject(subject_id.to_string()));
        }
        if fingers.is_empty() && irises.is_empty() {
            return Err(RegistryError::EmptyEnrollment);
        }
        let fingerprints = fingers
            .iter()
            .enumerate()
            .map(|(k, img)| extract_finger(img, k, &self.pipelines.finger))
            .collect::<Result<Vec<_>, _>>()?;
        let iris_codes = irises
            .iter()
            .enumerate()
            .map(|(k, img)| extract_eye(img, k, &self.pipelines.iris).map(|t| (t.haar, t.mellin)))
            .collect::<Result<Vec<_>, _>>()?;

        // Microseconds, as stored in the manifest.
        let enrolled_at = Utc::now().trunc_subsecs(6);
        let mut files: Vec<(String, Vec<u8>)> = Vec::new();
        let mut entry = SubjectEntry {
            id: subject_id.to_string(),
            enrolled_at: enrolled_at.to_rfc3339_opts(SecondsFormat::Micros, true),
            fingers: Vec::new(),
            iris: Vec::new(),
        };
        for (k, t) in fingerprints.iter().enumerate() {
            let name = format!("{subject_id}_finger_{k}.fpt");
            files.push((name.clone(), encode_template(t)));
            entry.fingers.push(name);
        }
        for (k, (haar, mellin)) in iris_codes.iter().enumerate() {
            let pair = IrisEntry {
                haar: format!("{subject_id}_iris_{k}_haar.irc"),
                mellin: format!("{subject_id}_iris_{k}_mellin.irc"),
            };
            files.push((pair.haar.clone(), encode_code(haar)));
            files.push((pair.mellin.clone(), encode_code(mellin)));
            entry.iris.push(pair);
        }

        let mut manifest = self.manifest.clone();
        manifest.subjects.push(entry);
        let mut written = Vec::new();
        let result = files
            .iter()
            .try_for_each(|(name, bytes)| {
                let path = self.root.join(name);
                store::write_atomic(&path, bytes)?;
                written.push(path);
                Ok(())
            })
            .and_then(|()| store::write_manifest(&self.root, &manifest));
        if let Err(e) = result {
            for path in written {
                let _ = fs::remove_file(path);
            }
            return Err(e);
        }

        self.manifest = manifest;
        // The stored form is what later sessions load; keep memory identical.
        let fingerprints = fingerprints.iter().map(|t| decode_template(&encode_template(t))).collect::<Result<_, _>>();
        let record = PersonRecord {
            subject_id: subject_id.to_string(),
            fingerprints: fingerprints.expect("freshly encoded templates decode"),
            iris_codes,
            enrolled_at,
        };
        let detail = format!("{} finger, {} iris", record.fingerprints.len(), record.iris_codes.len());
        audit.append(AuditKind::Enroll, Some(subject_id), None, &detail)?;
        self.records.push(record);
        Ok(self.records.last().expect("just pushed"))
    }

    /// Best fused score over every pairing of the record's finger
    /// templates with its iris code pairs. `None` when the probe and the
    /// record share no comparable trait.
    pub fn score_record(
        &self,
        record: &PersonRecord,
        probe: &Probe,
        cfg: &FusionConfig,
    ) -> Result<Option<FusedScore>, RegistryError> {
        let finger_scores: Vec<Option<ClassifierScore>> = match &probe.finger {
            Some(p) if !record.fingerprints.is_empty() => record
                .fingerprints
                .iter()
                .map(|t| Some(ClassifierScore::similarity(Classifier::Minutiae, match_minutiae(t, p, &self.pipelines.finger.matching))))
                .collect(),
            _ => vec![None],
        };
        let iris_scores: Vec<Vec<ClassifierScore>> = match &probe.iris {
            Some(p) if !record.iris_codes.is_empty() => {
                let params = &self.pipelines.iris;
                let mut out = Vec::with_capacity(record.iris_codes.len());
                for (haar, mellin) in &record.iris_codes {
                    let mut pair = Vec::new();
                    pair.extend(iris_score(Classifier::Haar, haar, &p.haar, params.haar_max_shift)?);
                    pair.extend(iris_score(Classifier::Mellin, mellin, &p.mellin, params.mellin_max_shift)?);
                    out.push(pair);
                }
                out
            }
            _ => vec![Vec::new()],
        };

        let mut best: Option<FusedScore> = None;
        for f in &finger_scores {
            for i in &iris_scores {
                let scores: Vec<ClassifierScore> = f.iter().chain(i).copied().collect();
                if scores.is_empty() {
                    continue;
                }
                let fused = fuse_pipeline(&scores, cfg)?;
                if best.is_none_or(|b| fused.ms_final > b.ms_final) {
                    best = Some(fused);
                }
            }
        }
        Ok(best)
    }

    pub fn verify(&self, claimed_id: &str, probe: &Probe, cfg: &FusionConfig) -> Result<FusedScore, RegistryError> {
        if probe.is_empty() {
            return Err(RegistryError::NoProbe);
        }
        let record = self.get(claimed_id).ok_or_else(|| RegistryError::UnknownSubject(claimed_id.to_string()))?;
        self.score_record(record, probe, cfg)?
            .ok_or_else(|| RegistryError::NoComparableTrait(claimed_id.to_string()))
    }

    /// Exhaustive scan, best first; ties go to the smaller subject id.
    /// Subjects sharing no trait with the probe are left out.
    pub fn identify(&self, probe: &Probe, cfg: &FusionConfig, top_k: usize) -> Result<Vec<RankedMatch>, RegistryError> {
        if probe.is_empty() {
            return Err(RegistryError::NoProbe);
        }
        if self.records.is_empty() {
            return Err(RegistryError::EmptyDatabase);
        }
        let mut ranked = Vec::new();
        for record in &self.records {
            if let Some(s) = self.score_record(record, probe, cfg)? {
                ranked.push(RankedMatch {
                    subject_id: record.subject_id.clone(),
                    ms_final: s.ms_final,
                    ms_finger: s.ms_finger,
                    ms_iris: s.ms_iris,
                });
            }
        }
        ranked.sort_by(|a, b| b.ms_final.total_cmp(&a.ms_final).then_with(|| a.subject_id.cmp(&b.subject_id)));
        ranked.truncate(top_k);
        Ok(ranked)
    }

    /// Verification that always leaves one audit line: `access_granted`,
    /// `alarm`, or `error` when verification itself fails.
    pub fn access(
        &self,
        claimed_id: &str,
        probe: &Probe,
        cfg: &FusionConfig,
        audit: &AuditLog,
    ) -> Result<(AccessResult, FusedScore), RegistryError> {
        match self.verify(claimed_id, probe, cfg) {
            Ok(score) => {
                let (kind, result) = match score.decision {
                    Decision::Genuine => (AuditKind::AccessGranted, AccessResult::Unlock),
                    Decision::Impostor => (AuditKind::Alarm, AccessResult::Alarm),
                };
                let detail = format!("threshold {}", cfg.common_threshold);
                audit.append(kind, Some(claimed_id), Some(score.ms_final), &detail)?;
                Ok((result, score))
            }
            Err(e) => {
                audit.append(AuditKind::Error, Some(claimed_id), None, &e.to_string())?;
                Err(e)
            }
        }
    }
}

fn load_record(root: &Path, entry: &SubjectEntry, pipelines: &Pipelines) -> Result<PersonRecord, RegistryError> {
    if !is_valid_subject_id(&entry.id) {
        return Err(RegistryError::CorruptManifest(format!("invalid subject id {:?}", entry.id)));
    }
    let enrolled_at = DateTime::parse_from_rfc3339(&entry.enrolled_at)
        .map_err(|e| RegistryError::CorruptManifest(format!("subject {}: enrolled_at: {e}", entry.id)))?
        .with_timezone(&Utc);
    let bad = |name: &str, reason: String| RegistryError::BadTemplate { file: root.join(name), reason };

    let mut fingerprints = Vec::new();
    for name in &entry.fingers {
        let bytes = store::read_referenced(root, name)?;
        fingerprints.push(decode_template(&bytes).map_err(|e| bad(name, e.to_string()))?);
    }
    let mut iris_codes = Vec::new();
    for pair in &entry.iris {
        let load = |name: &str, scheme: IrisScheme| -> Result<IrisCode, RegistryError> {
            let bytes = store::read_referenced(root, name)?;
            let code = decode_code(&bytes, pipelines.iris.radial, &pipelines.iris.mellin).map_err(|e| bad(name, e.to_string()))?;
            if code.scheme != scheme {
                return Err(bad(name, format!("expected a {scheme:?} code, found {:?}", code.scheme)));
            }
            Ok(code)
        };
        iris_codes.push((load(&pair.haar, IrisScheme::Haar)?, load(&pair.mellin, IrisScheme::Mellin)?));
    }
    if fingerprints.is_empty() && iris_codes.is_empty() {
        return Err(RegistryError::CorruptManifest(format!("subject {} has no templates", entry.id)));
    }
    Ok(PersonRecord { subject_id: entry.id.clone(), fingerprints, iris_codes, enrolled_at })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subject_ids() {
        for ok in ["a", "S-01_x", &"z".repeat(64)] {
            assert!(is_valid_subject_id(ok), "{ok}");
        }
        for bad in ["", "a b", "é", "../x", &"z".repeat(65)] {
            assert!(!is_valid_subject_id(bad), "{bad}");
        }
    }

    #[test]
    fn empty_directory_is_an_empty_database() {
        let dir = tempfile::tempdir().unwrap();
        let db = Database::open(dir.path(), Pipelines::default()).unwrap();
        assert!(db.is_empty());
        let probe = Probe { finger: None, iris: None };
        assert!(matches!(db.identify(&probe, &FusionConfig::default(), 3), Err(RegistryError::NoProbe)));
    }

    #[test]
    fn missing_directory_is_an_error() {
        let dir = tempfile::tempdir().unwrap();
        assert!(matches!(Database::open(dir.path().join("nope"), Pipelines::default()), Err(RegistryError::Io { .. })));
    }
}
