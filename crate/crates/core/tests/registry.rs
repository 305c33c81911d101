use std::fs;
use std::path::Path;

use biofuse::fingerprint::{encode_template, extract_template, match_minutiae};
use biofuse::fusion::{fuse_pipeline, Classifier, ClassifierScore, Decision, FusionConfig, Modality};
use biofuse::imaging::GrayImage;
use biofuse::iris::encode_code;
use biofuse::registry::{AccessResult, AuditKind, AuditLog, Database, Pipelines, Probe, RegistryError};
use biofuse::synth::{EyeSpec, FingerSpec, Pose};

fn finger(seed: u64) -> GrayImage {
    FingerSpec::random(seed, 6, 40.0).render(&Pose::default(), 0.02, seed)
}

fn eye(seed: u64) -> GrayImage {
    EyeSpec::random(seed, seed).render(0.0, 0.02, seed)
}

fn listing(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (e.file_name().to_string_lossy().into_owned(), fs::read(e.path()).unwrap())
        })
        .collect();
    out.sort();
    out
}

fn lines(path: &Path) -> usize {
    fs::read_to_string(path).map(|t| t.lines().count()).unwrap_or(0)
}

#[test]
fn reopened_database_matches_what_was_enrolled() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    let audit = db.default_audit();
    db.enroll("alice", &[finger(1)], &[eye(1)], &audit).unwrap();
    db.enroll("bob", &[finger(2), finger(3)], &[], &audit).unwrap();
    assert_eq!(lines(audit.path()), 2);

    let again = Database::open(dir.path(), Pipelines::default()).unwrap();
    assert_eq!(again.records(), db.records());
    let alice = again.get("alice").unwrap();
    assert_eq!(fs::read(dir.path().join("alice_finger_0.fpt")).unwrap(), encode_template(&alice.fingerprints[0]));
    assert_eq!(fs::read(dir.path().join("alice_iris_0_haar.irc")).unwrap(), encode_code(&alice.iris_codes[0].0));
    assert_eq!(fs::read(dir.path().join("alice_iris_0_mellin.irc")).unwrap(), encode_code(&alice.iris_codes[0].1));
    assert_eq!(again.get("bob").unwrap().fingerprints.len(), 2);

    let manifest: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], 1);
    assert_eq!(manifest["subjects"][0]["iris"][0]["mellin"], "alice_iris_0_mellin.irc");
    assert_eq!(manifest["subjects"][1]["fingers"][1], "bob_finger_1.fpt");
}

#[test]
fn duplicate_subject_leaves_database_untouched() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    let audit = db.default_audit();
    db.enroll("s1", &[finger(4)], &[], &audit).unwrap();
    let before = listing(dir.path());
    let err = db.enroll("s1", &[finger(5)], &[], &audit).unwrap_err();
    assert!(matches!(err, RegistryError::DuplicateSubject(ref id) if id == "s1"));
    assert!(err.to_string().contains("duplicate"));
    assert_eq!(listing(dir.path()), before);
}

#[test]
fn failed_pipeline_persists_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    let audit = db.default_audit();
    db.enroll("first", &[], &[eye(6)], &audit).unwrap();
    let before = listing(dir.path());
    let blank = GrayImage::from_fn(256, 256, |_, _| 0.8).unwrap();
    let err = db.enroll("second", &[finger(7)], &[eye(8), blank], &audit).unwrap_err();
    match err {
        RegistryError::PipelineFailure { modality, index, .. } => assert_eq!((modality, index), (Modality::Iris, 1)),
        other => panic!("unexpected {other:?}"),
    }
    assert_eq!(listing(dir.path()), before);
    assert_eq!(db.len(), 1);
    assert!(matches!(db.enroll("third", &[], &[], &audit), Err(RegistryError::EmptyEnrollment)));
    assert!(matches!(db.enroll("bad id", &[finger(7)], &[], &audit), Err(RegistryError::InvalidSubjectId(_))));
}

#[test]
fn load_reports_broken_files_by_name() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    db.enroll("carol", &[finger(9)], &[eye(9)], &db.default_audit()).unwrap();

    let haar = dir.path().join("carol_iris_0_haar.irc");
    let saved = fs::read(&haar).unwrap();
    fs::remove_file(&haar).unwrap();
    match Database::open(dir.path(), Pipelines::default()) {
        Err(RegistryError::MissingTemplateFile(p)) => assert_eq!(p, haar),
        other => panic!("unexpected {other:?}"),
    }

    fs::write(&haar, b"XXXX0000").unwrap();
    match Database::open(dir.path(), Pipelines::default()) {
        Err(e @ RegistryError::BadTemplate { .. }) => assert!(e.to_string().contains("carol_iris_0_haar.irc")),
        other => panic!("unexpected {other:?}"),
    }

    fs::write(&haar, saved).unwrap();
    Database::open(dir.path(), Pipelines::default()).unwrap();
    fs::write(dir.path().join("manifest.json"), "{\"version\": 1, \"subjects\": [").unwrap();
    assert!(matches!(Database::open(dir.path(), Pipelines::default()), Err(RegistryError::CorruptManifest(_))));
}

#[test]
fn verify_self_probe_and_unknown_subject() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    let (f, e) = (finger(10), eye(10));
    db.enroll("dave", std::slice::from_ref(&f), std::slice::from_ref(&e), &db.default_audit()).unwrap();
    let cfg = FusionConfig::default();
    let probe = Probe::from_images(Some(&f), Some(&e), db.pipelines()).unwrap();
    let s = db.verify("dave", &probe, &cfg).unwrap();
    assert_eq!((s.ms_finger, s.ms_iris, s.ms_final, s.decision), (Some(1.0), Some(1.0), 1.0, Decision::Genuine));
    assert!(matches!(db.verify("erin", &probe, &cfg), Err(RegistryError::UnknownSubject(_))));
    assert!(matches!(Probe::from_images(None, None, db.pipelines()), Err(RegistryError::NoProbe)));
}

#[test]
fn verify_takes_the_best_template() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    let images = [finger(11), finger(12), finger(13)];
    db.enroll("multi", &images, &[], &db.default_audit()).unwrap();
    let cfg = FusionConfig::default();
    let pipelines = Pipelines::default();
    let probe_img = finger(12);
    let probe = Probe::from_images(Some(&probe_img), None, &pipelines).unwrap();

    // Oracle: fuse each enrolled template separately, keep the maximum.
    let p = extract_template(&probe_img, &pipelines.finger).unwrap().0;
    let expected = images
        .iter()
        .map(|img| {
            let t = extract_template(img, &pipelines.finger).unwrap().0;
            let s = match_minutiae(&t, &p, &pipelines.finger.matching);
            fuse_pipeline(&[ClassifierScore::similarity(Classifier::Minutiae, s)], &cfg).unwrap().ms_final
        })
        .fold(f64::MIN, f64::max);
    let got = db.verify("multi", &probe, &cfg).unwrap();
    assert_eq!(got.ms_final, expected);
    assert_eq!(got.ms_iris, None);
}

#[test]
fn identify_ranks_and_breaks_ties_by_id() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    let audit = db.default_audit();
    for (id, seed) in [("zed", 20), ("amy", 20), ("kim", 21)] {
        db.enroll(id, &[finger(seed)], &[eye(seed)], &audit).unwrap();
    }
    let cfg = FusionConfig::default();
    let probe = Probe::from_images(Some(&finger(20)), Some(&eye(20)), db.pipelines()).unwrap();
    let ranked = db.identify(&probe, &cfg, 5).unwrap();
    let ids: Vec<&str> = ranked.iter().map(|r| r.subject_id.as_str()).collect();
    assert_eq!(ids, ["amy", "zed", "kim"]);
    assert_eq!(ranked[0].ms_final, ranked[1].ms_final);
    assert!(ranked[1].ms_final > ranked[2].ms_final);
    assert_eq!(db.identify(&probe, &cfg, 1).unwrap().len(), 1);

    let empty_dir = tempfile::tempdir().unwrap();
    let empty = Database::open(empty_dir.path(), Pipelines::default()).unwrap();
    assert!(matches!(empty.identify(&probe, &cfg, 5), Err(RegistryError::EmptyDatabase)));
}

#[test]
fn access_appends_exactly_one_event() {
    let dir = tempfile::tempdir().unwrap();
    let mut db = Database::open(dir.path(), Pipelines::default()).unwrap();
    db.enroll("gate", &[finger(30)], &[eye(30)], &db.default_audit()).unwrap();
    let log = AuditLog::new(dir.path().join("access.log"));
    let cfg = FusionConfig::default();

    let genuine = Probe::from_images(Some(&finger(30)), Some(&eye(30)), db.pipelines()).unwrap();
    let impostor = Probe::from_images(Some(&finger(31)), Some(&eye(31)), db.pipelines()).unwrap();
    assert_eq!(db.access("gate", &genuine, &cfg, &log).unwrap().0, AccessResult::Unlock);
    assert_eq!(lines(log.path()), 1);
    let (result, score) = db.access("gate", &impostor, &cfg, &log).unwrap();
    assert_eq!((result, score.decision), (AccessResult::Alarm, Decision::Impostor));
    assert_eq!(lines(log.path()), 2);
    assert!(db.access("nobody", &genuine, &cfg, &log).is_err());

    let events = log.read().unwrap();
    let kinds: Vec<AuditKind> = events.iter().map(|e| e.kind).collect();
    assert_eq!(kinds, [AuditKind::AccessGranted, AuditKind::Alarm, AuditKind::Error]);
    assert_eq!(events[1].ms_final, score.ms_final);
    assert_eq!((events[2].claimed_id.as_str(), events[2].ms_final), ("nobody", -1.0));
}
