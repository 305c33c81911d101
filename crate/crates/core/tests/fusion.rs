use biofuse::fusion::{fuse_pipeline, Classifier, ClassifierScore, Decision, FusionConfig};

#[test]
fn config_file_drives_the_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fusion.conf");
    std::fs::write(&path, "alpha = 3\nbeta = 1\ncommon_threshold = 0.6\nthreshold.haar = 0.4\n").unwrap();
    let cfg = FusionConfig::load(&path).unwrap();

    // Haar distance 0.6 is similarity 0.4, exactly its own threshold, so it
    // lands on the common threshold; Mellin similarity 0.6 keeps 0.6.
    let scores = [ClassifierScore::distance(Classifier::Haar, 0.6), ClassifierScore::distance(Classifier::Mellin, 0.4)];
    let fused = fuse_pipeline(&scores, &cfg).unwrap();
    let mellin = 0.6 + (0.6 - 0.5) * (1.0 - 0.6) / (1.0 - 0.5);
    let expected = (3.0 * 0.6 + mellin) / 4.0;
    assert!((fused.ms_iris.unwrap() - expected).abs() < 1e-12);
    assert_eq!(fused.ms_finger, None);
    assert_eq!(fused.ms_final, fused.ms_iris.unwrap());
    assert_eq!(fused.decision, Decision::Genuine);
}

#[test]
fn both_traits_and_the_quarter_form() {
    let scores = [
        ClassifierScore::similarity(Classifier::Minutiae, 1.0),
        ClassifierScore::distance(Classifier::Haar, 0.0),
        ClassifierScore::distance(Classifier::Mellin, 0.0),
    ];
    let normal = fuse_pipeline(&scores, &FusionConfig::default()).unwrap();
    assert_eq!(normal.ms_final, 1.0);
    let quarter = FusionConfig { paper_faithful_final: true, ..FusionConfig::default() };
    let printed = fuse_pipeline(&scores, &quarter).unwrap();
    assert_eq!(printed.ms_final, 0.5);
    assert_eq!(printed.decision, Decision::Genuine);
}
