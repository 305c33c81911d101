use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_biofuse")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn s(p: &Path) -> String {
    p.to_string_lossy().into_owned()
}

/// Three enrolled subjects plus a genuine probe pair for each.
fn fixture(dir: &Path) -> String {
    let db = s(&dir.join("db"));
    for k in 0..3u64 {
        let seed = (10 + k).to_string();
        let f = |name: &str| s(&dir.join(format!("{name}{k}.pgm")));
        assert!(run(&["--seed", &seed, "synth", "finger", "--out", &f("f"), "--noise-seed", "1"]).status.success());
        assert!(run(&["--seed", &seed, "synth", "eye", "--out", &f("e"), "--noise-seed", "1"]).status.success());
        assert!(run(&["--seed", &seed, "synth", "finger", "--out", &f("fp"), "--noise-seed", "2", "--dx", "-6", "--angle", "5"])
            .status
            .success());
        assert!(run(&["--seed", &seed, "synth", "eye", "--out", &f("ep"), "--noise-seed", "2", "--rotation", "-3"]).status.success());
        let out = run(&["--db", &db, "enroll", "--subject", &format!("p{k}"), "--finger", &f("f"), "--iris", &f("e")]);
        assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
        assert_eq!(stdout(&out).trim(), format!("enrolled p{k}: 1 finger, 1 iris"));
    }
    db
}

#[test]
fn enroll_verify_access_identify() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture(dir.path());
    let f = |name: &str| s(&dir.path().join(name));

    let dup = run(&["--db", &db, "enroll", "--subject", "p0", "--finger", &f("f0.pgm")]);
    assert_eq!(dup.status.code(), Some(2));
    assert!(stderr(&dup).contains("duplicate"));

    let genuine = run(&["--db", &db, "verify", "--claim", "p1", "--finger", &f("fp1.pgm"), "--iris", &f("ep1.pgm")]);
    assert_eq!(genuine.status.code(), Some(0), "{}", stderr(&genuine));
    let line = stdout(&genuine);
    assert!(line.trim_end().ends_with("GENUINE"), "{line}");
    // Four decimals on every number.
    for token in line.split_whitespace().filter(|t| t.starts_with(|c: char| c.is_ascii_digit())) {
        assert_eq!(token.split('.').nth(1).map(str::len), Some(4), "{token}");
    }

    let impostor = run(&["--db", &db, "verify", "--claim", "p1", "--finger", &f("fp2.pgm"), "--iris", &f("ep2.pgm")]);
    assert_eq!(impostor.status.code(), Some(1));
    assert!(stdout(&impostor).trim_end().ends_with("IMPOSTOR"));

    let audit = f("gate.log");
    let alarm = run(&["--db", &db, "access", "--claim", "p0", "--finger", &f("fp2.pgm"), "--audit", &audit]);
    assert_eq!(alarm.status.code(), Some(1));
    assert!(stdout(&alarm).trim_end().ends_with("ALARM"));
    let unlock = run(&["--db", &db, "access", "--claim", "p0", "--iris", &f("ep0.pgm"), "--audit", &audit]);
    assert_eq!(unlock.status.code(), Some(0));
    assert!(stdout(&unlock).trim_end().ends_with("UNLOCK"));
    let unknown = run(&["--db", &db, "access", "--claim", "nobody", "--iris", &f("ep0.pgm"), "--audit", &audit]);
    assert_eq!(unknown.status.code(), Some(2));
    let kinds: Vec<String> = fs::read_to_string(&audit)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str::<serde_json::Value>(l).unwrap()["kind"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(kinds, ["alarm", "access_granted", "error"]);

    let ranked = run(&["--db", &db, "identify", "--finger", &f("fp2.pgm"), "--iris", &f("ep2.pgm"), "--top", "2"]);
    assert_eq!(ranked.status.code(), Some(0));
    let lines: Vec<String> = stdout(&ranked).lines().map(str::to_string).collect();
    assert_eq!(lines.len(), 2);
    assert!(lines[0].starts_with("1 p2 "), "{lines:?}");
}

#[test]
fn eval_writes_a_monotone_roc() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture(dir.path());
    fs::write(dir.path().join("probes.csv"), "p0,fp0.pgm,ep0.pgm\np1,fp1.pgm,\np2,,ep2.pgm\n").unwrap();
    let roc = s(&dir.path().join("roc.csv"));
    let out = run(&["--db", &db, "eval", "--probes", &s(&dir.path().join("probes.csv")), "--roc", &roc]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(stdout(&out).contains("genuine 3 impostor 6"));
    assert!(stdout(&out).contains("eer 0.0000"));

    let rows: Vec<(f64, f64, f64)> = fs::read_to_string(&roc)
        .unwrap()
        .lines()
        .skip(1)
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|x| x.parse().unwrap()).collect();
            (v[0], v[1], v[2])
        })
        .collect();
    assert_eq!(rows.len(), 101);
    assert_eq!(rows[0], (0.0, 1.0, 0.0));
    assert!(rows.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].2 >= w[0].2));

    fs::write(dir.path().join("bad.csv"), "p0,missing.pgm,\n").unwrap();
    let bad = run(&["--db", &db, "eval", "--probes", &s(&dir.path().join("bad.csv")), "--roc", &roc]);
    assert_eq!(bad.status.code(), Some(2));
    fs::write(dir.path().join("short.csv"), "p0,fp0.pgm\n").unwrap();
    assert_eq!(run(&["--db", &db, "eval", "--probes", &s(&dir.path().join("short.csv"))]).status.code(), Some(2));
}

#[test]
fn config_file_changes_the_decision() {
    let dir = tempfile::tempdir().unwrap();
    let db = fixture(dir.path());
    let f = |name: &str| s(&dir.path().join(name));
    let impostor = ["--db", &db, "verify", "--claim", "p0", "--finger", &f("fp1.pgm")];
    assert_eq!(run(&impostor).status.code(), Some(1));
    fs::write(f("lax.conf"), "# almost anything passes\ncommon_threshold = 0.01\nthreshold.minutiae = 0.01\n").unwrap();
    let lax = run(&[&["--config", &f("lax.conf")][..], &impostor[..]].concat());
    assert_eq!(lax.status.code(), Some(0));
    fs::write(f("broken.conf"), "gamma = 2\n").unwrap();
    let broken = run(&["--db", &db, "--config", &f("broken.conf"), "verify", "--claim", "p0", "--finger", &f("fp0.pgm")]);
    assert_eq!(broken.status.code(), Some(2));
    assert!(stderr(&broken).contains("gamma"));
}

#[test]
fn inspect_dumps() {
    let dir = tempfile::tempdir().unwrap();
    let f = |name: &str| s(&dir.path().join(name));
    assert!(run(&["--seed", "4", "synth", "finger", "--out", &f("f.pgm")]).status.success());
    assert!(run(&["--seed", "4", "synth", "eye", "--out", &f("e.pgm")]).status.success());
    let out = run(&["inspect", "--finger", &f("f.pgm"), "--iris", &f("e.pgm"), "--out", &f("dump")]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    for name in ["mask.pgm", "enhanced.pgm", "thin.pgm", "minutiae.pgm", "strip.pgm", "strip_mask.pgm"] {
        assert!(dir.path().join("dump").join(name).exists(), "{name}");
    }
    let strip = fs::read(dir.path().join("dump/strip.pgm")).unwrap();
    assert!(strip.starts_with(b"P5\n512 64\n255\n"));
    assert_eq!(strip.len(), b"P5\n512 64\n255\n".len() + 512 * 64);
    assert!(stdout(&out).contains("minutiae 20 "));

    fs::write(f("junk.pgm"), b"not an image").unwrap();
    let bad = run(&["inspect", "--finger", &f("junk.pgm"), "--out", &f("dump")]);
    assert_eq!(bad.status.code(), Some(2));
    assert!(stderr(&bad).contains("stage decode"));
}

#[test]
fn usage_and_error_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let img = s(&dir.path().join("f.pgm"));
    assert!(run(&["synth", "finger", "--out", &img]).status.success());

    let no_db = run(&["enroll", "--subject", "x", "--finger", &img]);
    assert_eq!(no_db.status.code(), Some(2));
    assert!(stderr(&no_db).contains("Usage"));
    assert_eq!(run(&["verify"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&["--help"]).status.code(), Some(0));

    // An empty database cannot identify anyone.
    let empty = dir.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(run(&["--db", &s(&empty), "identify", "--finger", &img]).status.code(), Some(2));
    // A generator panic is still reported as exit 2.
    let impossible = run(&["synth", "finger", "--minutiae", "5000", "--out", &s(&dir.path().join("x.pgm"))]);
    assert_eq!(impossible.status.code(), Some(2));
}
