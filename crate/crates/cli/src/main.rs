mod eval;
mod inspect;
mod synth;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{CommandFactory, Parser, Subcommand};

use biofuse::fusion::{Decision, FusedScore, FusionConfig};
use biofuse::imaging::{decode_pgm, GrayImage};
use biofuse::registry::{AccessResult, AuditKind, AuditLog, Database, Pipelines, Probe};

use eval::EvalReport;

#[derive(Debug, Parser)]
#[command(name = "biofuse", version, about = "Fingerprint and iris enrollment, matching and evaluation")]
struct Cli {
    /// Template database directory.
    #[arg(long, global = true)]
    db: Option<PathBuf>,
    /// Fusion settings file (key = value lines).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed for synthetic fixtures.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct Probes {
    #[arg(long)]
    finger: Option<PathBuf>,
    #[arg(long)]
    iris: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract and store templates for a new subject.
    Enroll {
        #[arg(long)]
        subject: String,
        #[arg(long)]
        finger: Vec<PathBuf>,
        #[arg(long)]
        iris: Vec<PathBuf>,
    },
    /// Match probes against a claimed identity.
    Verify {
        #[arg(long)]
        claim: String,
        #[command(flatten)]
        probes: Probes,
    },
    /// Verify and log the decision; impostors raise an alarm.
    Access {
        #[arg(long)]
        claim: String,
        #[command(flatten)]
        probes: Probes,
        /// Audit log; defaults to audit.log inside the database.
        #[arg(long)]
        audit: Option<PathBuf>,
    },
    /// Rank every enrolled subject against the probes.
    Identify {
        #[command(flatten)]
        probes: Probes,
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Score a probe list against the whole database and sweep thresholds.
    Eval {
        /// CSV rows `true_subject_id,finger_path,iris_path`; empty fields
        /// skip a trait, relative paths are taken from the CSV's directory.
        #[arg(long)]
        probes: PathBuf,
        #[arg(long, default_value = "roc.csv")]
        roc: PathBuf,
    },
    /// Dump intermediate images of the pipelines.
    Inspect {
        #[command(flatten)]
        probes: Probes,
        #[arg(long)]
        out: PathBuf,
    },
    /// Render a synthetic fixture image.
    Synth {
        #[command(subcommand)]
        kind: synth::SynthKind,
    },
}

/// Accept maps to exit 0, reject to 1; errors become 2 in `main`.
enum Outcome {
    Accept,
    Reject,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match std::panic::catch_unwind(|| run(cli)) {
        Ok(Ok(Outcome::Accept)) => ExitCode::SUCCESS,
        Ok(Ok(Outcome::Reject)) => ExitCode::from(1),
        Ok(Err(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(_) => ExitCode::from(2),
    }
}

fn read_image(path: &Path) -> Result<GrayImage> {
    let bytes = fs::read(path).with_context(|| format!("stage decode: cannot read {}", path.display()))?;
    decode_pgm(&bytes).with_context(|| format!("stage decode: {}", path.display()))
}

fn require_db(cli: &Cli) -> Result<&Path> {
    match &cli.db {
        Some(db) => Ok(db),
        None => {
            let usage = Cli::command().render_usage();
            bail!("--db DIR is required for this command\n{usage}")
        }
    }
}

fn load_config(cli: &Cli) -> Result<FusionConfig> {
    match &cli.config {
        Some(path) => Ok(FusionConfig::load(path)?),
        None => Ok(FusionConfig::default()),
    }
}

fn open_db(cli: &Cli) -> Result<Database> {
    let root = require_db(cli)?;
    Ok(Database::open(root, Pipelines::default())?)
}

fn probe_images(probes: &Probes) -> Result<(Option<GrayImage>, Option<GrayImage>)> {
    if probes.finger.is_none() && probes.iris.is_none() {
        bail!("supply --finger FILE and/or --iris FILE");
    }
    let finger = probes.finger.as_deref().map(read_image).transpose()?;
    let iris = probes.iris.as_deref().map(read_image).transpose()?;
    Ok((finger, iris))
}

fn load_probe(probes: &Probes, db: &Database) -> Result<Probe> {
    let (finger, iris) = probe_images(probes)?;
    Ok(Probe::from_images(finger.as_ref(), iris.as_ref(), db.pipelines())?)
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_string(), |v| format!("{v:.4}"))
}

fn score_line(s: &FusedScore, verdict: &str) -> String {
    format!("ms_finger {} ms_iris {} ms_final {:.4} {verdict}", fmt_opt(s.ms_finger), fmt_opt(s.ms_iris), s.ms_final)
}

fn run(cli: Cli) -> Result<Outcome> {
    match &cli.command {
        Command::Enroll { subject, finger, iris } => {
            let root = require_db(&cli)?;
            if finger.is_empty() && iris.is_empty() {
                bail!("enroll needs at least one --finger or --iris image");
            }
            let fingers = finger.iter().map(|p| read_image(p)).collect::<Result<Vec<_>>>()?;
            let irises = iris.iter().map(|p| read_image(p)).collect::<Result<Vec<_>>>()?;
            let mut db = Database::open_or_create(root, Pipelines::default())?;
            let audit = db.default_audit();
            let record = db.enroll(subject, &fingers, &irises, &audit)?;
            println!("enrolled {}: {} finger, {} iris", record.subject_id, record.fingerprints.len(), record.iris_codes.len());
            Ok(Outcome::Accept)
        }
        Command::Verify { claim, probes } => {
            let cfg = load_config(&cli)?;
            let db = open_db(&cli)?;
            let probe = load_probe(probes, &db)?;
            let s = db.verify(claim, &probe, &cfg)?;
            Ok(match s.decision {
                Decision::Genuine => {
                    println!("{}", score_line(&s, "GENUINE"));
                    Outcome::Accept
                }
                Decision::Impostor => {
                    println!("{}", score_line(&s, "IMPOSTOR"));
                    Outcome::Reject
                }
            })
        }
        Command::Access { claim, probes, audit } => {
            let cfg = load_config(&cli)?;
            let db = open_db(&cli)?;
            let log = audit.clone().map_or_else(|| db.default_audit(), AuditLog::new);
            // Unreadable probes still leave a trace in the log.
            let probe = match load_probe(probes, &db) {
                Ok(p) => p,
                Err(e) => {
                    log.append(AuditKind::Error, Some(claim), None, &format!("{e:#}"))?;
                    return Err(e);
                }
            };
            let (result, s) = db.access(claim, &probe, &cfg, &log)?;
            Ok(match result {
                AccessResult::Unlock => {
                    println!("{}", score_line(&s, "UNLOCK"));
                    Outcome::Accept
                }
                AccessResult::Alarm => {
                    println!("{}", score_line(&s, "ALARM"));
                    Outcome::Reject
                }
            })
        }
        Command::Identify { probes, top } => {
            let cfg = load_config(&cli)?;
            let db = open_db(&cli)?;
            let probe = load_probe(probes, &db)?;
            for (rank, m) in db.identify(&probe, &cfg, *top)?.iter().enumerate() {
                println!("{} {} {:.4}", rank + 1, m.subject_id, m.ms_final);
            }
            Ok(Outcome::Accept)
        }
        Command::Eval { probes, roc } => {
            let cfg = load_config(&cli)?;
            let db = open_db(&cli)?;
            if db.is_empty() {
                bail!("database is empty");
            }
            let report = evaluate(&db, probes, &cfg)?;
            fs::write(roc, report.to_csv()).with_context(|| format!("cannot write {}", roc.display()))?;
            let e = report.equal_error();
            println!("genuine {} impostor {}", report.genuine.len(), report.impostor.len());
            println!("eer {:.4} threshold {:.2} far {:.4} frr {:.4}", (e.far + e.frr) / 2.0, e.threshold, e.far, e.frr);
            Ok(Outcome::Accept)
        }
        Command::Inspect { probes, out } => {
            let (finger, iris) = probe_images(probes)?;
            fs::create_dir_all(out).with_context(|| format!("cannot create {}", out.display()))?;
            let pipelines = Pipelines::default();
            if let Some(img) = &finger {
                inspect::finger(img, &pipelines, out)?;
            }
            if let Some(img) = &iris {
                inspect::iris(img, &pipelines, out)?;
            }
            Ok(Outcome::Accept)
        }
        Command::Synth { kind } => {
            synth::render(kind, cli.seed)?;
            Ok(Outcome::Accept)
        }
    }
}

struct ProbeRow {
    subject: String,
    finger: Option<PathBuf>,
    iris: Option<PathBuf>,
}

fn read_probe_csv(path: &Path) -> Result<Vec<ProbeRow>> {
    let base = path.parent().unwrap_or(Path::new("."));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))?;
    let resolve = |field: &str| (!field.is_empty()).then(|| base.join(field));
    let mut rows = Vec::new();
    for (n, record) in reader.records().enumerate() {
        let record = record.with_context(|| format!("{}: malformed CSV", path.display()))?;
        if record.len() != 3 {
            bail!("{} line {}: expected 3 fields, found {}", path.display(), n + 1, record.len());
        }
        if n == 0 && record[0].eq_ignore_ascii_case("true_subject_id") {
            continue;
        }
        let row = ProbeRow { subject: record[0].to_string(), finger: resolve(&record[1]), iris: resolve(&record[2]) };
        if row.subject.is_empty() || (row.finger.is_none() && row.iris.is_none()) {
            bail!("{} line {}: needs a subject id and at least one image", path.display(), n + 1);
        }
        rows.push(row);
    }
    Ok(rows)
}

fn evaluate(db: &Database, csv_path: &Path, cfg: &FusionConfig) -> Result<EvalReport> {
    let (mut genuine, mut impostor) = (Vec::new(), Vec::new());
    for row in read_probe_csv(csv_path)? {
        let finger = row.finger.as_deref().map(read_image).transpose()?;
        let iris = row.iris.as_deref().map(read_image).transpose()?;
        let probe = Probe::from_images(finger.as_ref(), iris.as_ref(), db.pipelines())
            .map_err(|e| anyhow!("probe for {}: {e}", row.subject))?;
        for record in db.records() {
            if let Some(s) = db.score_record(record, &probe, cfg)? {
                if record.subject_id == row.subject {
                    genuine.push(s.ms_final);
                } else {
                    impostor.push(s.ms_final);
                }
            }
        }
    }
    Ok(EvalReport::new(genuine, impostor))
}
