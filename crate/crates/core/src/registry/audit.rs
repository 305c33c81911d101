//! Append-only JSONL audit log.

use std::fs::OpenOptions;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use chrono::{DateTime, Duration, SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

use super::RegistryError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AuditKind {
    AccessGranted,
    Alarm,
    Enroll,
    Error,
}

/// One log line. `claimed_id` is `"-"` and `ms_final` is `-1` when absent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditEvent {
    pub ts: String,
    pub kind: AuditKind,
    pub claimed_id: String,
    pub ms_final: f64,
    pub detail: String,
}

/// Last timestamp handed out in this process; later events are pushed one
/// microsecond past it so the log stays strictly ordered even when the
/// clock stalls or steps back.
static LAST_TS: Mutex<Option<DateTime<Utc>>> = Mutex::new(None);

fn next_timestamp() -> DateTime<Utc> {
    let mut last = LAST_TS.lock().unwrap_or_else(|e| e.into_inner());
    let now = Utc::now();
    // The log keeps microseconds, so compare at that resolution.
    let now = now - Duration::nanoseconds(i64::from(now.timestamp_subsec_nanos() % 1000));
    let ts = match *last {
        Some(prev) if now <= prev => prev + Duration::microseconds(1),
        _ => now,
    };
    *last = Some(ts);
    ts
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditLog {
    path: PathBuf,
}

impl AuditLog {
    pub fn new(path: impl Into<PathBuf>) -> Self {
        Self { path: path.into() }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn append(
        &self,
        kind: AuditKind,
        claimed_id: Option<&str>,
        ms_final: Option<f64>,
        detail: &str,
    ) -> Result<AuditEvent, RegistryError> {
        let event = AuditEvent {
            ts: next_timestamp().to_rfc3339_opts(SecondsFormat::Micros, true),
            kind,
            claimed_id: claimed_id.unwrap_or("-").to_string(),
            ms_final: ms_final.unwrap_or(-1.0),
            detail: detail.to_string(),
        };
        let mut line = serde_json::to_string(&event).expect("audit events always serialize");
        line.push('\n');
        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(&self.path)
            .map_err(|e| RegistryError::io(&self.path, e))?;
        file.write_all(line.as_bytes()).map_err(|e| RegistryError::io(&self.path, e))?;
        Ok(event)
    }

    /// All events, oldest first. A missing file is an empty log.
    pub fn read(&self) -> Result<Vec<AuditEvent>, RegistryError> {
        let text = match std::fs::read_to_string(&self.path) {
            Ok(t) => t,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(Vec::new()),
            Err(e) => return Err(RegistryError::io(&self.path, e)),
        };
        text.lines()
            .filter(|l| !l.trim().is_empty())
            .enumerate()
            .map(|(n, l)| {
                serde_json::from_str(l).map_err(|e| RegistryError::CorruptLog(format!("line {}: {e}", n + 1)))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lines_are_json_and_ordered() {
        let dir = tempfile::tempdir().unwrap();
        let log = AuditLog::new(dir.path().join("audit.log"));
        for i in 0..50 {
            log.append(AuditKind::Alarm, Some("s1"), Some(0.25), &format!("attempt {i}")).unwrap();
        }
        log.append(AuditKind::Error, None, None, "no such subject").unwrap();
        let events = log.read().unwrap();
        assert_eq!(events.len(), 51);
        let stamps: Vec<DateTime<Utc>> =
            events.iter().map(|e| DateTime::parse_from_rfc3339(&e.ts).unwrap().with_timezone(&Utc)).collect();
        assert!(stamps.windows(2).all(|w| w[0] < w[1]));
        assert_eq!((events[50].claimed_id.as_str(), events[50].ms_final), ("-", -1.0));

        let raw = std::fs::read_to_string(log.path()).unwrap();
        let first: serde_json::Value = serde_json::from_str(raw.lines().next().unwrap()).unwrap();
        let mut keys: Vec<&str> = first.as_object().unwrap().keys().map(String::as_str).collect();
        keys.sort_unstable();
        assert_eq!(keys, ["claimed_id", "detail", "kind", "ms_final", "ts"]);
        assert_eq!(first["kind"], "alarm");
    }

    #[test]
    fn appending_keeps_earlier_lines() {
        let dir = tempfile::tempdir().unwrap();
        let log = AuditLog::new(dir.path().join("a.log"));
        log.append(AuditKind::Enroll, Some("x"), None, "1 finger, 0 iris").unwrap();
        let before = std::fs::read(log.path()).unwrap();
        log.append(AuditKind::AccessGranted, Some("x"), Some(0.9), "").unwrap();
        let after = std::fs::read(log.path()).unwrap();
        assert_eq!(&after[..before.len()], &before[..]);
    }
}
