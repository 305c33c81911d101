//! On-disk layout: `manifest.json` plus one file per template or code.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::RegistryError;

pub(crate) const MANIFEST: &str = "manifest.json";
const VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct Manifest {
    pub version: u32,
    pub subjects: Vec<SubjectEntry>,
}

impl Default for Manifest {
    fn default() -> Self {
        Self { version: VERSION, subjects: Vec::new() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct SubjectEntry {
    pub id: String,
    pub enrolled_at: String,
    pub fingers: Vec<String>,
    pub iris: Vec<IrisEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub(crate) struct IrisEntry {
    pub haar: String,
    pub mellin: String,
}

/// `None` when the directory has no manifest yet.
pub(crate) fn read_manifest(root: &Path) -> Result<Option<Manifest>, RegistryError> {
    let path = root.join(MANIFEST);
    let text = match fs::read_to_string(&path) {
        Ok(t) => t,
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Ok(None),
        Err(e) => return Err(RegistryError::io(&path, e)),
    };
    let manifest: Manifest = serde_json::from_str(&text).map_err(|e| RegistryError::CorruptManifest(e.to_string()))?;
    if manifest.version != VERSION {
        return Err(RegistryError::CorruptManifest(format!("unsupported version {}", manifest.version)));
    }
    Ok(Some(manifest))
}

fn temp_name(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// Writes through a sibling temp file and a rename, so readers see either
/// the old content or the new, never a partial file.
pub(crate) fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), RegistryError> {
    let tmp = temp_name(path);
    fs::write(&tmp, bytes).map_err(|e| RegistryError::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        RegistryError::io(path, e)
    })
}

pub(crate) fn write_manifest(root: &Path, manifest: &Manifest) -> Result<(), RegistryError> {
    let mut text = serde_json::to_string_pretty(manifest).expect("manifest always serializes");
    text.push('\n');
    write_atomic(&root.join(MANIFEST), text.as_bytes())
}

/// Reads a file the manifest points at, reporting a missing one by name.
pub(crate) fn read_referenced(root: &Path, name: &str) -> Result<Vec<u8>, RegistryError> {
    if name.is_empty() || name.contains(['/', '\\']) || name == "." || name == ".." {
        return Err(RegistryError::CorruptManifest(format!("bad file name {name:?}")));
    }
    let path = root.join(name);
    fs::read(&path).map_err(|e| {
        if e.kind() == std::io::ErrorKind::NotFound {
            RegistryError::MissingTemplateFile(path)
        } else {
            RegistryError::io(&path, e)
        }
    })
}
