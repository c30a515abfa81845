use std::collections::HashSet;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManifestEntry {
    pub utterance_id: String,
    pub speaker_id: String,
    pub phrase_id: String,
    pub path: PathBuf,
}

/// Ordered list of utterances. Relative paths resolve against the manifest's directory.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Manifest {
    pub entries: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, utterance_id: &str) -> Option<&ManifestEntry> {
        self.entries.iter().find(|e| e.utterance_id == utterance_id)
    }
}

pub fn load_manifest(path: impl AsRef<Path>) -> Result<Manifest> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));

    let mut seen = HashSet::new();
    let mut entries = Vec::new();
    for (i, line) in text.lines().enumerate() {
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(Error::Parse {
                line: i + 1,
                reason: format!("expected 4 tab-separated columns, found {}", cols.len()),
            });
        }
        if !seen.insert(cols[0].to_string()) {
            return Err(Error::Duplicate(cols[0].to_string()));
        }
        let mut audio = PathBuf::from(cols[3]);
        if audio.is_relative() {
            audio = base.join(audio);
        }
        if !audio.exists() {
            return Err(Error::io(
                &audio,
                std::io::Error::new(std::io::ErrorKind::NotFound, "manifest entry not found"),
            ));
        }
        entries.push(ManifestEntry {
            utterance_id: cols[0].to_string(),
            speaker_id: cols[1].to_string(),
            phrase_id: cols[2].to_string(),
            path: audio,
        });
    }
    Ok(Manifest { entries })
}

/// Writes the manifest with paths relative to `relative_to` where possible.
pub fn write_manifest(manifest: &Manifest, path: impl AsRef<Path>, relative_to: &Path) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for e in &manifest.entries {
        let p = e.path.strip_prefix(relative_to).unwrap_or(&e.path);
        writeln!(out, "{}\t{}\t{}\t{}", e.utterance_id, e.speaker_id, e.phrase_id, p.display())
            .expect("write to vec");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
