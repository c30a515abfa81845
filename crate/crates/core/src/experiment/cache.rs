use std::fs;
use std::path::PathBuf;

use crate::audio::{stable_hash, Waveform};
use crate::error::{Error, Result};
use crate::features::{extract_features, read_fmx, write_fmx, FeatureMatrix, FrontendConfig};

/// Optional on-disk `.fmx` cache keyed by front-end settings and a caller
/// description of the input. Stored values are full precision, so cached and
/// fresh extractions are identical.
#[derive(Debug, Clone)]
pub struct FeatureCache {
    dir: Option<PathBuf>,
    frontend: FrontendConfig,
    salt: u64,
}

impl FeatureCache {
    pub fn new(dir: Option<PathBuf>, frontend: &FrontendConfig) -> Result<Self> {
        if let Some(d) = &dir {
            fs::create_dir_all(d).map_err(|e| Error::io(d, e))?;
        }
        let salt = stable_hash(&toml::to_string(frontend).expect("frontend serializes"));
        Ok(Self { dir, frontend: frontend.clone(), salt })
    }

    pub fn frontend(&self) -> &FrontendConfig {
        &self.frontend
    }

    /// `key` must describe everything that determines `wave`.
    pub fn features(&self, key: &str, wave: impl FnOnce() -> Result<Waveform>) -> Result<FeatureMatrix> {
        let Some(dir) = &self.dir else {
            return extract_features(&wave()?, &self.frontend);
        };
        let path = dir.join(format!("{:016x}{:016x}.fmx", self.salt, stable_hash(key)));
        if path.exists() {
            if let Ok(f) = read_fmx(&path) {
                return Ok(f);
            }
            log::warn!("discarding unreadable cache entry {}", path.display());
        }
        let f = extract_features(&wave()?, &self.frontend)?;
        // write-then-rename keeps a crashed run from leaving a truncated entry
        let tmp = path.with_extension("tmp");
        write_fmx(&f, &tmp)?;
        fs::rename(&tmp, &path).map_err(|e| Error::io(&path, e))?;
        Ok(f)
    }
}

/// Cache key for an audio file: path plus content hash.
pub fn file_key(path: &std::path::Path) -> Result<String> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let h = bytes.iter().fold(0xcbf2_9ce4_8422_2325u64, |h, &b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3));
    Ok(format!("{}#{h:016x}", path.display()))
}
