use std::collections::HashMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::catalog::DescriptorCatalog;
use super::prompt::PromptSpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub key: String,
    pub model: String,
    /// Seconds since the Unix epoch.
    pub created_at: u64,
    pub catalog: DescriptorCatalog,
}

/// Directory of content-addressed JSON files, one per (prompt, model).
#[derive(Debug)]
pub struct DescriptorCache {
    dir: PathBuf,
    locks: Mutex<HashMap<String, Arc<Mutex<()>>>>,
}

impl DescriptorCache {
    pub fn open(dir: impl Into<PathBuf>) -> Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir).map_err(|e| Error::file(&dir, e))?;
        Ok(DescriptorCache {
            dir,
            locks: Mutex::new(HashMap::new()),
        })
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn key(prompt: &PromptSpec, model: &str) -> String {
        let mut h = Sha256::new();
        h.update(prompt.text().as_bytes());
        h.update([0u8]);
        h.update(model.as_bytes());
        hex::encode(h.finalize())
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &str) -> Result<Option<CacheEntry>> {
        let path = self.path(key);
        match fs::read(&path) {
            Ok(bytes) => Ok(Some(serde_json::from_slice(&bytes)?)),
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(None),
            Err(e) => Err(Error::file(path, e)),
        }
    }

    /// Writes through a temporary file so readers never see a partial entry.
    pub fn put(&self, entry: &CacheEntry) -> Result<()> {
        let path = self.path(&entry.key);
        let tmp = self.dir.join(format!("{}.json.{}.tmp", entry.key, std::process::id()));
        let bytes = serde_json::to_vec_pretty(entry)?;
        fs::write(&tmp, bytes).map_err(|e| Error::file(&tmp, e))?;
        fs::rename(&tmp, &path).map_err(|e| Error::file(&path, e))
    }

    /// Lock shared by every caller asking for `key`; holding it across the
    /// lookup and the request coalesces concurrent identical requests.
    pub(crate) fn lock_for(&self, key: &str) -> Arc<Mutex<()>> {
        let mut map = self.locks.lock().unwrap_or_else(|p| p.into_inner());
        map.entry(key.to_string()).or_default().clone()
    }
}
