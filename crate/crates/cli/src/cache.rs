//! Append-only result cache: one JSON file per section, named by the SHA-256
//! of its key (tool version, command, parameters, field modulus).

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::report::{Section, VERSION};

#[derive(Serialize)]
struct Key<'a> {
    version: &'a str,
    command: &'a str,
    params: &'a serde_json::Value,
    modulus: &'a str,
}

pub fn cache_key(command: &str, params: &serde_json::Value, modulus: &str) -> String {
    let key = Key {
        version: VERSION,
        command,
        params,
        modulus,
    };
    let bytes = serde_json::to_vec(&key).expect("cache key serializes");
    hex::encode(Sha256::digest(bytes))
}

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn open(dir: &Path) -> Result<Self> {
        fs::create_dir_all(dir).with_context(|| format!("creating cache dir {}", dir.display()))?;
        Ok(Cache {
            dir: dir.to_path_buf(),
        })
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    /// Unreadable or corrupt entries count as misses.
    pub fn get(&self, key: &str) -> Option<Section> {
        let text = fs::read_to_string(self.path(key)).ok()?;
        match serde_json::from_str(&text) {
            Ok(section) => Some(section),
            Err(err) => {
                log::warn!("ignoring corrupt cache entry {key}: {err}");
                None
            }
        }
    }

    /// Existing entries are never overwritten.
    pub fn put(&self, key: &str, section: &Section) -> Result<()> {
        let path = self.path(key);
        if path.exists() {
            return Ok(());
        }
        let tmp = self.dir.join(format!(".{key}.{}.tmp", std::process::id()));
        let mut file = fs::File::create(&tmp)?;
        file.write_all(serde_json::to_string(section)?.as_bytes())?;
        file.sync_all()?;
        fs::rename(&tmp, &path)?;
        Ok(())
    }

    pub fn get_or_compute<F>(&self, key: &str, compute: F) -> Result<Section>
    where
        F: FnOnce() -> Section,
    {
        if let Some(hit) = self.get(key) {
            log::debug!("cache hit {key}");
            return Ok(hit);
        }
        let section = compute();
        self.put(key, &section)?;
        Ok(section)
    }
}
