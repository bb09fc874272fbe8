//! Content-addressed JSON result cache: `<dir>/<sha256 of request>.json`.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable overriding the cache directory.
pub const CACHE_DIR_VAR: &str = "GLBLOCKS_CACHE_DIR";

#[derive(Clone, Debug)]
pub struct Cache {
    dir: PathBuf,
}

impl Cache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    /// Uses `$GLBLOCKS_CACHE_DIR` when set, else `default`.
    pub fn from_env_or(default: impl Into<PathBuf>) -> Self {
        match std::env::var_os(CACHE_DIR_VAR) {
            Some(d) => Self::new(d),
            None => Self::new(default),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    /// Hex digest of the request's canonical serialization (object keys sorted).
    pub fn hash(request: &Value) -> String {
        let text = serde_json::to_string(&sorted(request)).expect("JSON values serialize");
        let digest = Sha256::digest(text.as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    fn path_for(&self, request: &Value) -> PathBuf {
        self.dir.join(format!("{}.json", Self::hash(request)))
    }

    /// Returns the stored value if present and readable. Entries store the
    /// request alongside the value, and a mismatch counts as a miss.
    pub fn get(&self, request: &Value) -> Option<Value> {
        let text = fs::read_to_string(self.path_for(request)).ok()?;
        let stored: Value = serde_json::from_str(&text).ok()?;
        if stored.get("request")? != request {
            return None;
        }
        stored.get("value").cloned()
    }

    /// Writes through a temporary file and renames it into place, so readers
    /// never see partial entries.
    pub fn put(&self, request: &Value, value: &Value) -> std::io::Result<()> {
        fs::create_dir_all(&self.dir)?;
        let mut tmp = tempfile::NamedTempFile::new_in(&self.dir)?;
        let body = serde_json::json!({ "request": request, "value": value });
        tmp.write_all(serde_json::to_string(&body)?.as_bytes())?;
        tmp.as_file().sync_all()?;
        tmp.persist(self.path_for(request)).map_err(|e| e.error)?;
        Ok(())
    }
}

/// Copy of `v` with every object's keys in sorted order.
fn sorted(v: &Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut keys: Vec<&String> = map.keys().collect();
            keys.sort();
            Value::Object(keys.into_iter().map(|k| (k.clone(), sorted(&map[k]))).collect())
        }
        Value::Array(items) => Value::Array(items.iter().map(sorted).collect()),
        other => other.clone(),
    }
}
