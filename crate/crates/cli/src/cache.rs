//! On-disk result cache.
//!
//! Entries are keyed by a SHA-256 over the operation, its normalized inputs,
//! the output mode and the engine version. Each file carries a header line
//! and a checksum of its body; anything that fails to verify is treated as a
//! miss and overwritten.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use hololab_core::ENGINE_VERSION;
use serde::Serialize;
use sha2::{Digest, Sha256};

const MAGIC: &str = "hololab-cache 1";

#[derive(Serialize)]
struct KeyMaterial<'a> {
    op: &'a str,
    inputs: &'a serde_json::Value,
    mode: &'a str,
    engine: &'a str,
}

fn sha256_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

/// Canonical key for a request under the given engine version.
pub fn key_for(op: &str, inputs: &serde_json::Value, json: bool, engine: &str) -> String {
    let material = KeyMaterial {
        op,
        inputs,
        mode: if json { "json" } else { "text" },
        engine,
    };
    let bytes = serde_json::to_vec(&material).expect("key material serializes");
    sha256_hex(&bytes)
}

pub enum Lookup {
    Hit(String),
    Miss,
    Corrupt(String),
}

pub struct Cache {
    dir: PathBuf,
    verbose: bool,
}

impl Cache {
    /// Opens the cache, or returns `None` with a warning when the directory
    /// cannot be created.
    pub fn open(dir: &Path, verbose: bool) -> Option<Cache> {
        match fs::create_dir_all(dir) {
            Ok(()) => Some(Cache {
                dir: dir.to_path_buf(),
                verbose,
            }),
            Err(e) => {
                eprintln!("warning: cache disabled, cannot use {}: {e}", dir.display());
                None
            }
        }
    }

    pub fn key(&self, op: &str, inputs: &serde_json::Value, json: bool) -> String {
        key_for(op, inputs, json, ENGINE_VERSION)
    }

    fn path(&self, key: &str) -> PathBuf {
        self.dir.join(format!("{key}.entry"))
    }

    pub fn get(&self, key: &str) -> Lookup {
        let raw = match fs::read_to_string(self.path(key)) {
            Ok(s) => s,
            Err(e) if e.kind() == std::io::ErrorKind::NotFound => return Lookup::Miss,
            Err(e) => return Lookup::Corrupt(format!("unreadable: {e}")),
        };
        let mut parts = raw.splitn(3, '\n');
        let (Some(magic), Some(sum), Some(body)) = (parts.next(), parts.next(), parts.next()) else {
            return Lookup::Corrupt("truncated header".into());
        };
        if magic != MAGIC {
            return Lookup::Corrupt("unknown header".into());
        }
        if sum.strip_prefix("sha256:") != Some(sha256_hex(body.as_bytes()).as_str()) {
            return Lookup::Corrupt("checksum mismatch".into());
        }
        Lookup::Hit(body.to_string())
    }

    pub fn put(&self, key: &str, body: &str) {
        let contents = format!("{MAGIC}\nsha256:{}\n{body}", sha256_hex(body.as_bytes()));
        let tmp = self.dir.join(format!("{key}.tmp{}", std::process::id()));
        let result = fs::File::create(&tmp)
            .and_then(|mut f| f.write_all(contents.as_bytes()))
            .and_then(|()| fs::rename(&tmp, self.path(key)));
        match result {
            Ok(()) => self.note(&format!("stored {key}")),
            Err(e) => {
                let _ = fs::remove_file(&tmp);
                eprintln!("warning: could not write cache entry {key}: {e}");
            }
        }
    }

    pub fn note(&self, msg: &str) {
        if self.verbose {
            eprintln!("cache: {msg}");
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn keys_depend_on_every_component() {
        let inputs = serde_json::json!({"system": "A1", "weight": "[3]"});
        let base = key_for("legendre", &inputs, true, "v1");
        assert_eq!(base, key_for("legendre", &inputs, true, "v1"));
        assert_ne!(base, key_for("screen", &inputs, true, "v1"));
        assert_ne!(base, key_for("legendre", &inputs, false, "v1"));
        assert_ne!(base, key_for("legendre", &inputs, true, "v2"));
        let other = serde_json::json!({"system": "A1", "weight": "[4]"});
        assert_ne!(base, key_for("legendre", &other, true, "v1"));
    }

    #[test]
    fn round_trip_and_corruption() {
        let dir = tempfile::tempdir().unwrap();
        let cache = Cache::open(dir.path(), false).unwrap();
        assert!(matches!(cache.get("k"), Lookup::Miss));
        cache.put("k", "body\nwith lines\n");
        match cache.get("k") {
            Lookup::Hit(b) => assert_eq!(b, "body\nwith lines\n"),
            _ => panic!("expected a hit"),
        }
        let path = dir.path().join("k.entry");
        let mut raw = fs::read_to_string(&path).unwrap();
        raw.push('x');
        fs::write(&path, raw).unwrap();
        assert!(matches!(cache.get("k"), Lookup::Corrupt(_)));
    }
}
