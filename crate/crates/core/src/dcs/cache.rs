use std::collections::BTreeMap;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::sync::{Mutex, RwLock};

use serde::{Deserialize, Serialize};

use super::{DcsError, DcsRecord};

/// Cached records older than this are refetched.
pub const DEFAULT_TTL: i64 = 90 * 24 * 3600;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CacheEntry {
    pub fetched_at: i64,
    pub record: DcsRecord,
}

/// Key-value store of DCS records, persisted as JSON-Lines of [`CacheEntry`].
///
/// Reads take a shared lock; persistence goes through a single writer.
#[derive(Debug)]
pub struct DcsCache {
    path: Option<PathBuf>,
    ttl: i64,
    entries: RwLock<BTreeMap<String, CacheEntry>>,
    writer: Mutex<()>,
}

fn cache_err(path: &Path, reason: impl ToString) -> DcsError {
    DcsError::Cache { path: path.display().to_string(), reason: reason.to_string() }
}

fn read_jsonl<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<T>, DcsError> {
    let file = fs::File::open(path).map_err(|e| cache_err(path, e))?;
    let mut out = Vec::new();
    for (n, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| cache_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| cache_err(path, format!("line {}: {e}", n + 1)))?);
    }
    Ok(out)
}

impl DcsCache {
    pub fn in_memory() -> Self {
        Self { path: None, ttl: DEFAULT_TTL, entries: RwLock::new(BTreeMap::new()), writer: Mutex::new(()) }
    }

    /// Opens (or starts) the cache file at `path`.
    pub fn open(path: impl Into<PathBuf>) -> Result<Self, DcsError> {
        let path = path.into();
        let mut entries = BTreeMap::new();
        if path.exists() {
            for entry in read_jsonl::<CacheEntry>(&path)? {
                entries.insert(entry.record.domain.clone(), entry);
            }
        }
        Ok(Self { path: Some(path), ttl: DEFAULT_TTL, entries: RwLock::new(entries), writer: Mutex::new(()) })
    }

    pub fn with_ttl(mut self, ttl_seconds: i64) -> Self {
        self.ttl = ttl_seconds;
        self
    }

    pub fn len(&self) -> usize {
        self.entries.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Fresh record for `domain` as of `now` (unix seconds).
    pub fn get_fresh(&self, domain: &str, now: i64) -> Option<DcsRecord> {
        let entries = self.entries.read().unwrap();
        entries.get(domain).filter(|e| now - e.fetched_at < self.ttl).map(|e| e.record.clone())
    }

    /// Record regardless of age.
    pub fn get(&self, domain: &str) -> Option<DcsRecord> {
        self.entries.read().unwrap().get(domain).map(|e| e.record.clone())
    }

    pub fn insert(&self, record: DcsRecord, fetched_at: i64) {
        self.entries.write().unwrap().insert(record.domain.clone(), CacheEntry { fetched_at, record });
    }

    pub fn records(&self) -> Vec<DcsRecord> {
        self.entries.read().unwrap().values().map(|e| e.record.clone()).collect()
    }

    /// Writes the cache file (atomically, via a sibling temp file).
    pub fn flush(&self) -> Result<(), DcsError> {
        let Some(path) = &self.path else { return Ok(()) };
        let _guard = self.writer.lock().unwrap();
        let mut buf = Vec::new();
        for entry in self.entries.read().unwrap().values() {
            serde_json::to_writer(&mut buf, entry).expect("cache entry serializes");
            buf.push(b'\n');
        }
        let tmp = path.with_extension("tmp");
        let mut f = fs::File::create(&tmp).map_err(|e| cache_err(&tmp, e))?;
        f.write_all(&buf).map_err(|e| cache_err(&tmp, e))?;
        f.sync_all().map_err(|e| cache_err(&tmp, e))?;
        fs::rename(&tmp, path).map_err(|e| cache_err(path, e))
    }

    /// Snapshot export: JSON-Lines of [`DcsRecord`], sorted by domain.
    pub fn export_snapshot(&self, path: &Path) -> Result<(), DcsError> {
        let mut buf = Vec::new();
        for record in self.records() {
            serde_json::to_writer(&mut buf, &record).expect("record serializes");
            buf.push(b'\n');
        }
        fs::write(path, buf).map_err(|e| cache_err(path, e))
    }

    /// Loads a snapshot, stamping every record with `fetched_at`.
    pub fn import_snapshot(&self, path: &Path, fetched_at: i64) -> Result<usize, DcsError> {
        let records = read_jsonl::<DcsRecord>(path)?;
        let n = records.len();
        for r in records {
            self.insert(r, fetched_at);
        }
        Ok(n)
    }
}

/// Reads a snapshot file into a domain → record map.
pub fn read_snapshot(path: &Path) -> Result<BTreeMap<String, DcsRecord>, DcsError> {
    Ok(read_jsonl::<DcsRecord>(path)?.into_iter().map(|r| (r.domain.clone(), r)).collect())
}
