//! Binary embedding matrix with a JSON sidecar manifest.
//!
//! Layout of `<file>`:
//!
//! ```text
//! offset  size  field
//! 0       4     magic "EVVR"
//! 4       4     version (u32 LE)
//! 8       4     row count (u32 LE)
//! 12      4     dim (u32 LE)
//! 16      4*count*dim  f32 LE values, row-major
//! ```
//!
//! `<file>.manifest.json` holds `{model_name, pooling, ids}`; unknown keys are
//! preserved on round-trip.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const EMBEDDING_MAGIC: [u8; 4] = *b"EVVR";
pub const EMBEDDING_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

#[derive(Debug, Error)]
pub enum EmbeddingError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}: file shorter than the 16-byte header")]
    ShortHeader(PathBuf),
    #[error("{path}: bad magic {found:?}, expected \"EVVR\"")]
    Magic { path: PathBuf, found: [u8; 4] },
    #[error("{path}: unsupported version {found}, expected {EMBEDDING_VERSION}")]
    Version { path: PathBuf, found: u32 },
    #[error("{path}: payload is {actual} bytes but header declares {count}x{dim} floats = {expected} bytes")]
    PayloadSize { path: PathBuf, count: u32, dim: u32, expected: u64, actual: u64 },
    #[error("{path}: manifest lists {ids} ids but matrix has {rows} rows")]
    RowMismatch { path: PathBuf, ids: usize, rows: usize },
    #[error("{path}: duplicate id {id:?} in manifest")]
    DuplicateId { path: PathBuf, id: String },
    #[error("{path}: invalid manifest: {source}")]
    Manifest { path: PathBuf, source: serde_json::Error },
    #[error("vector {row} has length {len}, expected dim {dim}")]
    Ragged { row: usize, len: usize, dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pooling {
    Eos,
    Cls,
    Mean,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub model_name: String,
    pub pooling: Pooling,
    pub ids: Vec<String>,
    #[serde(flatten)]
    pub extra: BTreeMap<String, serde_json::Value>,
}

/// Dense `N x d` f32 matrix keyed by text id.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingSet {
    pub model_name: String,
    pub pooling: Pooling,
    pub dim: usize,
    ids: Vec<String>,
    vectors: Vec<f32>,
    extra: BTreeMap<String, serde_json::Value>,
    row_of: HashMap<String, usize>,
}

impl EmbeddingSet {
    pub fn new(
        model_name: impl Into<String>,
        pooling: Pooling,
        dim: usize,
        ids: Vec<String>,
        rows: Vec<Vec<f32>>,
    ) -> Result<Self, EmbeddingError> {
        let mut vectors = Vec::with_capacity(rows.len() * dim);
        for (row, v) in rows.iter().enumerate() {
            if v.len() != dim {
                return Err(EmbeddingError::Ragged { row, len: v.len(), dim });
            }
            vectors.extend_from_slice(v);
        }
        Self::from_flat(model_name.into(), pooling, dim, ids, vectors, BTreeMap::new(), Path::new("<memory>"))
    }

    fn from_flat(
        model_name: String,
        pooling: Pooling,
        dim: usize,
        ids: Vec<String>,
        vectors: Vec<f32>,
        extra: BTreeMap<String, serde_json::Value>,
        path: &Path,
    ) -> Result<Self, EmbeddingError> {
        let rows = vectors.len().checked_div(dim).unwrap_or(0);
        if ids.len() != rows {
            return Err(EmbeddingError::RowMismatch { path: path.to_path_buf(), ids: ids.len(), rows });
        }
        let mut row_of = HashMap::with_capacity(ids.len());
        for (i, id) in ids.iter().enumerate() {
            if row_of.insert(id.clone(), i).is_some() {
                return Err(EmbeddingError::DuplicateId { path: path.to_path_buf(), id: id.clone() });
            }
        }
        Ok(Self { model_name, pooling, dim, ids, vectors, extra, row_of })
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.vectors[i * self.dim..(i + 1) * self.dim]
    }

    pub fn get(&self, id: &str) -> Option<&[f32]> {
        self.row_of.get(id).map(|&i| self.row(i))
    }

    pub fn as_flat(&self) -> &[f32] {
        &self.vectors
    }

    pub fn manifest(&self) -> Manifest {
        Manifest { model_name: self.model_name.clone(), pooling: self.pooling, ids: self.ids.clone(), extra: self.extra.clone() }
    }
}

pub fn manifest_path(path: &Path) -> PathBuf {
    let mut name = path.as_os_str().to_owned();
    name.push(".manifest.json");
    PathBuf::from(name)
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> EmbeddingError + '_ {
    move |source| EmbeddingError::Io { path: path.to_path_buf(), source }
}

pub fn save_embeddings(set: &EmbeddingSet, path: &Path) -> Result<(), EmbeddingError> {
    let mut bytes = Vec::with_capacity(HEADER_LEN + set.vectors.len() * 4);
    bytes.extend_from_slice(&EMBEDDING_MAGIC);
    bytes.extend_from_slice(&EMBEDDING_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(set.len() as u32).to_le_bytes());
    bytes.extend_from_slice(&(set.dim as u32).to_le_bytes());
    for v in &set.vectors {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    fs::write(path, bytes).map_err(io_err(path))?;
    let manifest = serde_json::to_vec_pretty(&set.manifest()).expect("manifest serializes");
    let mpath = manifest_path(path);
    fs::write(&mpath, manifest).map_err(io_err(&mpath))
}

pub fn load_embeddings(path: &Path) -> Result<EmbeddingSet, EmbeddingError> {
    let bytes = fs::read(path).map_err(io_err(path))?;
    if bytes.len() < HEADER_LEN {
        return Err(EmbeddingError::ShortHeader(path.to_path_buf()));
    }
    let word = |i: usize| u32::from_le_bytes(bytes[i..i + 4].try_into().unwrap());
    let magic: [u8; 4] = bytes[0..4].try_into().unwrap();
    if magic != EMBEDDING_MAGIC {
        return Err(EmbeddingError::Magic { path: path.to_path_buf(), found: magic });
    }
    let version = word(4);
    if version != EMBEDDING_VERSION {
        return Err(EmbeddingError::Version { path: path.to_path_buf(), found: version });
    }
    let (count, dim) = (word(8), word(12));
    let expected = count as u64 * dim as u64 * 4;
    let actual = (bytes.len() - HEADER_LEN) as u64;
    if expected != actual {
        return Err(EmbeddingError::PayloadSize { path: path.to_path_buf(), count, dim, expected, actual });
    }
    let vectors: Vec<f32> =
        bytes[HEADER_LEN..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();

    let mpath = manifest_path(path);
    let raw = fs::read(&mpath).map_err(io_err(&mpath))?;
    let manifest: Manifest = serde_json::from_slice(&raw).map_err(|source| EmbeddingError::Manifest { path: mpath.clone(), source })?;
    if manifest.ids.len() != count as usize {
        return Err(EmbeddingError::RowMismatch { path: mpath, ids: manifest.ids.len(), rows: count as usize });
    }
    let mut seen = HashSet::with_capacity(manifest.ids.len());
    if let Some(dup) = manifest.ids.iter().find(|id| !seen.insert(id.as_str())) {
        return Err(EmbeddingError::DuplicateId { path: mpath, id: dup.clone() });
    }
    EmbeddingSet::from_flat(manifest.model_name, manifest.pooling, dim as usize, manifest.ids, vectors, manifest.extra, path)
}
