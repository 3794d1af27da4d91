//! Model file layout:
//!
//! ```text
//! 0   4  magic "EVVM"
//! 4   4  version (u32 LE)
//! 8   1  bytes per parameter (4 or 8)
//! 9   3  reserved, zero
//! 12  8  payload length (u64 LE)
//! 20 32  sha256 of payload
//! 52  .. payload: u32 LE json length, json header, parameters LE
//! ```
//!
//! Parameters are written layer by layer, weights row-major then bias.

use std::fs;
use std::path::Path;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{EpochMetrics, EvverConfig, Layer, Model, ModelError, Real};

pub const MODEL_MAGIC: &[u8; 4] = b"EVVM";
pub const MODEL_VERSION: u32 = 1;
const HEADER_LEN: usize = 52;

#[derive(Serialize, Deserialize)]
struct Header {
    config: EvverConfig,
    #[serde(default)]
    training_metrics: Vec<EpochMetrics>,
    #[serde(default)]
    best_epoch: Option<usize>,
}

pub fn save_model<F: Real>(model: &Model<F>, path: &Path) -> Result<(), ModelError> {
    let header = Header { config: model.config.clone(), training_metrics: model.training_metrics.clone(), best_epoch: model.best_epoch };
    let json = serde_json::to_vec(&header).map_err(|e| ModelError::Format(e.to_string()))?;
    let mut payload = Vec::with_capacity(4 + json.len() + model.config.parameter_count() * F::WIDTH as usize);
    payload.extend_from_slice(&(json.len() as u32).to_le_bytes());
    payload.extend_from_slice(&json);
    for v in model.parameters() {
        v.write_le(&mut payload);
    }
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len());
    out.extend_from_slice(MODEL_MAGIC);
    out.extend_from_slice(&MODEL_VERSION.to_le_bytes());
    out.extend_from_slice(&[F::WIDTH, 0, 0, 0]);
    out.extend_from_slice(&(payload.len() as u64).to_le_bytes());
    out.extend_from_slice(&Sha256::digest(&payload));
    out.extend_from_slice(&payload);
    fs::write(path, out)?;
    Ok(())
}

pub fn load_model<F: Real>(path: &Path) -> Result<Model<F>, ModelError> {
    let bytes = fs::read(path)?;
    if bytes.len() < HEADER_LEN {
        return Err(ModelError::Format(format!("{} bytes is shorter than the {HEADER_LEN}-byte header", bytes.len())));
    }
    if &bytes[..4] != MODEL_MAGIC {
        return Err(ModelError::Format("bad magic".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != MODEL_VERSION {
        return Err(ModelError::Version { found: version, expected: MODEL_VERSION });
    }
    if bytes[8] != F::WIDTH {
        return Err(ModelError::Format(format!("file stores {}-byte parameters, caller asked for {}", bytes[8], F::WIDTH)));
    }
    let len = u64::from_le_bytes(bytes[12..20].try_into().unwrap()) as usize;
    let payload = &bytes[HEADER_LEN..];
    if payload.len() != len || Sha256::digest(payload).as_slice() != &bytes[20..52] {
        return Err(ModelError::Checksum);
    }
    let json_len = u32::from_le_bytes(payload[..4].try_into().map_err(|_| ModelError::Format("truncated".into()))?) as usize;
    let json = payload.get(4..4 + json_len).ok_or_else(|| ModelError::Format("truncated header json".into()))?;
    let header: Header = serde_json::from_slice(json).map_err(|e| ModelError::Format(e.to_string()))?;
    header.config.validate()?;

    let mut params = payload[4 + json_len..].chunks_exact(F::WIDTH as usize);
    let expected = header.config.parameter_count();
    if params.len() != expected || !params.remainder().is_empty() {
        return Err(ModelError::Format(format!("expected {expected} parameters, found {}", params.len())));
    }
    let mut layers = Vec::new();
    for (fan_in, fan_out) in header.config.layer_shapes() {
        let w: Vec<F> = params.by_ref().take(fan_in * fan_out).map(F::read_le).collect();
        let b: Vec<F> = params.by_ref().take(fan_out).map(F::read_le).collect();
        layers.push(Layer {
            weights: Array2::from_shape_vec((fan_in, fan_out), w).expect("sized above"),
            bias: Array1::from_vec(b),
        });
    }
    Ok(Model { config: header.config, layers, training_metrics: header.training_metrics, best_epoch: header.best_epoch })
}
