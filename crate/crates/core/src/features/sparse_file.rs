//! Sparse feature matrix file written by `featurize`.
//!
//! Header: magic "EVSF", version u32, rows u32, dim u32 (all LE). Each row is
//! `nnz: u32`, then `nnz` u32 column indices, then `nnz` f32 values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use thiserror::Error;

use super::SparseVector;

const MAGIC: [u8; 4] = *b"EVSF";
const VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum SparseFileError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("not a sparse feature file (magic {0:?})")]
    Magic([u8; 4]),
    #[error("unsupported sparse feature file version {0}")]
    Version(u32),
    #[error("row {row}: column {col} out of range for dim {dim}")]
    Column { row: usize, col: u32, dim: u32 },
}

pub fn write_sparse_matrix(path: &Path, rows: &[SparseVector<f64>], dim: usize) -> Result<(), SparseFileError> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&MAGIC)?;
    for word in [VERSION, rows.len() as u32, dim as u32] {
        w.write_all(&word.to_le_bytes())?;
    }
    for row in rows {
        w.write_all(&(row.nnz() as u32).to_le_bytes())?;
        for &i in &row.indices {
            w.write_all(&(i as u32).to_le_bytes())?;
        }
        for &v in &row.values {
            w.write_all(&(v as f32).to_le_bytes())?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn read_sparse_matrix(path: &Path) -> Result<(Vec<SparseVector<f64>>, usize), SparseFileError> {
    let mut r = BufReader::new(File::open(path)?);
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    if word != MAGIC {
        return Err(SparseFileError::Magic(word));
    }
    let mut next = |r: &mut BufReader<File>| -> std::io::Result<u32> {
        r.read_exact(&mut word)?;
        Ok(u32::from_le_bytes(word))
    };
    let version = next(&mut r)?;
    if version != VERSION {
        return Err(SparseFileError::Version(version));
    }
    let rows = next(&mut r)? as usize;
    let dim = next(&mut r)?;
    let mut out = Vec::with_capacity(rows);
    for row in 0..rows {
        let nnz = next(&mut r)? as usize;
        let mut indices = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            let col = next(&mut r)?;
            if col >= dim {
                return Err(SparseFileError::Column { row, col, dim });
            }
            indices.push(col as usize);
        }
        let mut values = Vec::with_capacity(nnz);
        for _ in 0..nnz {
            values.push(f32::from_bits(next(&mut r)?) as f64);
        }
        out.push(SparseVector { dim: dim as usize, indices, values });
    }
    Ok((out, dim as usize))
}
