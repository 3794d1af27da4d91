//! Write and read the embedding matrix format and the sparse feature format.
//!
//! cargo run --example embeddings_io

use evver::features::{load_embeddings, read_sparse_matrix, save_embeddings, write_sparse_matrix, EmbeddingSet, Pooling, SparseVector};

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;
    let path = dir.path().join("titles.bin");
    let set = EmbeddingSet::new(
        "deberta-v3-base",
        Pooling::Cls,
        4,
        vec!["a1".into(), "a2".into()],
        vec![vec![0.25, -1.0, 3.5, 0.0], vec![1.0, 1.0, -2.0, 0.5]],
    )?;
    save_embeddings(&set, &path)?;
    let bytes = std::fs::read(&path)?;
    println!("{} bytes, header {:02x?}", bytes.len(), &bytes[..16]);
    println!("{}", std::fs::read_to_string(dir.path().join("titles.bin.manifest.json"))?);
    let back = load_embeddings(&path)?;
    println!("a2 -> {:?}", back.get("a2").unwrap());

    std::fs::write(&path, &bytes[..bytes.len() - 3])?;
    println!("truncated: {}", load_embeddings(&path).unwrap_err());

    let rows = vec![SparseVector::from_dense(&[0.0, 0.6, 0.8]), SparseVector::zeros(3)];
    let fpath = dir.path().join("feats.bin");
    write_sparse_matrix(&fpath, &rows, 3)?;
    let (rows_back, dim) = read_sparse_matrix(&fpath)?;
    println!("sparse: {} rows x {dim}, first {:?}", rows_back.len(), rows_back[0].to_dense());
    Ok(())
}
