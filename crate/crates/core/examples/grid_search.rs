//! Cross-validated grid search over a small space. `GridSpec::full()` is the
//! 648-point space used at full scale.
//!
//! cargo run --release --example grid_search

use ndarray::Array2;
use rand::Rng;

use evver::model::{grid_search, EvverConfig, GridSpec, LabeledSet};
use evver::types::ClassLabel;

fn main() -> anyhow::Result<()> {
    let mut rng = evver::seed::fork(42, "example/grid");
    let n = 300;
    let mut x = Array2::<f32>::zeros((n, 12));
    let mut labels = Vec::new();
    for r in 0..n {
        let c = r % 3;
        for j in 0..12 {
            x[[r, j]] = rng.gen_range(-1.0..1.0) + if j % 3 == c { 0.8 } else { 0.0 };
        }
        labels.push(ClassLabel::ALL[c]);
    }
    let data = LabeledSet::new(x, None, labels)?;

    let grid = GridSpec {
        hidden_sizes: vec![8, 32],
        layer_counts: vec![1, 2],
        hidden_tuples: vec![vec![8, 32, 32]],
        learning_rates: vec![1e-2, 1e-3],
        batch_sizes: vec![32],
        dropouts: vec![0.0, 0.2],
        l2s: vec![0.0, 1e-3],
    };
    println!("full space: {} points; this run: {}", GridSpec::full().len(), grid.len());
    let mut base = EvverConfig::new(12, vec![8]);
    base.max_epochs = 20;
    let ranked = grid_search(&data, &grid, &base, 3, 42)?;
    for r in ranked.iter().take(5) {
        println!(
            "{:.3} ± {:.3}  hidden {:?} lr {} dropout {} l2 {}",
            r.score.mean, r.score.std, r.config.hidden_dims, r.config.learning_rate, r.config.dropout, r.config.l2
        );
    }
    Ok(())
}
