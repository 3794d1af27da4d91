//! Train the evidence classifier on synthetic embeddings with and without
//! the domain score, then save and reload the model.
//!
//! cargo run --release --example train_evvernet

use ndarray::Array2;
use rand::Rng;

use evver::metrics::evaluate;
use evver::model::{load_model, save_model, train, EvverConfig, LabeledSet, Model};
use evver::types::ClassLabel;

/// Labels weakly visible in the embedding, strongly in the domain score.
fn synthetic(n: usize, seed: u64) -> LabeledSet {
    let mut rng = evver::seed::fork(seed, "example/data");
    let dim = 32;
    let mut x = Array2::<f32>::zeros((n, dim));
    let mut dcs = Vec::new();
    let mut labels = Vec::new();
    for r in 0..n {
        let c = rng.gen_range(0..3);
        for j in 0..dim {
            x[[r, j]] = rng.gen_range(-1.0..1.0) + if j == c { 0.6 } else { 0.0 };
        }
        dcs.push(((c as f32 + rng.gen_range(0.0..1.0)) / 3.0).clamp(0.0, 1.0));
        labels.push(ClassLabel::ALL[c]);
    }
    LabeledSet::new(x, Some(dcs), labels).expect("aligned")
}

fn main() -> anyhow::Result<()> {
    let train_set = synthetic(1500, 1);
    let val = synthetic(300, 2);
    let test = synthetic(600, 3);

    let mut cfg = EvverConfig::new(32, vec![64]);
    cfg.learning_rate = 1e-3;
    cfg.batch_size = 64;
    cfg.max_epochs = 60;
    cfg.dropout = 0.1;

    for use_dcs in [false, true] {
        cfg.use_dcs = use_dcs;
        let model: Model<f32> = train(&train_set, &cfg, Some(&val))?;
        let report = evaluate(&model.predict(&test)?, &test.labels);
        println!("use_dcs={use_dcs}: best epoch {:?}", model.best_epoch);
        print!("{}", report.render());

        let dir = tempfile::tempdir()?;
        let path = dir.path().join("model.evver");
        save_model(&model, &path)?;
        let back: Model<f32> = load_model(&path)?;
        assert_eq!(back, model);
    }
    Ok(())
}
