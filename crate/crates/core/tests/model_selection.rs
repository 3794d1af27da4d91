use ndarray::Array2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use evver::metrics::evaluate;
use evver::model::{grid_search, EvverConfig, GridSpec, LabeledSet};
use evver::types::ClassLabel;

fn separable(per_class: usize, seed: u64) -> LabeledSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = per_class * 3;
    let mut x = Array2::zeros((n, 8));
    let mut labels = Vec::new();
    for r in 0..n {
        for j in 0..8 {
            let z: f32 = StandardNormal.sample(&mut rng);
            x[[r, j]] = z + if j == r % 3 { 5.0 } else { 0.0 };
        }
        labels.push(ClassLabel::ALL[r % 3]);
    }
    LabeledSet::new(x, None, labels).unwrap()
}

#[test]
fn full_grid_cardinality() {
    let grid = GridSpec::full();
    assert_eq!(grid.len(), 2 * 3 * 4 * 3 * 3 * 3);
    assert_eq!(grid.expand(&EvverConfig::new(768, vec![512])).len(), 648);
}

#[test]
fn stable_learning_rate_ranks_first() {
    let data = separable(40, 42);
    // wide enough that Adam steps of 0.1 overshoot
    let mut base = EvverConfig::new(8, vec![64, 64]);
    base.max_epochs = 200;
    let grid = GridSpec {
        hidden_sizes: vec![64],
        layer_counts: vec![2],
        hidden_tuples: vec![],
        learning_rates: vec![1e-1, 1e-3],
        batch_sizes: vec![16],
        dropouts: vec![0.0],
        l2s: vec![0.0],
    };
    let ranked = grid_search(&data, &grid, &base, 3, 42).unwrap();
    assert_eq!(ranked.len(), 2);
    assert_eq!(ranked[0].config.learning_rate, 1e-3, "{:?}", ranked.iter().map(|r| r.score.mean).collect::<Vec<_>>());
    // a strict win, not the lower-lr tie-break
    assert!(ranked[0].score.mean > ranked[1].score.mean);
}

#[test]
fn uniform_random_predictions_are_at_chance() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let truth: Vec<ClassLabel> = (0..10_000).map(|i| ClassLabel::ALL[i % 3]).collect();
    let pred: Vec<ClassLabel> = (0..10_000).map(|_| ClassLabel::ALL[rng.gen_range(0..3)]).collect();
    let r = evaluate(&pred, &truth);
    assert!((r.accuracy - 1.0 / 3.0).abs() <= 0.05, "{}", r.accuracy);
}
