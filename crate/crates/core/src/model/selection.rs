use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{train, EvverConfig, LabeledSet, ModelError};
use crate::seed;
use crate::types::ClassLabel;

/// Mean and (population) standard deviation of per-fold accuracy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvScore {
    pub mean: f64,
    pub std: f64,
    pub fold_accuracies: Vec<f64>,
}

impl CvScore {
    fn from_folds(fold_accuracies: Vec<f64>) -> Self {
        let n = fold_accuracies.len() as f64;
        let mean = fold_accuracies.iter().sum::<f64>() / n;
        let std = (fold_accuracies.iter().map(|a| (a - mean).powi(2)).sum::<f64>() / n).sqrt();
        Self { mean, std, fold_accuracies }
    }
}

/// Splits sample indices into `k` stratified folds. Each class is shuffled
/// and dealt round-robin, continuing from where the previous class stopped
/// so fold sizes differ by at most one.
pub fn stratified_folds(labels: &[ClassLabel], k: usize, seed_v: u64) -> Result<Vec<Vec<usize>>, ModelError> {
    if k < 2 {
        return Err(ModelError::Config("need at least 2 folds".into()));
    }
    if labels.len() < k {
        return Err(ModelError::TooFewSamples { folds: k, samples: labels.len() });
    }
    let mut rng = seed::fork(seed_v, "cv/folds");
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for class in ClassLabel::ALL {
        let mut members: Vec<usize> = labels.iter().enumerate().filter(|(_, l)| **l == class).map(|(i, _)| i).collect();
        if members.is_empty() {
            continue;
        }
        members.shuffle(&mut rng);
        if members.len() < k {
            return Err(ModelError::Stratification { fold: (next + members.len()) % k, class });
        }
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Runs `score(train, held_out)` on every fold and aggregates.
pub fn cross_validate_with<S>(data: &LabeledSet, folds: usize, seed_v: u64, score: S) -> Result<CvScore, ModelError>
where
    S: Fn(&LabeledSet, &LabeledSet) -> Result<f64, ModelError>,
{
    let assignment = stratified_folds(&data.labels, folds, seed_v)?;
    let mut accs = Vec::with_capacity(folds);
    for (f, held) in assignment.iter().enumerate() {
        let train_rows: Vec<usize> = assignment.iter().enumerate().filter(|(g, _)| *g != f).flat_map(|(_, r)| r.iter().copied()).collect();
        accs.push(score(&data.subset(&train_rows), &data.subset(held))?);
    }
    Ok(CvScore::from_folds(accs))
}

/// k-fold accuracy of the classifier described by `config`.
pub fn cross_validate(data: &LabeledSet, config: &EvverConfig, folds: usize, seed_v: u64) -> Result<CvScore, ModelError> {
    cross_validate_with(data, folds, seed_v, |tr, va| {
        let model = train::<f32>(tr, config, None)?;
        let pred = model.predict(va)?;
        Ok(pred.iter().zip(&va.labels).filter(|(p, l)| p == l).count() as f64 / va.len() as f64)
    })
}

/// Hyperparameter grid. `hidden_sizes x layer_counts` expands to
/// homogeneous layer stacks; `hidden_tuples` adds explicit stacks such as
/// `[512, 1024, 1024]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    #[serde(default)]
    pub hidden_sizes: Vec<usize>,
    #[serde(default)]
    pub layer_counts: Vec<usize>,
    #[serde(default)]
    pub hidden_tuples: Vec<Vec<usize>>,
    pub learning_rates: Vec<f64>,
    pub batch_sizes: Vec<usize>,
    pub dropouts: Vec<f64>,
    pub l2s: Vec<f64>,
}

impl GridSpec {
    /// The full published search space (648 points).
    pub fn full() -> Self {
        Self {
            hidden_sizes: vec![512, 1024],
            layer_counts: vec![1, 2, 3],
            hidden_tuples: Vec::new(),
            learning_rates: vec![1e-3, 5e-4, 1e-4, 5e-5],
            batch_sizes: vec![512, 1024, 2048],
            dropouts: vec![0.1, 0.2, 0.25],
            l2s: vec![0.0, 1e-2, 1e-3],
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let homogeneous = !self.hidden_sizes.is_empty() && !self.layer_counts.is_empty();
        if !homogeneous && self.hidden_tuples.is_empty() {
            return Err(ModelError::Config("grid needs hidden_sizes with layer_counts, or hidden_tuples".into()));
        }
        if self.learning_rates.is_empty() || self.batch_sizes.is_empty() || self.dropouts.is_empty() || self.l2s.is_empty() {
            return Err(ModelError::Config("every grid axis must be non-empty".into()));
        }
        Ok(())
    }

    pub fn hidden_stacks(&self) -> Vec<Vec<usize>> {
        let mut out: Vec<Vec<usize>> = Vec::new();
        for &l in &self.layer_counts {
            for &h in &self.hidden_sizes {
                out.push(vec![h; l]);
            }
        }
        for t in &self.hidden_tuples {
            if !out.contains(t) {
                out.push(t.clone());
            }
        }
        out
    }

    pub fn len(&self) -> usize {
        self.hidden_stacks().len() * self.learning_rates.len() * self.batch_sizes.len() * self.dropouts.len() * self.l2s.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Every grid point as a config derived from `base`.
    pub fn expand(&self, base: &EvverConfig) -> Vec<EvverConfig> {
        let mut out = Vec::with_capacity(self.len());
        for hidden in self.hidden_stacks() {
            for &learning_rate in &self.learning_rates {
                for &batch_size in &self.batch_sizes {
                    for &dropout in &self.dropouts {
                        for &l2 in &self.l2s {
                            out.push(EvverConfig { hidden_dims: hidden.clone(), learning_rate, batch_size, dropout, l2, ..base.clone() });
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankedConfig {
    pub config: EvverConfig,
    pub score: CvScore,
    pub parameter_count: usize,
}

/// Cross-validates every grid point (in parallel) and ranks by mean
/// accuracy, then fewer parameters, then lower learning rate.
pub fn grid_search(data: &LabeledSet, grid: &GridSpec, base: &EvverConfig, folds: usize, seed_v: u64) -> Result<Vec<RankedConfig>, ModelError> {
    grid.validate()?;
    let configs = grid.expand(base);
    let mut ranked = configs
        .into_par_iter()
        .map(|config| {
            let score = cross_validate(data, &config, folds, seed_v)?;
            tracing::info!(hidden = ?config.hidden_dims, lr = config.learning_rate, acc = score.mean, "grid point");
            Ok(RankedConfig { parameter_count: config.parameter_count(), config, score })
        })
        .collect::<Result<Vec<_>, ModelError>>()?;
    ranked.sort_by(|a, b| {
        b.score
            .mean
            .total_cmp(&a.score.mean)
            .then(a.parameter_count.cmp(&b.parameter_count))
            .then(a.config.learning_rate.total_cmp(&b.config.learning_rate))
    });
    Ok(ranked)
}
