use ndarray::{Array2, ArrayView2, Axis, Zip};
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::{argmax_label, cross_entropy, EvverConfig, Layer, Model, ModelError, Real};
use crate::seed;
use crate::types::ClassLabel;

/// Feature rows with optional DCS scores and class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSet {
    pub features: Array2<f32>,
    pub dcs: Option<Vec<f32>>,
    pub labels: Vec<ClassLabel>,
}

impl LabeledSet {
    pub fn new(features: Array2<f32>, dcs: Option<Vec<f32>>, labels: Vec<ClassLabel>) -> Result<Self, ModelError> {
        let n = features.nrows();
        if labels.len() != n {
            return Err(ModelError::Misaligned { features: n, labels: labels.len() });
        }
        if let Some(d) = &dcs {
            if d.len() != n {
                return Err(ModelError::Misaligned { features: n, labels: d.len() });
            }
        }
        Ok(Self { features, dcs, labels })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.features.ncols()
    }

    pub fn subset(&self, rows: &[usize]) -> Self {
        Self {
            features: self.features.select(Axis(0), rows),
            dcs: self.dcs.as_ref().map(|d| rows.iter().map(|&i| d[i]).collect()),
            labels: rows.iter().map(|&i| self.labels[i]).collect(),
        }
    }

    pub fn class_counts(&self) -> [usize; 3] {
        let mut c = [0; 3];
        for l in &self.labels {
            c[l.index()] += 1;
        }
        c
    }

    /// DCS column as seen by a model with the given `use_dcs` setting.
    pub(crate) fn dcs_for(&self, use_dcs: bool) -> Option<&[f32]> {
        if use_dcs {
            self.dcs.as_deref()
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub train_loss: f64,
    pub train_accuracy: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_loss: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub validation_accuracy: Option<f64>,
}

struct Adam<F> {
    lr: F,
    beta1: F,
    beta2: F,
    eps: F,
    t: i32,
    m: Vec<Layer<F>>,
    v: Vec<Layer<F>>,
}

impl<F: Real> Adam<F> {
    fn new(lr: f64, layers: &[Layer<F>]) -> Self {
        let zeros = || layers.iter().map(|l| Layer::zeros(l.weights.nrows(), l.weights.ncols())).collect();
        Self { lr: F::of(lr), beta1: F::of(0.9), beta2: F::of(0.999), eps: F::of(1e-8), t: 0, m: zeros(), v: zeros() }
    }

    fn step(&mut self, params: &mut [Layer<F>], grads: &[Layer<F>]) {
        self.t += 1;
        let (b1, b2, eps, lr) = (self.beta1, self.beta2, self.eps, self.lr);
        let c1 = F::one() - b1.powi(self.t);
        let c2 = F::one() - b2.powi(self.t);
        let update = |p: &mut F, g: &F, m: &mut F, v: &mut F| {
            *m = b1 * *m + (F::one() - b1) * *g;
            *v = b2 * *v + (F::one() - b2) * *g * *g;
            let m_hat = *m / c1;
            let v_hat = *v / c2;
            *p -= lr * m_hat / (v_hat.sqrt() + eps);
        };
        for (k, (p, g)) in params.iter_mut().zip(grads).enumerate() {
            Zip::from(&mut p.weights).and(&g.weights).and(&mut self.m[k].weights).and(&mut self.v[k].weights).for_each(update);
            Zip::from(&mut p.bias).and(&g.bias).and(&mut self.m[k].bias).and(&mut self.v[k].bias).for_each(update);
        }
    }
}

fn accuracy<F: Real>(probs: &Array2<F>, labels: &[ClassLabel]) -> f64 {
    let hits = probs.rows().into_iter().zip(labels).filter(|(row, l)| argmax_label(row.as_slice().unwrap_or(&row.to_vec())) == **l).count();
    hits as f64 / labels.len().max(1) as f64
}

fn gather<F: Real>(x: &Array2<F>, rows: &[usize]) -> Array2<F> {
    x.select(Axis(0), rows)
}

/// Trains a classifier with Adam on mean cross-entropy plus an L2 penalty on
/// the weights. Batches are reshuffled every epoch from the config seed; with
/// a validation set, the parameters of the best validation epoch are kept.
pub fn train<F: Real>(data: &LabeledSet, config: &EvverConfig, validation: Option<&LabeledSet>) -> Result<Model<F>, ModelError> {
    config.validate()?;
    if data.is_empty() {
        return Err(ModelError::Empty);
    }
    let mut model = Model::<F>::init(config.clone(), &mut seed::fork(config.seed, "evvernet/init"))?;
    let x: Array2<F> = model.assemble(data.features.view(), data.dcs_for(config.use_dcs))?;
    let x_val = validation.map(|v| model.assemble(v.features.view(), v.dcs_for(config.use_dcs))).transpose()?;

    let mut shuffle_rng = seed::fork(config.seed, "evvernet/shuffle");
    let mut dropout_rng = seed::fork(config.seed, "evvernet/dropout");
    let mut adam = Adam::new(config.learning_rate, &model.layers);
    let mut order: Vec<usize> = (0..data.len()).collect();
    let mut best: Option<(f64, usize, Vec<Layer<F>>)> = None;

    for epoch in 0..config.max_epochs {
        order.shuffle(&mut shuffle_rng);
        let (mut loss_sum, mut hits) = (0.0, 0usize);
        for (batch, rows) in order.chunks(config.batch_size).enumerate() {
            let xb = gather(&x, rows);
            let labels: Vec<ClassLabel> = rows.iter().map(|&i| data.labels[i]).collect();
            let cache = model.forward_cached(&xb, Some((config.dropout, &mut dropout_rng)));
            let (loss, grads) = model.backward(&cache, &labels, config.l2);
            let loss = loss.f64();
            if !loss.is_finite() {
                return Err(ModelError::NonFinite { epoch, batch, loss });
            }
            loss_sum += loss * rows.len() as f64;
            hits += (accuracy(&cache.probs, &labels) * rows.len() as f64).round() as usize;
            adam.step(&mut model.layers, &grads);
        }
        let mut metrics = EpochMetrics {
            epoch,
            train_loss: loss_sum / data.len() as f64,
            train_accuracy: hits as f64 / data.len() as f64,
            validation_loss: None,
            validation_accuracy: None,
        };
        if let (Some(xv), Some(v)) = (&x_val, validation) {
            let probs = model.forward_inputs(xv);
            let acc = accuracy(&probs, &v.labels);
            metrics.validation_loss = Some(cross_entropy(&probs, &v.labels).f64());
            metrics.validation_accuracy = Some(acc);
            if best.as_ref().is_none_or(|(b, _, _)| acc > *b) {
                best = Some((acc, epoch, model.layers.clone()));
            }
        }
        tracing::debug!(epoch, loss = metrics.train_loss, acc = metrics.train_accuracy, "epoch");
        model.training_metrics.push(metrics);
    }
    if let Some((_, epoch, layers)) = best {
        model.layers = layers;
        model.best_epoch = Some(epoch);
    }
    Ok(model)
}

impl<F: Real> Model<F> {
    /// Predicted labels for every row of `set`.
    pub fn predict(&self, set: &LabeledSet) -> Result<Vec<ClassLabel>, ModelError> {
        let probs = self.predict_proba(set.features.view(), set.dcs_for(self.config.use_dcs))?;
        Ok(probs.rows().into_iter().map(|r| argmax_label(&r.to_vec())).collect())
    }

    pub fn predict_view(&self, features: ArrayView2<'_, f32>, dcs: Option<&[f32]>) -> Result<Vec<ClassLabel>, ModelError> {
        let probs = self.predict_proba(features, dcs)?;
        Ok(probs.rows().into_iter().map(|r| argmax_label(&r.to_vec())).collect())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::model::Real;
    use rand::Rng;
    use rand_distr::{Distribution, StandardNormal};

    /// Three isotropic Gaussian clusters, centres `separation` apart along
    /// distinct axes.
    pub fn clusters(per_class: usize, dim: usize, separation: f32, seed_v: u64) -> LabeledSet {
        let mut rng = seed::fork(seed_v, "clusters");
        let n = per_class * 3;
        let mut features = Array2::zeros((n, dim));
        let mut labels = Vec::with_capacity(n);
        for c in 0..3 {
            for i in 0..per_class {
                let row = c * per_class + i;
                for j in 0..dim {
                    let z: f32 = StandardNormal.sample(&mut rng);
                    features[[row, j]] = z + if j == c { separation } else { 0.0 };
                }
                labels.push(ClassLabel::ALL[c]);
            }
        }
        let dcs = Some((0..n).map(|_| rng.gen::<f32>()).collect());
        LabeledSet::new(features, dcs, labels).unwrap()
    }

    fn small_config(dim: usize) -> EvverConfig {
        let mut c = EvverConfig::new(dim, vec![16]);
        c.batch_size = 32;
        c.max_epochs = 30;
        c.learning_rate = 1e-2;
        c
    }

    #[test]
    fn separable_clusters_are_learned() {
        let data = clusters(200, 16, 5.0, 42);
        let mut cfg = small_config(16);
        cfg.learning_rate = 1e-3;
        cfg.max_epochs = 200;
        let model = train::<f32>(&data, &cfg, None).unwrap();
        let pred = model.predict(&data).unwrap();
        let acc = pred.iter().zip(&data.labels).filter(|(a, b)| a == b).count() as f64 / data.len() as f64;
        assert!(acc >= 0.99, "train accuracy {acc}");
        assert_eq!(model.training_metrics.len(), 200);
    }

    #[test]
    fn zero_learning_rate_leaves_parameters() {
        let data = clusters(20, 4, 3.0, 1);
        let mut cfg = small_config(4);
        cfg.learning_rate = 0.0;
        cfg.dropout = 0.2;
        let trained = train::<f32>(&data, &cfg, None).unwrap();
        let init = Model::<f32>::init(cfg.clone(), &mut seed::fork(cfg.seed, "evvernet/init")).unwrap();
        assert_eq!(trained.layers, init.layers);
    }

    #[test]
    fn same_seed_same_bits() {
        let data = clusters(30, 6, 2.0, 7);
        let mut cfg = small_config(6);
        cfg.dropout = 0.25;
        cfg.l2 = 1e-3;
        let a = train::<f32>(&data, &cfg, None).unwrap();
        let b = train::<f32>(&data, &cfg, None).unwrap();
        let bits = |m: &Model<f32>| m.parameters().map(|v| v.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        cfg.seed += 1;
        let c = train::<f32>(&data, &cfg, None).unwrap();
        assert_ne!(bits(&a), bits(&c));
    }

    #[test]
    fn best_validation_epoch_is_kept() {
        let data = clusters(30, 4, 3.0, 3);
        let val = clusters(10, 4, 3.0, 4);
        let cfg = small_config(4);
        let model = train::<f32>(&data, &cfg, Some(&val)).unwrap();
        let best = model.best_epoch.unwrap();
        let best_acc = model.training_metrics[best].validation_accuracy.unwrap();
        assert!(model.training_metrics.iter().all(|m| m.validation_accuracy.unwrap() <= best_acc));
        let pred = model.predict(&val).unwrap();
        let acc = pred.iter().zip(&val.labels).filter(|(a, b)| a == b).count() as f64 / val.len() as f64;
        assert!((acc - best_acc).abs() < 1e-12);
    }

    #[test]
    fn diverging_run_reports_epoch_and_batch() {
        let mut data = clusters(10, 3, 1.0, 5);
        data.features[[4, 1]] = f32::NAN;
        let err = train::<f32>(&data, &small_config(3), None).unwrap_err();
        assert!(matches!(err, ModelError::NonFinite { epoch: 0, .. }), "{err}");
    }

    #[test]
    fn stronger_l2_shrinks_weights() {
        let data = clusters(60, 8, 3.0, 42);
        let mut cfg = small_config(8);
        cfg.max_epochs = 40;
        let norms: Vec<f64> = [0.0, 1e-3, 1e-2, 1e-1]
            .into_iter()
            .map(|l2| {
                cfg.l2 = l2;
                train::<f32>(&data, &cfg, None).unwrap().weight_norm_sq().f64()
            })
            .collect();
        assert!(norms.windows(2).all(|w| w[1] <= w[0]), "{norms:?}");
    }

    #[test]
    fn requires_dcs_when_configured() {
        let mut data = clusters(5, 3, 1.0, 5);
        data.dcs = None;
        let mut cfg = small_config(3);
        cfg.use_dcs = true;
        assert!(matches!(train::<f32>(&data, &cfg, None), Err(ModelError::DcsMismatch { model: true })));
    }
}
