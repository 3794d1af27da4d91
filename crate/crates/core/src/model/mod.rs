//! The evidence classifier: an MLP over a text embedding, optionally
//! concatenated with the domain credibility scalar.
//!
//! ```text
//! x  = [embedding ; s]            (s only when use_dcs)
//! h1 = GELU(x W0 + b0)
//! hk = GELU(h(k-1) Wk + bk)      (deeper variants)
//! y  = softmax(h_last W_out + b_out)
//! ```
//!
//! Parameters are generic over [`Real`]: `f32` for training and inference,
//! `f64` for gradient verification.

mod gradcheck;
mod io;
mod selection;
mod train;

use std::fmt::Debug;

use ndarray::{Array1, Array2, ArrayView2, Axis};
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::ClassLabel;

pub use gradcheck::{grad_check, relative_error, GradCheckReport};
pub use io::{load_model, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use selection::{cross_validate, cross_validate_with, grid_search, stratified_folds, CvScore, GridSpec, RankedConfig};
pub use train::{train, EpochMetrics, LabeledSet};

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("invalid config: {0}")]
    Config(String),
    #[error("input dimension mismatch: model expects {expected} features, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("model was trained with use_dcs={model}, but dcs {}", if *.model { "was not supplied" } else { "was supplied" })]
    DcsMismatch { model: bool },
    #[error("dcs score {0} outside [0, 1]")]
    DcsRange(f64),
    #[error("dataset is empty")]
    Empty,
    #[error("dataset has {features} feature rows but {labels} labels")]
    Misaligned { features: usize, labels: usize },
    #[error("non-finite loss {loss} at epoch {epoch}, batch {batch}")]
    NonFinite { epoch: usize, batch: usize, loss: f64 },
    #[error("need at least {folds} samples for {folds}-fold cross-validation, got {samples}")]
    TooFewSamples { folds: usize, samples: usize },
    #[error("stratification failed: class {class} absent from fold {fold}")]
    Stratification { fold: usize, class: ClassLabel },
    #[error("model file: {0}")]
    Format(String),
    #[error("model file checksum mismatch")]
    Checksum,
    #[error("model file version {found}, expected {expected}")]
    Version { found: u32, expected: u32 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Float type the network can run in.
pub trait Real:
    num_traits::Float
    + num_traits::FromPrimitive
    + ndarray::LinalgScalar
    + ndarray::ScalarOperand
    + std::ops::AddAssign
    + std::ops::SubAssign
    + std::ops::MulAssign
    + std::ops::DivAssign
    + Debug
    + Send
    + Sync
    + 'static
{
    /// Bytes per value in the model file.
    const WIDTH: u8;
    fn write_le(self, out: &mut Vec<u8>);
    fn read_le(bytes: &[u8]) -> Self;

    fn of(v: f64) -> Self {
        <Self as num_traits::FromPrimitive>::from_f64(v).expect("finite conversion")
    }
    fn f64(self) -> f64 {
        num_traits::ToPrimitive::to_f64(&self).expect("float to f64")
    }
}

impl Real for f32 {
    const WIDTH: u8 = 4;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f32::from_le_bytes(bytes.try_into().expect("4 bytes"))
    }
}

impl Real for f64 {
    const WIDTH: u8 = 8;
    fn write_le(self, out: &mut Vec<u8>) {
        out.extend_from_slice(&self.to_le_bytes());
    }
    fn read_le(bytes: &[u8]) -> Self {
        f64::from_le_bytes(bytes.try_into().expect("8 bytes"))
    }
}

const FRAC_1_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Exact GELU: `x * Phi(x)`.
pub fn gelu(x: f64) -> f64 {
    0.5 * x * (1.0 + libm::erf(x * std::f64::consts::FRAC_1_SQRT_2))
}

/// `d/dx GELU(x) = Phi(x) + x * phi(x)`.
pub fn gelu_grad(x: f64) -> f64 {
    let cdf = 0.5 * (1.0 + libm::erf(x * std::f64::consts::FRAC_1_SQRT_2));
    cdf + x * FRAC_1_SQRT_2PI * (-0.5 * x * x).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvverConfig {
    pub input_dim: usize,
    pub hidden_dims: Vec<usize>,
    #[serde(default)]
    pub use_dcs: bool,
    #[serde(default)]
    pub dropout: f64,
    #[serde(default)]
    pub l2: f64,
    #[serde(default = "default_lr")]
    pub learning_rate: f64,
    #[serde(default = "default_batch")]
    pub batch_size: usize,
    #[serde(default = "default_epochs")]
    pub max_epochs: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn default_lr() -> f64 {
    1e-3
}
fn default_batch() -> usize {
    1024
}
fn default_epochs() -> usize {
    50
}
fn default_seed() -> u64 {
    crate::seed::DEFAULT_SEED
}

impl EvverConfig {
    pub fn new(input_dim: usize, hidden_dims: Vec<usize>) -> Self {
        Self {
            input_dim,
            hidden_dims,
            use_dcs: false,
            dropout: 0.0,
            l2: 0.0,
            learning_rate: default_lr(),
            batch_size: default_batch(),
            max_epochs: default_epochs(),
            seed: default_seed(),
        }
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        let fail = |m: &str| Err(ModelError::Config(m.to_string()));
        if self.input_dim == 0 {
            return fail("input_dim must be positive");
        }
        if self.hidden_dims.is_empty() || self.hidden_dims.contains(&0) {
            return fail("hidden_dims must be non-empty with positive sizes");
        }
        if !(0.0..1.0).contains(&self.dropout) {
            return fail("dropout must lie in [0, 1)");
        }
        if !(self.l2 >= 0.0) {
            return fail("l2 must be >= 0");
        }
        if !(self.learning_rate >= 0.0) || !self.learning_rate.is_finite() {
            return fail("learning_rate must be finite and non-negative");
        }
        if self.batch_size == 0 {
            return fail("batch_size must be positive");
        }
        Ok(())
    }

    /// Width of the first layer's input.
    pub fn network_input_dim(&self) -> usize {
        self.input_dim + usize::from(self.use_dcs)
    }

    /// `(fan_in, fan_out)` for every affine layer, classifier last.
    pub fn layer_shapes(&self) -> Vec<(usize, usize)> {
        let mut dims = vec![self.network_input_dim()];
        dims.extend(&self.hidden_dims);
        dims.push(ClassLabel::COUNT);
        dims.windows(2).map(|w| (w[0], w[1])).collect()
    }

    pub fn parameter_count(&self) -> usize {
        self.layer_shapes().iter().map(|(i, o)| i * o + o).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer<F> {
    /// `fan_in x fan_out`.
    pub weights: Array2<F>,
    pub bias: Array1<F>,
}

impl<F: Real> Layer<F> {
    pub fn zeros(fan_in: usize, fan_out: usize) -> Self {
        Self { weights: Array2::zeros((fan_in, fan_out)), bias: Array1::zeros(fan_out) }
    }
}

/// Trained classifier parameters plus the config and training history.
#[derive(Debug, Clone, PartialEq)]
pub struct Model<F> {
    pub config: EvverConfig,
    pub layers: Vec<Layer<F>>,
    pub training_metrics: Vec<EpochMetrics>,
    pub best_epoch: Option<usize>,
}

pub type EvverModel = Model<f32>;

/// Activations kept for the backward pass.
pub(crate) struct ForwardCache<F> {
    /// Input to each affine layer (after GELU and dropout for hidden ones).
    pub inputs: Vec<Array2<F>>,
    /// Pre-activations of the hidden layers.
    pub pre: Vec<Array2<F>>,
    /// Inverted-dropout masks per hidden layer.
    pub masks: Vec<Option<Array2<F>>>,
    pub probs: Array2<F>,
}

impl<F: Real> Model<F> {
    /// All-zero parameters with the shapes implied by `config`.
    pub fn zeros(config: EvverConfig) -> Result<Self, ModelError> {
        config.validate()?;
        let layers = config.layer_shapes().into_iter().map(|(i, o)| Layer::zeros(i, o)).collect();
        Ok(Self { config, layers, training_metrics: Vec::new(), best_epoch: None })
    }

    /// Glorot-uniform weights, zero biases.
    pub fn init<R: Rng>(config: EvverConfig, rng: &mut R) -> Result<Self, ModelError> {
        let mut model = Self::zeros(config)?;
        for layer in &mut model.layers {
            let (fan_in, fan_out) = layer.weights.dim();
            let limit = (6.0 / (fan_in + fan_out) as f64).sqrt();
            layer.weights.mapv_inplace(|_| F::of(rng.gen_range(-limit..limit)));
        }
        Ok(model)
    }

    pub fn input_dim(&self) -> usize {
        self.config.input_dim
    }

    pub fn parameters(&self) -> impl Iterator<Item = &F> {
        self.layers.iter().flat_map(|l| l.weights.iter().chain(l.bias.iter()))
    }

    /// Sum of squared weights (biases excluded), the L2 penalty base.
    pub fn weight_norm_sq(&self) -> F {
        self.layers.iter().map(|l| l.weights.iter().map(|w| *w * *w).fold(F::zero(), |a, b| a + b)).fold(F::zero(), |a, b| a + b)
    }

    /// Builds network inputs from raw features and optional DCS scores.
    pub fn assemble(&self, features: ArrayView2<'_, f32>, dcs: Option<&[f32]>) -> Result<Array2<F>, ModelError> {
        let (n, d) = features.dim();
        if d != self.config.input_dim {
            return Err(ModelError::Dimension { expected: self.config.input_dim, actual: d });
        }
        match (self.config.use_dcs, dcs) {
            (true, None) => return Err(ModelError::DcsMismatch { model: true }),
            (false, Some(_)) => return Err(ModelError::DcsMismatch { model: false }),
            _ => {}
        }
        let mut x = Array2::zeros((n, self.config.network_input_dim()));
        x.slice_mut(ndarray::s![.., ..d]).assign(&features.mapv(|v| F::of(v as f64)));
        if let Some(scores) = dcs {
            if scores.len() != n {
                return Err(ModelError::Misaligned { features: n, labels: scores.len() });
            }
            for (i, &s) in scores.iter().enumerate() {
                if !(0.0..=1.0).contains(&s) {
                    return Err(ModelError::DcsRange(s as f64));
                }
                x[[i, d]] = F::of(s as f64);
            }
        }
        Ok(x)
    }

    /// Forward pass on prepared inputs. Dropout is off.
    pub fn forward_inputs(&self, x: &Array2<F>) -> Array2<F> {
        let mut h = x.clone();
        let last = self.layers.len() - 1;
        for (i, layer) in self.layers.iter().enumerate() {
            let z = h.dot(&layer.weights) + &layer.bias;
            h = if i == last { z } else { z.mapv(|v| F::of(gelu(v.f64()))) };
        }
        softmax_rows(h)
    }

    /// Class probabilities for a batch of feature rows.
    pub fn predict_proba(&self, features: ArrayView2<'_, f32>, dcs: Option<&[f32]>) -> Result<Array2<F>, ModelError> {
        Ok(self.forward_inputs(&self.assemble(features, dcs)?))
    }

    /// Probabilities for a single item.
    pub fn forward(&self, features: &[f32], dcs: Option<f32>) -> Result<[F; 3], ModelError> {
        let view = ArrayView2::from_shape((1, features.len()), features).expect("row view");
        let dcs_buf = dcs.map(|s| [s]);
        let p = self.predict_proba(view, dcs_buf.as_ref().map(|b| &b[..]))?;
        Ok([p[[0, 0]], p[[0, 1]], p[[0, 2]]])
    }

    pub(crate) fn forward_cached<R: Rng>(&self, x: &Array2<F>, dropout: Option<(f64, &mut R)>) -> ForwardCache<F> {
        let last = self.layers.len() - 1;
        let mut inputs = vec![x.clone()];
        let mut pre = Vec::with_capacity(last);
        let mut masks = Vec::with_capacity(last);
        let mut dropout = dropout.filter(|(p, _)| *p > 0.0);
        let mut logits = None;
        for (i, layer) in self.layers.iter().enumerate() {
            let z = inputs[i].dot(&layer.weights) + &layer.bias;
            if i == last {
                logits = Some(z);
                break;
            }
            let mut a = z.mapv(|v| F::of(gelu(v.f64())));
            let mask = dropout.as_mut().map(|(p, rng)| {
                let keep = 1.0 - *p;
                let scale = F::of(1.0 / keep);
                Array2::from_shape_fn(a.dim(), |_| if rng.gen::<f64>() < keep { scale } else { F::zero() })
            });
            if let Some(m) = &mask {
                a *= m;
            }
            pre.push(z);
            masks.push(mask);
            inputs.push(a);
        }
        ForwardCache { inputs, pre, masks, probs: softmax_rows(logits.expect("at least one layer")) }
    }

    /// Mean cross-entropy plus `l2 * sum(W^2)` and its gradient for every
    /// parameter, on prepared inputs without dropout.
    pub fn loss_and_gradients(&self, x: &Array2<F>, labels: &[ClassLabel], l2: f64) -> (F, Vec<Layer<F>>) {
        let cache = self.forward_cached::<rand_chacha::ChaCha8Rng>(x, None);
        self.backward(&cache, labels, l2)
    }

    /// Loss only; the objective the gradients differentiate.
    pub fn loss(&self, x: &Array2<F>, labels: &[ClassLabel], l2: f64) -> F {
        let probs = self.forward_inputs(x);
        cross_entropy(&probs, labels) + F::of(l2) * self.weight_norm_sq()
    }

    pub(crate) fn backward(&self, cache: &ForwardCache<F>, labels: &[ClassLabel], l2: f64) -> (F, Vec<Layer<F>>) {
        let n = labels.len();
        let loss = cross_entropy(&cache.probs, labels) + F::of(l2) * self.weight_norm_sq();
        let inv_n = F::of(1.0 / n as f64);
        let mut delta = cache.probs.clone();
        for (i, label) in labels.iter().enumerate() {
            delta[[i, label.index()]] -= F::one();
        }
        delta *= inv_n;

        let two_l2 = F::of(2.0 * l2);
        let mut grads: Vec<Layer<F>> = Vec::with_capacity(self.layers.len());
        for k in (0..self.layers.len()).rev() {
            let layer = &self.layers[k];
            let mut gw = cache.inputs[k].t().dot(&delta);
            if l2 > 0.0 {
                gw.scaled_add(two_l2, &layer.weights);
            }
            let gb = delta.sum_axis(Axis(0));
            if k > 0 {
                let mut da = delta.dot(&layer.weights.t());
                if let Some(mask) = &cache.masks[k - 1] {
                    da *= mask;
                }
                let dgelu = cache.pre[k - 1].mapv(|v| F::of(gelu_grad(v.f64())));
                delta = da * dgelu;
            }
            grads.push(Layer { weights: gw, bias: gb });
        }
        grads.reverse();
        (loss, grads)
    }
}

pub(crate) fn softmax_rows<F: Real>(mut z: Array2<F>) -> Array2<F> {
    for mut row in z.rows_mut() {
        let max = row.iter().fold(F::neg_infinity(), |m, &v| m.max(v));
        row.mapv_inplace(|v| (v - max).exp());
        let sum = row.iter().fold(F::zero(), |a, &b| a + b);
        row.mapv_inplace(|v| v / sum);
    }
    z
}

pub(crate) fn cross_entropy<F: Real>(probs: &Array2<F>, labels: &[ClassLabel]) -> F {
    let tiny = F::min_positive_value();
    let total = labels.iter().enumerate().map(|(i, l)| {
            let p = probs[[i, l.index()]];
            // NaN must survive so divergence is detected
            -(if p < tiny { tiny } else { p }).ln()
        }).fold(F::zero(), |a, b| a + b);
    total / F::of(labels.len() as f64)
}

/// Argmax over class probabilities; ties go to the lowest class code.
pub fn argmax_label<F: PartialOrd + Copy>(probs: &[F]) -> ClassLabel {
    let mut best = 0;
    for i in 1..probs.len() {
        if probs[i] > probs[best] {
            best = i;
        }
    }
    ClassLabel::ALL[best]
}
