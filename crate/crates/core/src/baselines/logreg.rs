use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{check_rows, BaselineError};
use crate::features::SparseVector;
use crate::model::argmax_label;
use crate::seed;
use crate::types::ClassLabel;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogRegParams {
    pub l2: f64,
    pub learning_rate: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for LogRegParams {
    fn default() -> Self {
        Self { l2: 1e-4, learning_rate: 0.5, epochs: 200, seed: seed::DEFAULT_SEED }
    }
}

/// Softmax regression. `weights` is `dim x 3`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogReg {
    pub dim: usize,
    pub weights: Vec<f64>,
    pub bias: [f64; 3],
}

impl LogReg {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, weights: vec![0.0; dim * 3], bias: [0.0; 3] }
    }

    pub fn logits(&self, x: &SparseVector<f64>) -> [f64; 3] {
        let mut z = self.bias;
        for (i, v) in x.iter() {
            for c in 0..3 {
                z[c] += v * self.weights[i * 3 + c];
            }
        }
        z
    }

    pub fn probabilities(&self, x: &SparseVector<f64>) -> [f64; 3] {
        let z = self.logits(x);
        let m = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let e = z.map(|v| (v - m).exp());
        let s: f64 = e.iter().sum();
        e.map(|v| v / s)
    }

    pub fn predict(&self, x: &SparseVector<f64>) -> ClassLabel {
        argmax_label(&self.probabilities(x))
    }

    /// Mean cross-entropy plus `l2 * sum(W^2)`.
    pub fn loss(&self, xs: &[SparseVector<f64>], labels: &[ClassLabel], l2: f64) -> f64 {
        let ce: f64 = xs.iter().zip(labels).map(|(x, l)| -self.probabilities(x)[l.index()].max(f64::MIN_POSITIVE).ln()).sum();
        ce / xs.len() as f64 + l2 * self.weights.iter().map(|w| w * w).sum::<f64>()
    }

    /// Loss with gradients for weights and bias.
    pub fn loss_and_gradient(&self, xs: &[SparseVector<f64>], labels: &[ClassLabel], l2: f64) -> (f64, Vec<f64>, [f64; 3]) {
        let n = xs.len() as f64;
        let mut gw: Vec<f64> = self.weights.iter().map(|w| 2.0 * l2 * w).collect();
        let mut gb = [0.0; 3];
        let mut ce = 0.0;
        for (x, l) in xs.iter().zip(labels) {
            let mut p = self.probabilities(x);
            ce -= p[l.index()].max(f64::MIN_POSITIVE).ln();
            p[l.index()] -= 1.0;
            for c in 0..3 {
                gb[c] += p[c] / n;
            }
            for (i, v) in x.iter() {
                for c in 0..3 {
                    gw[i * 3 + c] += v * p[c] / n;
                }
            }
        }
        let loss = ce / n + l2 * self.weights.iter().map(|w| w * w).sum::<f64>();
        (loss, gw, gb)
    }
}

/// Full-batch gradient descent; returns the model and the loss before each step.
pub fn fit_logreg(xs: &[SparseVector<f64>], labels: &[ClassLabel], params: &LogRegParams) -> Result<(LogReg, Vec<f64>), BaselineError> {
    let dim = check_rows(xs, labels)?;
    let present = ClassLabel::ALL.iter().filter(|c| labels.contains(c)).count();
    if present < 3 {
        return Err(BaselineError::MissingClasses(present));
    }
    let mut rng = seed::fork(params.seed, "baseline/logreg");
    let mut model = LogReg::zeros(dim);
    model.weights.iter_mut().for_each(|w| *w = rng.gen_range(-0.01..0.01));
    let mut history = Vec::with_capacity(params.epochs);
    for epoch in 0..params.epochs {
        let (loss, gw, gb) = model.loss_and_gradient(xs, labels, params.l2);
        if !loss.is_finite() {
            return Err(BaselineError::Diverged { epoch });
        }
        history.push(loss);
        for (w, g) in model.weights.iter_mut().zip(&gw) {
            *w -= params.learning_rate * g;
        }
        for c in 0..3 {
            model.bias[c] -= params.learning_rate * gb[c];
        }
    }
    Ok((model, history))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    fn toy() -> (Vec<SparseVector<f64>>, Vec<ClassLabel>) {
        let pts = [
            ([0.0, 0.0], FactChecked),
            ([0.2, 0.1], FactChecked),
            ([3.0, 0.0], Credible),
            ([3.1, 0.3], Credible),
            ([0.0, 3.0], Unreliable),
            ([0.2, 3.2], Unreliable),
        ];
        (pts.iter().map(|(x, _)| SparseVector::from_dense(x)).collect(), pts.iter().map(|(_, l)| *l).collect())
    }

    #[test]
    fn separable_toy_is_fit_and_loss_falls() {
        let (xs, ls) = toy();
        let (m, hist) = fit_logreg(&xs, &ls, &LogRegParams { l2: 0.0, learning_rate: 0.5, epochs: 300, seed: 1 }).unwrap();
        assert!(xs.iter().zip(&ls).all(|(x, l)| m.predict(x) == *l));
        assert!(hist.last().unwrap() < &hist[0]);
        assert!(hist.windows(2).all(|w| w[1] <= w[0] + 1e-12));
    }

    #[test]
    fn heavy_l2_collapses_to_prior() {
        let (mut xs, mut ls) = toy();
        xs.push(SparseVector::from_dense(&[3.0, 0.1]));
        ls.push(Credible);
        let (m, _) = fit_logreg(&xs, &ls, &LogRegParams { l2: 1e3, learning_rate: 1e-4, epochs: 20000, seed: 1 }).unwrap();
        assert!(m.weights.iter().all(|w| w.abs() < 1e-3));
        assert!(xs.iter().all(|x| m.predict(x) == Credible));
    }

    #[test]
    fn requires_all_classes() {
        let (xs, ls) = toy();
        assert!(matches!(fit_logreg(&xs[..4], &ls[..4], &LogRegParams::default()), Err(BaselineError::MissingClasses(2))));
    }
}
