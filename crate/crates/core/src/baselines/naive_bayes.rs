use serde::{Deserialize, Serialize};

use super::{check_rows, BaselineError};
use crate::features::SparseVector;
use crate::model::argmax_label;
use crate::types::ClassLabel;

/// Multinomial naive Bayes. Feature values are treated as (possibly
/// fractional) counts, so TF-IDF rows work as well as raw counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayes {
    pub dim: usize,
    pub alpha: f64,
    /// `-inf` for classes absent from training.
    pub log_prior: [f64; 3],
    /// `log P(feature | class)`, `3 x dim` row-major.
    pub log_likelihood: Vec<f64>,
}

impl NaiveBayes {
    /// Unnormalized log posterior per class.
    pub fn joint_log_likelihood(&self, x: &SparseVector<f64>) -> [f64; 3] {
        let mut out = self.log_prior;
        for c in 0..3 {
            if out[c] == f64::NEG_INFINITY {
                continue;
            }
            for (i, v) in x.iter() {
                out[c] += v * self.log_likelihood[c * self.dim + i];
            }
        }
        out
    }

    pub fn predict(&self, x: &SparseVector<f64>) -> ClassLabel {
        argmax_label(&self.joint_log_likelihood(x))
    }
}

pub fn fit_naive_bayes(xs: &[SparseVector<f64>], labels: &[ClassLabel], alpha: f64) -> Result<NaiveBayes, BaselineError> {
    if !(alpha > 0.0) {
        return Err(BaselineError::Alpha(alpha));
    }
    let dim = check_rows(xs, labels)?;
    let mut counts = vec![0.0; 3 * dim];
    let mut docs = [0usize; 3];
    for (row, (x, l)) in xs.iter().zip(labels).enumerate() {
        docs[l.index()] += 1;
        for (i, v) in x.iter() {
            if v < 0.0 {
                return Err(BaselineError::NegativeFeature { row, column: i, value: v });
            }
            counts[l.index() * dim + i] += v;
        }
    }
    let n = xs.len() as f64;
    let log_prior = docs.map(|d| if d == 0 { f64::NEG_INFINITY } else { (d as f64 / n).ln() });
    let mut log_likelihood = vec![0.0; 3 * dim];
    for c in 0..3 {
        let row = &counts[c * dim..(c + 1) * dim];
        let total: f64 = row.iter().sum::<f64>() + alpha * dim as f64;
        for i in 0..dim {
            log_likelihood[c * dim + i] = ((row[i] + alpha) / total).ln();
        }
    }
    Ok(NaiveBayes { dim, alpha, log_prior, log_likelihood })
}
