//! Classification metrics shared by the classifier and the baselines.

use serde::{Deserialize, Serialize};

use crate::types::ClassLabel;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub n: usize,
    pub accuracy: f64,
    /// Indexed by class code.
    pub per_class: [ClassMetrics; 3],
    pub macro_f1: f64,
    /// `confusion[truth][predicted]`.
    pub confusion: [[usize; 3]; 3],
}

/// Metrics for aligned prediction/truth slices. Undefined ratios are 0.
pub fn evaluate(predicted: &[ClassLabel], truth: &[ClassLabel]) -> EvalReport {
    assert_eq!(predicted.len(), truth.len(), "prediction and truth lengths differ");
    let mut confusion = [[0usize; 3]; 3];
    for (p, t) in predicted.iter().zip(truth) {
        confusion[t.index()][p.index()] += 1;
    }
    let n = truth.len();
    let correct: usize = (0..3).map(|i| confusion[i][i]).sum();
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    let per_class = std::array::from_fn(|c| {
        let tp = confusion[c][c];
        let predicted_c: usize = (0..3).map(|t| confusion[t][c]).sum();
        let support: usize = confusion[c].iter().sum();
        let precision = ratio(tp, predicted_c);
        let recall = ratio(tp, support);
        let f1 = if precision + recall == 0.0 { 0.0 } else { 2.0 * precision * recall / (precision + recall) };
        ClassMetrics { precision, recall, f1, support }
    });
    let macro_f1 = per_class.iter().map(|m: &ClassMetrics| m.f1).sum::<f64>() / 3.0;
    EvalReport { n, accuracy: ratio(correct, n), per_class, macro_f1, confusion }
}

impl EvalReport {
    /// Plain-text table: accuracy line, per-class rows, confusion matrix.
    pub fn render(&self) -> String {
        let mut s = format!("accuracy {:.4} (n={})  macro-F1 {:.4}\n", self.accuracy, self.n, self.macro_f1);
        s.push_str(&format!("{:<14}{:>10}{:>10}{:>10}{:>10}\n", "class", "precision", "recall", "f1", "support"));
        for l in ClassLabel::ALL {
            let m = &self.per_class[l.index()];
            s.push_str(&format!("{:<14}{:>10.4}{:>10.4}{:>10.4}{:>10}\n", l.name(), m.precision, m.recall, m.f1, m.support));
        }
        s.push_str("confusion (rows truth, cols predicted)\n");
        for row in &self.confusion {
            s.push_str(&format!("{:>8}{:>8}{:>8}\n", row[0], row[1], row[2]));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use ClassLabel::*;

    #[test]
    fn perfect_predictions() {
        let t = vec![FactChecked, Credible, Unreliable, Credible];
        let r = evaluate(&t, &t);
        assert_eq!(r.accuracy, 1.0);
        assert_eq!(r.confusion, [[1, 0, 0], [0, 2, 0], [0, 0, 1]]);
        assert!(r.per_class.iter().all(|m| m.f1 == 1.0));
    }

    #[test]
    fn hand_counted_metrics() {
        let truth = vec![FactChecked, FactChecked, Credible, Credible, Unreliable, Unreliable];
        let pred = vec![FactChecked, Credible, Credible, Credible, FactChecked, Unreliable];
        let r = evaluate(&pred, &truth);
        assert!((r.accuracy - 4.0 / 6.0).abs() < 1e-12);
        // credible: tp 2, predicted 3, support 2
        assert!((r.per_class[1].precision - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(r.per_class[1].recall, 1.0);
        assert!((r.per_class[1].f1 - 0.8).abs() < 1e-12);
        assert_eq!(r.confusion[2], [1, 0, 1]);
    }

    #[test]
    fn missing_class_gives_zero_not_nan() {
        let r = evaluate(&[Credible], &[Credible]);
        assert_eq!(r.per_class[0].precision, 0.0);
        assert!(r.macro_f1.is_finite());
    }
}
