use serde::{Deserialize, Serialize};

use super::{check_rows, BaselineError};
use crate::features::SparseVector;
use crate::types::ClassLabel;

/// Minimum impurity decrease for a split to be taken.
const MIN_GAIN: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum TreeNode {
    Leaf { counts: [usize; 3], label: ClassLabel },
    /// `x[feature] <= threshold` goes left.
    Split { feature: usize, threshold: f64, left: Box<TreeNode>, right: Box<TreeNode> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionTree {
    pub dim: usize,
    pub root: TreeNode,
}

pub fn gini(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    1.0 - counts.iter().map(|&c| (c as f64 / n as f64).powi(2)).sum::<f64>()
}

fn value(x: &SparseVector<f64>, feature: usize) -> f64 {
    x.indices.binary_search(&feature).map_or(0.0, |p| x.values[p])
}

fn majority(counts: [usize; 3]) -> ClassLabel {
    let mut best = 0;
    for c in 1..3 {
        if counts[c] > counts[best] {
            best = c;
        }
    }
    ClassLabel::ALL[best]
}

impl DecisionTree {
    pub fn predict(&self, x: &SparseVector<f64>) -> ClassLabel {
        let mut node = &self.root;
        loop {
            match node {
                TreeNode::Leaf { label, .. } => return *label,
                TreeNode::Split { feature, threshold, left, right } => {
                    node = if value(x, *feature) <= *threshold { left } else { right };
                }
            }
        }
    }

    pub fn depth(&self) -> usize {
        fn d(n: &TreeNode) -> usize {
            match n {
                TreeNode::Leaf { .. } => 0,
                TreeNode::Split { left, right, .. } => 1 + d(left).max(d(right)),
            }
        }
        d(&self.root)
    }
}

struct Builder<'a> {
    xs: &'a [SparseVector<f64>],
    labels: &'a [ClassLabel],
    max_depth: usize,
    min_leaf: usize,
}

impl Builder<'_> {
    fn counts(&self, rows: &[usize]) -> [usize; 3] {
        let mut c = [0; 3];
        for &r in rows {
            c[self.labels[r].index()] += 1;
        }
        c
    }

    /// Best `(feature, threshold)` by weighted Gini; ties keep the lowest
    /// feature, then the lowest threshold.
    fn best_split(&self, rows: &[usize], parent: f64) -> Option<(usize, f64)> {
        let n = rows.len() as f64;
        let mut features: Vec<usize> = rows.iter().flat_map(|&r| self.xs[r].indices.iter().copied()).collect();
        features.sort_unstable();
        features.dedup();
        let mut best: Option<(f64, usize, f64)> = None;
        for f in features {
            let mut vals: Vec<(f64, ClassLabel)> = rows.iter().map(|&r| (value(&self.xs[r], f), self.labels[r])).collect();
            vals.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut left = [0usize; 3];
            let mut right = self.counts(rows);
            for i in 0..vals.len() - 1 {
                left[vals[i].1.index()] += 1;
                right[vals[i].1.index()] -= 1;
                if vals[i].0 == vals[i + 1].0 {
                    continue;
                }
                let nl = i + 1;
                let nr = vals.len() - nl;
                if nl < self.min_leaf || nr < self.min_leaf {
                    continue;
                }
                let impurity = (nl as f64 * gini(&left) + nr as f64 * gini(&right)) / n;
                if parent - impurity <= MIN_GAIN {
                    continue;
                }
                if best.is_none_or(|(b, _, _)| impurity < b - MIN_GAIN) {
                    best = Some((impurity, f, (vals[i].0 + vals[i + 1].0) / 2.0));
                }
            }
        }
        best.map(|(_, f, t)| (f, t))
    }

    fn build(&self, rows: Vec<usize>, depth: usize) -> TreeNode {
        let counts = self.counts(&rows);
        let impurity = gini(&counts);
        let leaf = || TreeNode::Leaf { counts, label: majority(counts) };
        if depth >= self.max_depth || impurity == 0.0 {
            return leaf();
        }
        match self.best_split(&rows, impurity) {
            None => leaf(),
            Some((feature, threshold)) => {
                let (l, r): (Vec<usize>, Vec<usize>) = rows.into_iter().partition(|&i| value(&self.xs[i], feature) <= threshold);
                TreeNode::Split {
                    feature,
                    threshold,
                    left: Box::new(self.build(l, depth + 1)),
                    right: Box::new(self.build(r, depth + 1)),
                }
            }
        }
    }
}

/// CART with Gini impurity and midpoint thresholds.
pub fn fit_decision_tree(xs: &[SparseVector<f64>], labels: &[ClassLabel], max_depth: usize, min_leaf: usize) -> Result<DecisionTree, BaselineError> {
    let dim = check_rows(xs, labels)?;
    let b = Builder { xs, labels, max_depth, min_leaf: min_leaf.max(1) };
    Ok(DecisionTree { dim, root: b.build((0..xs.len()).collect(), 0) })
}
