//! Reference classifiers over sparse text features or the DCS scalar.

mod logreg;
mod naive_bayes;
mod tree;

use ndarray::Array2;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dcs::absent_score;
use crate::features::SparseVector;
use crate::metrics::{evaluate, EvalReport};
use crate::model::{self, EvverConfig, EvverModel, LabeledSet, ModelError};
use crate::types::ClassLabel;

pub use logreg::{fit_logreg, LogReg, LogRegParams};
pub use naive_bayes::{fit_naive_bayes, NaiveBayes};
pub use tree::{fit_decision_tree, gini, DecisionTree, TreeNode};

#[derive(Debug, Error)]
pub enum BaselineError {
    #[error("training data is empty")]
    Empty,
    #[error("training labels cover {0} of 3 classes")]
    MissingClasses(usize),
    #[error("smoothing alpha must be > 0, got {0}")]
    Alpha(f64),
    #[error("negative feature value {value} at row {row}, column {column}")]
    NegativeFeature { row: usize, column: usize, value: f64 },
    #[error("feature rows have dimension {actual}, expected {expected}")]
    Dimension { expected: usize, actual: usize },
    #[error("{rows} feature rows but {labels} labels")]
    Misaligned { rows: usize, labels: usize },
    #[error("loss diverged at epoch {epoch}")]
    Diverged { epoch: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineKind {
    Logreg,
    NaiveBayes,
    DecisionTree,
    Mlp,
}

impl std::str::FromStr for BaselineKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "logreg" => Ok(Self::Logreg),
            "nb" | "naive_bayes" => Ok(Self::NaiveBayes),
            "tree" | "decision_tree" => Ok(Self::DecisionTree),
            "mlp" => Ok(Self::Mlp),
            _ => Err(format!("unknown baseline kind {s:?} (logreg, nb, tree, mlp)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineFeatures {
    Count,
    Tfidf,
    DcsOnly,
}

impl std::str::FromStr for BaselineFeatures {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "count" => Ok(Self::Count),
            "tfidf" => Ok(Self::Tfidf),
            "dcs" | "dcs_only" => Ok(Self::DcsOnly),
            _ => Err(format!("unknown feature mode {s:?} (count, tfidf, dcs)")),
        }
    }
}

/// DCS-only feature rows: `[score, missing]`, where a missing domain gets the
/// absent score and a 1 in the indicator column.
pub fn dcs_features(scores: &[Option<f64>]) -> Vec<SparseVector<f64>> {
    scores
        .iter()
        .map(|s| match s {
            Some(v) => SparseVector::from_dense(&[*v, 0.0]),
            None => SparseVector::from_dense(&[absent_score(), 1.0]),
        })
        .collect()
}

/// Hyperparameters for every baseline kind; each fit reads its own fields.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BaselineConfig {
    pub logreg: LogRegParams,
    pub nb_alpha: f64,
    pub tree_max_depth: usize,
    pub tree_min_leaf: usize,
    pub mlp_hidden: Vec<usize>,
    pub mlp_epochs: usize,
    pub mlp_learning_rate: f64,
    pub mlp_batch_size: usize,
    pub seed: u64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            logreg: LogRegParams::default(),
            nb_alpha: 1.0,
            tree_max_depth: 8,
            tree_min_leaf: 1,
            mlp_hidden: vec![100],
            mlp_epochs: 20,
            mlp_learning_rate: 1e-3,
            mlp_batch_size: 256,
            seed: crate::seed::DEFAULT_SEED,
        }
    }
}

pub enum BaselineParams {
    Logreg(LogReg),
    NaiveBayes(NaiveBayes),
    DecisionTree(DecisionTree),
    Mlp(EvverModel),
}

pub struct BaselineModel {
    pub kind: BaselineKind,
    pub feature_mode: BaselineFeatures,
    pub params: BaselineParams,
}

pub(crate) fn check_rows(xs: &[SparseVector<f64>], labels: &[ClassLabel]) -> Result<usize, BaselineError> {
    if xs.is_empty() {
        return Err(BaselineError::Empty);
    }
    if xs.len() != labels.len() {
        return Err(BaselineError::Misaligned { rows: xs.len(), labels: labels.len() });
    }
    let dim = xs[0].dim;
    if let Some(bad) = xs.iter().find(|x| x.dim != dim) {
        return Err(BaselineError::Dimension { expected: dim, actual: bad.dim });
    }
    Ok(dim)
}

fn densify(xs: &[SparseVector<f64>]) -> Array2<f32> {
    let dim = xs.first().map_or(0, |x| x.dim);
    let mut out = Array2::zeros((xs.len(), dim));
    for (r, x) in xs.iter().enumerate() {
        for (i, v) in x.iter() {
            out[[r, i]] = v as f32;
        }
    }
    out
}

/// Fits the requested baseline on `xs` (already built for `feature_mode`).
pub fn fit_baseline(
    kind: BaselineKind,
    feature_mode: BaselineFeatures,
    xs: &[SparseVector<f64>],
    labels: &[ClassLabel],
    cfg: &BaselineConfig,
) -> Result<BaselineModel, BaselineError> {
    let params = match kind {
        BaselineKind::Logreg => BaselineParams::Logreg(fit_logreg(xs, labels, &LogRegParams { seed: cfg.seed, ..cfg.logreg.clone() })?.0),
        BaselineKind::NaiveBayes => BaselineParams::NaiveBayes(fit_naive_bayes(xs, labels, cfg.nb_alpha)?),
        BaselineKind::DecisionTree => BaselineParams::DecisionTree(fit_decision_tree(xs, labels, cfg.tree_max_depth, cfg.tree_min_leaf)?),
        BaselineKind::Mlp => {
            let dim = check_rows(xs, labels)?;
            let set = LabeledSet::new(densify(xs), None, labels.to_vec())?;
            let mut mc = EvverConfig::new(dim, cfg.mlp_hidden.clone());
            mc.max_epochs = cfg.mlp_epochs;
            mc.learning_rate = cfg.mlp_learning_rate;
            mc.batch_size = cfg.mlp_batch_size;
            mc.seed = cfg.seed;
            BaselineParams::Mlp(model::train::<f32>(&set, &mc, None)?)
        }
    };
    Ok(BaselineModel { kind, feature_mode, params })
}

impl BaselineModel {
    pub fn predict(&self, xs: &[SparseVector<f64>]) -> Result<Vec<ClassLabel>, BaselineError> {
        Ok(match &self.params {
            BaselineParams::Logreg(m) => xs.iter().map(|x| m.predict(x)).collect(),
            BaselineParams::NaiveBayes(m) => xs.iter().map(|x| m.predict(x)).collect(),
            BaselineParams::DecisionTree(m) => xs.iter().map(|x| m.predict(x)).collect(),
            BaselineParams::Mlp(m) => {
                if xs.is_empty() {
                    return Ok(Vec::new());
                }
                m.predict_view(densify(xs).view(), None)?
            }
        })
    }
}

/// Same report schema as the main classifier's evaluation.
pub fn evaluate_baseline(model: &BaselineModel, xs: &[SparseVector<f64>], labels: &[ClassLabel]) -> Result<EvalReport, BaselineError> {
    let pred = model.predict(xs)?;
    Ok(evaluate(&pred, labels))
}
