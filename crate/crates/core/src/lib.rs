//! Toolkit for screening Web evidence before automated fact-checking.
//!
//! The crate builds a balanced three-class news corpus (fact-checked,
//! credible, unreliable), trains a small MLP evidence classifier on text
//! embeddings with an optional domain credibility score, and filters
//! evidence sets down to the items classified as credible.
//!
//! Runnable walkthroughs live in `examples/`; the `evver` binary exposes the
//! same stages as subcommands.

pub mod dcs;
pub mod features;
pub mod baselines;
pub mod cli;
pub mod filter;
pub mod html;
pub mod http;
pub mod ingest;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod seed;
pub mod types;

pub use types::{label_from_code, Article, ClassLabel, DatasetSplit, EvidenceItem, EvidenceKind, SourceDataset, SplitKind};
