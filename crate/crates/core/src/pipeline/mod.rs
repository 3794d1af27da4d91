//! Corpus construction: deduplication, year filtering, topic grouping,
//! per-(year, topic) class balancing and the stratified split.

mod balance;
mod stats;

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::path::Path;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::seed;
use crate::types::{normalize_title, Article, ClassLabel, DatasetSplit, SplitKind};

pub use balance::{balance, plan_from, BalanceOutcome, BalancePlan, Cell, Shortfall};
pub use stats::{corpus_stats, CorpusStats, TITLE_KS_LIMIT};

pub const YEAR_MIN: i32 = 2016;
pub const YEAR_MAX: i32 = 2022;
pub const OTHER_TOPIC: &str = "other";

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("topic map: {0}")]
    TopicMap(String),
    #[error("corpus is empty")]
    Empty,
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Keeps the first article per normalized title; empty titles are dropped.
pub fn dedup(articles: Vec<Article>) -> Vec<Article> {
    let mut seen = HashSet::new();
    articles
        .into_iter()
        .filter(|a| {
            let key = normalize_title(&a.title);
            !key.is_empty() && seen.insert(key)
        })
        .collect()
}

/// Articles whose year lies in `[lo, hi]`.
pub fn filter_years(articles: Vec<Article>, lo: i32, hi: i32) -> Vec<Article> {
    articles.into_iter().filter(|a| (lo..=hi).contains(&a.year())).collect()
}

/// Raw news category to topic group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TopicMap {
    pub raw_to_group: BTreeMap<String, String>,
}

const SHIPPED_TOPICS: &str = include_str!("../../data/topics.json");

impl TopicMap {
    /// The bundled 42-category, 12-group map.
    pub fn shipped() -> Self {
        Self::from_json(SHIPPED_TOPICS).expect("bundled topic map is valid")
    }

    pub fn from_json(text: &str) -> Result<Self, PipelineError> {
        let map: TopicMap = serde_json::from_str(text).map_err(|e| PipelineError::TopicMap(e.to_string()))?;
        if map.raw_to_group.is_empty() {
            return Err(PipelineError::TopicMap("empty map".into()));
        }
        Ok(Self { raw_to_group: map.raw_to_group.into_iter().map(|(k, v)| (k.trim().to_lowercase(), v.trim().to_lowercase())).collect() })
    }

    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn groups(&self) -> BTreeSet<&str> {
        self.raw_to_group.values().map(String::as_str).collect()
    }

    /// Group for a raw category. Group names map to themselves; anything
    /// else unknown goes to `other` and reports `false`.
    pub fn consolidate(&self, raw: &str) -> (String, bool) {
        let key = raw.trim().to_lowercase();
        if let Some(g) = self.raw_to_group.get(&key) {
            return (g.clone(), true);
        }
        if self.raw_to_group.values().any(|g| *g == key) {
            return (key, true);
        }
        (OTHER_TOPIC.to_string(), false)
    }
}

/// Rewrites every article's topic to its group; returns how many raw topics
/// were unknown.
pub fn consolidate_topics(articles: &mut [Article], map: &TopicMap) -> usize {
    let mut unknown = 0;
    for a in articles.iter_mut() {
        let (group, known) = map.consolidate(&a.topic);
        if !known {
            unknown += 1;
        }
        a.topic = group;
    }
    if unknown > 0 {
        tracing::warn!(unknown, "raw topics not in map, assigned to other");
    }
    unknown
}

/// Stratified split. Per class: ids sorted, shuffled with a class-specific
/// fork of `seed`, then `floor(0.8 n)` train, `floor(0.1 n)` validation and
/// the remainder test.
pub fn split(corpus: &[Article], seed_v: u64) -> Result<[DatasetSplit; 3], PipelineError> {
    if corpus.is_empty() {
        return Err(PipelineError::Empty);
    }
    let mut parts: [Vec<String>; 3] = Default::default();
    for label in ClassLabel::ALL {
        let mut ids: Vec<String> = corpus.iter().filter(|a| a.label == label).map(|a| a.id.clone()).collect();
        ids.sort();
        ids.shuffle(&mut seed::fork(seed_v, &format!("split/{}", label.name())));
        let (n_train, n_val) = split_sizes(ids.len());
        parts[0].extend_from_slice(&ids[..n_train]);
        parts[1].extend_from_slice(&ids[n_train..n_train + n_val]);
        parts[2].extend_from_slice(&ids[n_train + n_val..]);
    }
    let [train, validation, test] = parts;
    Ok([
        DatasetSplit { split: SplitKind::Train, article_ids: train },
        DatasetSplit { split: SplitKind::Validation, article_ids: validation },
        DatasetSplit { split: SplitKind::Test, article_ids: test },
    ])
}

/// `(train, validation)` sizes for a class of `n`; test is the rest.
pub fn split_sizes(n: usize) -> (usize, usize) {
    (n * 8 / 10, n / 10)
}

/// Everything `build_dataset` produces.
#[derive(Debug, Clone)]
pub struct BuildOutput {
    pub corpus: Vec<Article>,
    pub splits: [DatasetSplit; 3],
    pub shortfalls: Vec<Shortfall>,
    pub unknown_topics: usize,
    pub stats: CorpusStats,
}

/// Dedup, year filter, topic grouping, balancing and split in one call.
pub fn build_dataset(articles: Vec<Article>, topics: &TopicMap, seed_v: u64) -> Result<BuildOutput, PipelineError> {
    let articles = filter_years(dedup(articles), YEAR_MIN, YEAR_MAX);
    let mut articles = articles;
    let unknown_topics = consolidate_topics(&mut articles, topics);
    let plan = plan_from(&articles);
    let BalanceOutcome { corpus, shortfalls } = balance(&articles, &plan, seed_v);
    let splits = split(&corpus, seed_v)?;
    let stats = corpus_stats(&corpus);
    Ok(BuildOutput { corpus, splits, shortfalls, unknown_topics, stats })
}
