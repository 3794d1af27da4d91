use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::seed;
use crate::types::{Article, ClassLabel, SourceDataset};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Cell {
    pub year: i32,
    pub topic: String,
}

/// Per-cell target, taken from the fact-checked counts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalancePlan {
    pub reference_label: ClassLabel,
    pub target_counts: BTreeMap<Cell, usize>,
}

/// A cell where supply fell short of the target.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Shortfall {
    pub year: i32,
    pub topic: String,
    pub label: ClassLabel,
    pub target: usize,
    pub drawn: usize,
}

impl Shortfall {
    pub fn missing(&self) -> usize {
        self.target - self.drawn
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceOutcome {
    /// Sorted by (label, date, id).
    pub corpus: Vec<Article>,
    pub shortfalls: Vec<Shortfall>,
}

fn cell_of(a: &Article) -> Cell {
    Cell { year: a.year(), topic: a.topic.clone() }
}

/// Fact-checked count per (year, topic).
pub fn plan_from(articles: &[Article]) -> BalancePlan {
    let mut target_counts = BTreeMap::new();
    for a in articles.iter().filter(|a| a.label == ClassLabel::FactChecked) {
        *target_counts.entry(cell_of(a)).or_insert(0) += 1;
    }
    BalancePlan { reference_label: ClassLabel::FactChecked, target_counts }
}

/// Candidate tiers in draw order. Credible prefers the Fake News Corpus and
/// falls back to NELA-GT; unreliable draws from one pooled tier.
fn tiers(label: ClassLabel) -> Vec<Vec<SourceDataset>> {
    match label {
        ClassLabel::Credible => vec![vec![SourceDataset::Fnc], vec![SourceDataset::Nelagt]],
        ClassLabel::Unreliable => vec![vec![SourceDataset::Nelagt, SourceDataset::Grafn]],
        ClassLabel::FactChecked => vec![],
    }
}

/// Draws credible and unreliable articles per cell to match the fact-checked
/// count, without replacement. Cells are sampled independently from forks of
/// `seed`, so the result does not depend on input order or thread count.
pub fn balance(articles: &[Article], plan: &BalancePlan, seed_v: u64) -> BalanceOutcome {
    let mut by_cell: BTreeMap<(Cell, ClassLabel), Vec<&Article>> = BTreeMap::new();
    for a in articles {
        by_cell.entry((cell_of(a), a.label)).or_default().push(a);
    }
    let jobs: Vec<(&Cell, usize, ClassLabel)> = plan
        .target_counts
        .iter()
        .flat_map(|(cell, &target)| ClassLabel::ALL.into_iter().map(move |l| (cell, target, l)))
        .collect();

    let drawn: Vec<(Vec<Article>, Option<Shortfall>)> = jobs
        .par_iter()
        .map(|&(cell, target, label)| {
            let mut pool: Vec<&Article> = by_cell.get(&(cell.clone(), label)).cloned().unwrap_or_default();
            pool.sort_by(|a, b| a.id.cmp(&b.id));
            if label == plan.reference_label {
                return (pool.into_iter().cloned().collect(), None);
            }
            let mut rng = seed::fork(seed_v, &format!("balance/{}/{}/{}", cell.year, cell.topic, label.name()));
            let mut picked: Vec<Article> = Vec::with_capacity(target);
            for tier in tiers(label) {
                let mut cands: Vec<&Article> = pool.iter().copied().filter(|a| tier.contains(&a.source_dataset)).collect();
                cands.shuffle(&mut rng);
                picked.extend(cands.into_iter().take(target - picked.len()).cloned());
                if picked.len() == target {
                    break;
                }
            }
            let short = (picked.len() < target).then(|| Shortfall {
                year: cell.year,
                topic: cell.topic.clone(),
                label,
                target,
                drawn: picked.len(),
            });
            (picked, short)
        })
        .collect();

    let mut corpus = Vec::new();
    let mut shortfalls = Vec::new();
    for (arts, short) in drawn {
        corpus.extend(arts);
        shortfalls.extend(short);
    }
    corpus.sort_by(|a, b| (a.label.code(), a.date, &a.id).cmp(&(b.label.code(), b.date, &b.id)));
    for s in &shortfalls {
        tracing::warn!(year = s.year, topic = %s.topic, label = s.label.name(), missing = s.missing(), "balance shortfall");
    }
    BalanceOutcome { corpus, shortfalls }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::tests::article;
    use ClassLabel::*;
    use SourceDataset::*;

    fn many(prefix: &str, n: usize, label: ClassLabel, source: SourceDataset) -> Vec<Article> {
        (0..n).map(|i| article(&format!("{prefix} {i}"), (2019, 3, 1 + (i % 28) as u32), "politics", label, source)).collect()
    }

    #[test]
    fn forced_count_and_shortfall() {
        let mut arts = many("fc", 10, FactChecked, Multifc);
        arts.extend(many("cr", 50, Credible, Fnc));
        arts.extend(many("un", 4, Unreliable, Grafn));
        let out = balance(&arts, &plan_from(&arts), 42);
        let count = |l| out.corpus.iter().filter(|a| a.label == l).count();
        assert_eq!((count(FactChecked), count(Credible), count(Unreliable)), (10, 10, 4));
        assert_eq!(out.shortfalls, vec![Shortfall { year: 2019, topic: "politics".into(), label: Unreliable, target: 10, drawn: 4 }]);
        assert_eq!(out.shortfalls[0].missing(), 6);
    }

    #[test]
    fn fnc_preferred_then_nela() {
        let mut arts = many("fc", 10, FactChecked, Multifc);
        arts.extend(many("fnc", 6, Credible, Fnc));
        arts.extend(many("nela", 20, Credible, Nelagt));
        arts.extend(many("un", 20, Unreliable, Nelagt));
        let out = balance(&arts, &plan_from(&arts), 1);
        let credible: Vec<&Article> = out.corpus.iter().filter(|a| a.label == Credible).collect();
        assert_eq!(credible.len(), 10);
        assert_eq!(credible.iter().filter(|a| a.source_dataset == Fnc).count(), 6);
        assert!(out.shortfalls.is_empty());
    }

    #[test]
    fn cells_without_fact_checked_are_dropped() {
        let mut arts = many("fc", 3, FactChecked, Multifc);
        let mut other = many("cr", 5, Credible, Fnc);
        other.iter_mut().for_each(|a| a.topic = "sports".into());
        arts.extend(other);
        let out = balance(&arts, &plan_from(&arts), 1);
        assert!(out.corpus.iter().all(|a| a.topic == "politics"));
    }

    #[test]
    fn deterministic_and_order_independent() {
        let mut arts = many("fc", 10, FactChecked, Multifc);
        arts.extend(many("cr", 30, Credible, Fnc));
        arts.extend(many("un", 30, Unreliable, Grafn));
        let plan = plan_from(&arts);
        let a = balance(&arts, &plan, 42);
        arts.reverse();
        assert_eq!(a, balance(&arts, &plan, 42));
        assert_ne!(a.corpus, balance(&arts, &plan, 7).corpus);
        // idempotent on its own output
        assert_eq!(balance(&a.corpus, &plan_from(&a.corpus), 42), a);
    }
}
