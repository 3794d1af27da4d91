//! Evidence screening: score evidence with a trained classifier, keep only
//! items predicted credible, and summarize class shares for a corpus.

use std::collections::HashMap;
use std::sync::OnceLock;

use rayon::prelude::*;
use regex::Regex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dcs::absent_score;
use crate::features::EmbeddingSet;
use crate::model::{argmax_label, EvverModel, ModelError};
use crate::types::{ClassLabel, EvidenceItem};

#[derive(Debug, Error)]
pub enum FilterError {
    #[error("embedding dimension {embeddings} does not match model input {model}")]
    Dimension { model: usize, embeddings: usize },
    #[error("model {} dcs scores but they were {}", if *.model_uses { "needs" } else { "does not use" }, if *.model_uses { "not supplied" } else { "supplied" })]
    DcsMode { model_uses: bool },
    #[error("{items} items but {predictions} predictions")]
    Misaligned { items: usize, predictions: usize },
    #[error("prediction {index} is for {prediction:?}, item is {item:?}")]
    IdMismatch { index: usize, item: String, prediction: String },
    #[error("cannot audit an empty prediction set")]
    EmptyAudit,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub item_id: String,
    pub probabilities: [f64; 3],
    pub label: ClassLabel,
    pub dcs_used: bool,
}

impl Prediction {
    /// Label is the argmax; ties go to the lowest class code.
    pub fn from_probabilities(item_id: impl Into<String>, probabilities: [f64; 3], dcs_used: bool) -> Self {
        Self { item_id: item_id.into(), label: argmax_label(&probabilities), probabilities, dcs_used }
    }
}

/// Per-item failure; the rest of the batch is still scored.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ItemError {
    pub item_id: String,
    pub error: String,
}

/// Scores every item in input order. `dcs` maps registrable domains to
/// normalized scores and must be given exactly when the model uses DCS;
/// items without a known domain get the absent score.
pub fn classify_evidence(
    items: &[EvidenceItem],
    model: &EvverModel,
    embeddings: &EmbeddingSet,
    dcs: Option<&HashMap<String, f64>>,
) -> Result<Vec<Result<Prediction, ItemError>>, FilterError> {
    let uses = model.config.use_dcs;
    if uses != dcs.is_some() {
        return Err(FilterError::DcsMode { model_uses: uses });
    }
    if !items.is_empty() && embeddings.dim != model.input_dim() {
        return Err(FilterError::Dimension { model: model.input_dim(), embeddings: embeddings.dim });
    }
    Ok(items
        .par_iter()
        .map(|item| {
            let fail = |e: String| ItemError { item_id: item.id.clone(), error: e };
            let x = embeddings.get(&item.id).ok_or_else(|| fail("no embedding for id".into()))?;
            let s = dcs.map(|lookup| item.domain.as_deref().and_then(|d| lookup.get(&d.to_ascii_lowercase())).copied().unwrap_or_else(absent_score) as f32);
            let p = model.forward(x, s).map_err(|e: ModelError| fail(e.to_string()))?;
            Ok(Prediction::from_probabilities(item.id.clone(), p.map(f64::from), uses))
        })
        .collect())
}

/// Items whose prediction is credible, in original order.
pub fn filter_credible(items: &[EvidenceItem], predictions: &[Prediction]) -> Result<Vec<EvidenceItem>, FilterError> {
    if items.len() != predictions.len() {
        return Err(FilterError::Misaligned { items: items.len(), predictions: predictions.len() });
    }
    let mut out = Vec::new();
    for (index, (item, p)) in items.iter().zip(predictions).enumerate() {
        if item.id != p.item_id {
            return Err(FilterError::IdMismatch { index, item: item.id.clone(), prediction: p.item_id.clone() });
        }
        if p.label.is_pass() {
            out.push(item.clone());
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub corpus_name: String,
    pub sample_count: usize,
    pub percent_fact_checked: f64,
    pub percent_credible: f64,
    pub percent_unreliable: f64,
    /// Raw counts by class code.
    pub counts: [usize; 3],
}

/// Shares to one decimal by largest remainder, so they sum to exactly 100.0.
fn percentages(counts: [usize; 3]) -> [f64; 3] {
    let n: usize = counts.iter().sum();
    let tenths: [f64; 3] = counts.map(|c| 1000.0 * c as f64 / n as f64);
    let mut floor: [u64; 3] = tenths.map(|t| t.floor() as u64);
    let mut left = 1000 - floor.iter().sum::<u64>();
    let mut order = [0usize, 1, 2];
    order.sort_by(|&a, &b| (tenths[b] - tenths[b].floor()).total_cmp(&(tenths[a] - tenths[a].floor())).then(a.cmp(&b)));
    for &i in order.iter().cycle() {
        if left == 0 {
            break;
        }
        floor[i] += 1;
        left -= 1;
    }
    floor.map(|t| t as f64 / 10.0)
}

pub fn audit(corpus_name: &str, predictions: &[Prediction]) -> Result<AuditReport, FilterError> {
    if predictions.is_empty() {
        return Err(FilterError::EmptyAudit);
    }
    let mut counts = [0usize; 3];
    for p in predictions {
        counts[p.label.index()] += 1;
    }
    let [f, c, u] = percentages(counts);
    Ok(AuditReport {
        corpus_name: corpus_name.to_string(),
        sample_count: predictions.len(),
        percent_fact_checked: f,
        percent_credible: c,
        percent_unreliable: u,
        counts,
    })
}

fn thousands(n: usize) -> String {
    let digits = n.to_string();
    let mut out = String::new();
    for (i, ch) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i).is_multiple_of(3) {
            out.push(',');
        }
        out.push(ch);
    }
    out
}

impl AuditReport {
    /// `98.5% / 1.0% / 0.5% / 10,238`
    pub fn summary_line(&self) -> String {
        format!(
            "{:.1}% / {:.1}% / {:.1}% / {}",
            self.percent_fact_checked,
            self.percent_credible,
            self.percent_unreliable,
            thousands(self.sample_count)
        )
    }
}

/// Aligned table, one row per report.
pub fn render_audit_table(reports: &[AuditReport]) -> String {
    let width = reports.iter().map(|r| r.corpus_name.chars().count()).max().unwrap_or(0).max(7);
    let mut out = format!("{:<width$}  {:>12}  {:>9}  {:>10}  {:>8}\n", "dataset", ClassLabel::FactChecked.heading(), "Credible", "Unreliable", "Samples");
    for r in reports {
        out.push_str(&format!(
            "{:<width$}  {:>11.1}%  {:>8.1}%  {:>9.1}%  {:>8}\n",
            r.corpus_name,
            r.percent_fact_checked,
            r.percent_credible,
            r.percent_unreliable,
            thousands(r.sample_count)
        ));
    }
    out
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CleanReport {
    pub kept: usize,
    pub file_names: usize,
    pub error_pages: usize,
    pub too_short: usize,
}

const MIN_TOKENS: usize = 3;
/// Error boilerplate is only matched on short texts.
const ERROR_PAGE_MAX_TOKENS: usize = 12;

fn is_file_name(text: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?i)^\S+\.(jpe?g|png|gif|webp|bmp|svg|tiff?|ico|heic|pdf|mp4|mov|avi|webm|mp3|wav|docx?|xlsx?|pptx?|zip)$").unwrap())
        .is_match(text.trim())
}

fn is_error_page(text: &str) -> bool {
    static RE: OnceLock<Regex> = OnceLock::new();
    let re = RE.get_or_init(|| {
        Regex::new(
            r"(?i)\b(page not found|404 not found|error 404|not found|403 forbidden|access denied|forbidden|page (could not|cannot|can't) be found|page (does not|doesn't) exist|service unavailable|bad gateway|internal server error|just a moment|enable javascript|are you a robot)\b",
        )
        .unwrap()
    });
    text.split_whitespace().count() <= ERROR_PAGE_MAX_TOKENS && re.is_match(text)
}

/// Drops scraping junk: bare file names, HTTP error pages and texts under
/// three tokens.
pub fn clean_evidence(items: Vec<EvidenceItem>) -> (Vec<EvidenceItem>, CleanReport) {
    let mut report = CleanReport::default();
    let kept: Vec<EvidenceItem> = items
        .into_iter()
        .filter(|item| {
            if is_file_name(&item.text) {
                report.file_names += 1;
                false
            } else if is_error_page(&item.text) {
                report.error_pages += 1;
                false
            } else if item.text.split_whitespace().count() < MIN_TOKENS {
                report.too_short += 1;
                false
            } else {
                true
            }
        })
        .collect();
    report.kept = kept.len();
    (kept, report)
}
