//! Shared domain types: class labels, articles, evidence items and splits.

use std::fmt;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum TypeError {
    #[error("class code {0} is not one of 0 (fact_checked), 1 (credible), 2 (unreliable)")]
    LabelCode(i64),
    #[error("unknown class label name {0:?}")]
    LabelName(String),
    #[error("unknown source dataset {0:?}")]
    SourceName(String),
}

/// Three-way evidence class. `Credible` is the only label that passes the filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassLabel {
    FactChecked,
    Credible,
    Unreliable,
}

impl ClassLabel {
    pub const ALL: [ClassLabel; 3] = [ClassLabel::FactChecked, ClassLabel::Credible, ClassLabel::Unreliable];
    pub const COUNT: usize = 3;

    pub fn code(self) -> u8 {
        match self {
            ClassLabel::FactChecked => 0,
            ClassLabel::Credible => 1,
            ClassLabel::Unreliable => 2,
        }
    }

    pub fn index(self) -> usize {
        self.code() as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassLabel::FactChecked => "fact_checked",
            ClassLabel::Credible => "credible",
            ClassLabel::Unreliable => "unreliable",
        }
    }

    /// Human-readable column heading used in reports.
    pub fn heading(self) -> &'static str {
        match self {
            ClassLabel::FactChecked => "Fact-checked",
            ClassLabel::Credible => "Credible",
            ClassLabel::Unreliable => "Unreliable",
        }
    }

    pub fn is_pass(self) -> bool {
        self == ClassLabel::Credible
    }
}

/// Maps an integer class code to its label.
pub fn label_from_code(code: i64) -> Result<ClassLabel, TypeError> {
    match code {
        0 => Ok(ClassLabel::FactChecked),
        1 => Ok(ClassLabel::Credible),
        2 => Ok(ClassLabel::Unreliable),
        other => Err(TypeError::LabelCode(other)),
    }
}

impl TryFrom<i64> for ClassLabel {
    type Error = TypeError;
    fn try_from(code: i64) -> Result<Self, Self::Error> {
        label_from_code(code)
    }
}

impl FromStr for ClassLabel {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "fact_checked" | "fact-checked" | "factchecked" | "0" => Ok(ClassLabel::FactChecked),
            "credible" | "1" => Ok(ClassLabel::Credible),
            "unreliable" | "2" => Ok(ClassLabel::Unreliable),
            _ => Err(TypeError::LabelName(s.to_string())),
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The upstream collections a corpus is assembled from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourceDataset {
    Multifc,
    Pubhealth,
    Politifact,
    Fnc,
    Nelagt,
    Grafn,
}

impl SourceDataset {
    pub const ALL: [SourceDataset; 6] = [
        SourceDataset::Multifc,
        SourceDataset::Pubhealth,
        SourceDataset::Politifact,
        SourceDataset::Fnc,
        SourceDataset::Nelagt,
        SourceDataset::Grafn,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SourceDataset::Multifc => "multifc",
            SourceDataset::Pubhealth => "pubhealth",
            SourceDataset::Politifact => "politifact",
            SourceDataset::Fnc => "fnc",
            SourceDataset::Nelagt => "nelagt",
            SourceDataset::Grafn => "grafn",
        }
    }
}

impl FromStr for SourceDataset {
    type Err = TypeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let lower = s.trim().to_ascii_lowercase();
        SourceDataset::ALL
            .into_iter()
            .find(|d| d.name() == lower)
            .ok_or_else(|| TypeError::SourceName(s.to_string()))
    }
}

impl fmt::Display for SourceDataset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One news item of the corpus. Serialized as one JSON-Lines record.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Article {
    pub id: String,
    pub title: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body: Option<String>,
    pub date: NaiveDate,
    pub url: String,
    pub domain: String,
    pub topic: String,
    pub label: ClassLabel,
    pub source_dataset: SourceDataset,
}

impl Article {
    pub fn year(&self) -> i32 {
        use chrono::Datelike;
        self.date.year()
    }

    pub fn has_body(&self) -> bool {
        self.body.as_deref().is_some_and(|b| !b.trim().is_empty())
    }
}

/// Lowercase, strip punctuation, collapse whitespace. Used for ids and dedup keys.
pub fn normalize_title(title: &str) -> String {
    let mut out = String::with_capacity(title.len());
    let mut pending_space = false;
    for ch in title.chars() {
        if ch.is_alphanumeric() {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.extend(ch.to_lowercase());
        } else if ch.is_whitespace() {
            pending_space = true;
        }
        // punctuation is dropped without introducing a break
    }
    out
}

/// Stable article id: hash of the normalized title and source dataset.
pub fn article_id(title: &str, source: SourceDataset) -> String {
    let mut hasher = Sha256::new();
    hasher.update(normalize_title(title).as_bytes());
    hasher.update([0u8]);
    hasher.update(source.name().as_bytes());
    hex::encode(&hasher.finalize()[..16])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EvidenceKind {
    Short,
    Long,
}

/// A piece of textual evidence to be screened before verification.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceItem {
    pub id: String,
    pub text: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<String>,
    pub kind: EvidenceKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SplitKind {
    Train,
    Validation,
    Test,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetSplit {
    pub split: SplitKind,
    pub article_ids: Vec<String>,
}

impl DatasetSplit {
    /// SHA-256 over the ordered id list; used to compare splits across runs.
    pub fn id_hash(&self) -> String {
        let mut hasher = Sha256::new();
        for id in &self.article_ids {
            hasher.update(id.as_bytes());
            hasher.update(b"\n");
        }
        hex::encode(hasher.finalize())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn label_codes() {
        assert_eq!(label_from_code(1).unwrap(), ClassLabel::Credible);
        assert_eq!(label_from_code(0).unwrap(), ClassLabel::FactChecked);
        assert_eq!(label_from_code(2).unwrap(), ClassLabel::Unreliable);
        assert_eq!(label_from_code(7), Err(TypeError::LabelCode(7)));
        assert!(label_from_code(-1).is_err());
    }

    #[test]
    fn label_mapping_is_bijective() {
        for label in ClassLabel::ALL {
            assert_eq!(label_from_code(label.code() as i64).unwrap(), label);
            assert_eq!(label.name().parse::<ClassLabel>().unwrap(), label);
        }
        let names: std::collections::HashSet<_> = ClassLabel::ALL.iter().map(|l| l.name()).collect();
        assert_eq!(names.len(), 3);
        assert!(ClassLabel::Credible.is_pass());
        assert_eq!(ClassLabel::ALL.iter().filter(|l| l.is_pass()).count(), 1);
    }

    #[test]
    fn article_json_omits_missing_body() {
        let a = Article {
            id: "x".into(),
            title: "t".into(),
            body: None,
            date: NaiveDate::from_ymd_opt(2020, 1, 1).unwrap(),
            url: "https://a.com/x".into(),
            domain: "a.com".into(),
            topic: "politics".into(),
            label: ClassLabel::Credible,
            source_dataset: SourceDataset::Fnc,
        };
        let json = serde_json::to_string(&a).unwrap();
        assert!(!json.contains("body"));
        assert!(json.contains("\"label\":\"credible\""));
        assert!(json.contains("\"source_dataset\":\"fnc\""));
        assert!(json.contains("\"date\":\"2020-01-01\""));
    }

    #[test]
    fn ids_ignore_formatting_noise() {
        let a = article_id("Claim A!", SourceDataset::Politifact);
        let b = article_id("claim   a", SourceDataset::Politifact);
        assert_eq!(a, b);
        assert_ne!(a, article_id("claim a", SourceDataset::Multifc));
    }

    fn arb_article() -> impl Strategy<Value = Article> {
        (
            "[a-z0-9]{1,12}",
            "[A-Za-z ,!]{1,40}",
            proptest::option::of("[a-z ]{0,60}"),
            (2016i32..=2022, 1u32..=12, 1u32..=28),
            0usize..3,
            0usize..6,
        )
            .prop_map(|(id, title, body, (y, m, d), l, s)| Article {
                id,
                title,
                body,
                date: NaiveDate::from_ymd_opt(y, m, d).unwrap(),
                url: "https://example.org/a".into(),
                domain: "example.org".into(),
                topic: "politics".into(),
                label: ClassLabel::ALL[l],
                source_dataset: SourceDataset::ALL[s],
            })
    }

    proptest! {
        #[test]
        fn article_round_trip(a in arb_article()) {
            let line = serde_json::to_string(&a).unwrap();
            let back: Article = serde_json::from_str(&line).unwrap();
            prop_assert_eq!(back, a);
        }

        #[test]
        fn evidence_round_trip(id in "[a-z0-9]{1,8}", text in "[a-z ]{1,30}", domain in proptest::option::of("[a-z]{1,8}\\.com"), long in any::<bool>()) {
            let item = EvidenceItem { id, text, domain, kind: if long { EvidenceKind::Long } else { EvidenceKind::Short } };
            let back: EvidenceItem = serde_json::from_str(&serde_json::to_string(&item).unwrap()).unwrap();
            prop_assert_eq!(back, item);
        }
    }
}
