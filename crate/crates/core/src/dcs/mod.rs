//! Domain credibility scores from Media Bias/Fact Check ratings.
//!
//! Factual-reporting categories map onto an integer scale in `[-3, 4]`;
//! `mixed` is resolved through the credibility rating. The integer is then
//! min-max scaled over the fixed range, so `s = (encoded + 3) / 7`.

mod cache;
mod mbfc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use cache::{read_snapshot, CacheEntry, DcsCache, DEFAULT_TTL};
pub use mbfc::{parse_mbfc_page, parse_search_results, MbfcClient, ParsedRatings, DEFAULT_MBFC_BASE};

pub const ENCODED_MIN: i8 = -3;
pub const ENCODED_MAX: i8 = 4;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DcsError {
    #[error("unrecognized factual reporting category {0:?}")]
    Factuality(String),
    #[error("unrecognized credibility rating {0:?}")]
    Credibility(String),
    #[error("encoded score {0} outside [-3, 4]")]
    OutOfRange(i64),
    #[error("lookup of {domain} failed and no cached record exists: {reason}")]
    Unavailable { domain: String, reason: String },
    #[error("dcs cache {path}: {reason}")]
    Cache { path: String, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Factuality {
    Satire,
    VeryLow,
    Low,
    Mixed,
    MostlyFactual,
    High,
    VeryHigh,
}

impl Factuality {
    pub const ALL: [Factuality; 7] = [
        Factuality::Satire,
        Factuality::VeryLow,
        Factuality::Low,
        Factuality::Mixed,
        Factuality::MostlyFactual,
        Factuality::High,
        Factuality::VeryHigh,
    ];

    pub fn parse(s: &str) -> Result<Self, DcsError> {
        match collapse(s).as_str() {
            "satire" => Ok(Factuality::Satire),
            "very low" => Ok(Factuality::VeryLow),
            "low" => Ok(Factuality::Low),
            "mixed" => Ok(Factuality::Mixed),
            "mostly factual" => Ok(Factuality::MostlyFactual),
            "high" => Ok(Factuality::High),
            "very high" => Ok(Factuality::VeryHigh),
            _ => Err(DcsError::Factuality(s.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Factuality::Satire => "satire",
            Factuality::VeryLow => "very low",
            Factuality::Low => "low",
            Factuality::Mixed => "mixed",
            Factuality::MostlyFactual => "mostly factual",
            Factuality::High => "high",
            Factuality::VeryHigh => "very high",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Credibility {
    Low,
    Medium,
    High,
}

impl Credibility {
    pub const ALL: [Credibility; 3] = [Credibility::Low, Credibility::Medium, Credibility::High];

    pub fn parse(s: &str) -> Result<Self, DcsError> {
        match collapse(s).as_str() {
            "low credibility" | "low" => Ok(Credibility::Low),
            "medium credibility" | "medium" => Ok(Credibility::Medium),
            "high credibility" | "high" => Ok(Credibility::High),
            _ => Err(DcsError::Credibility(s.to_string())),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Credibility::Low => "low credibility",
            Credibility::Medium => "medium credibility",
            Credibility::High => "high credibility",
        }
    }
}

fn collapse(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase()
}

/// Integer score for a typed rating pair.
pub fn encode_ratings(factuality: Option<Factuality>, credibility: Option<Credibility>) -> i8 {
    match factuality {
        None => 0,
        Some(Factuality::Satire) => -3,
        Some(Factuality::VeryLow) => -2,
        Some(Factuality::Low) => -1,
        Some(Factuality::MostlyFactual) => 2,
        Some(Factuality::High) => 3,
        Some(Factuality::VeryHigh) => 4,
        Some(Factuality::Mixed) => match credibility {
            Some(Credibility::Medium) => 1,
            Some(Credibility::High) => 2,
            Some(Credibility::Low) => -1,
            None => 0,
        },
    }
}

/// Encodes raw MBFC strings. Empty strings count as absent.
pub fn encode_dcs(factual_reporting: Option<&str>, credibility_rating: Option<&str>) -> Result<i8, DcsError> {
    fn present(s: Option<&str>) -> Option<&str> {
        s.filter(|v| !v.trim().is_empty())
    }
    let factuality = present(factual_reporting).map(Factuality::parse).transpose()?;
    let credibility = present(credibility_rating).map(Credibility::parse).transpose()?;
    Ok(encode_ratings(factuality, credibility))
}

/// Min-max scaling of the encoded score over `[-3, 4]`.
pub fn normalize_dcs(encoded: i64) -> Result<f64, DcsError> {
    if !(ENCODED_MIN as i64..=ENCODED_MAX as i64).contains(&encoded) {
        return Err(DcsError::OutOfRange(encoded));
    }
    Ok((encoded - ENCODED_MIN as i64) as f64 / (ENCODED_MAX - ENCODED_MIN) as f64)
}

/// Score used for domains with no usable rating (encoded 0).
pub fn absent_score() -> f64 {
    normalize_dcs(0).expect("0 is in range")
}

/// Per-domain ratings plus the derived scalar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DcsRecord {
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bias_rating: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factual_reporting: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub credibility_rating: Option<String>,
    pub encoded: i8,
    pub normalized: f64,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub parse_failure: bool,
}

impl DcsRecord {
    /// Builds a record, validating and encoding the ratings.
    pub fn from_ratings(
        domain: impl Into<String>,
        bias_rating: Option<String>,
        factual_reporting: Option<String>,
        credibility_rating: Option<String>,
    ) -> Result<Self, DcsError> {
        let factual_reporting = factual_reporting.map(|s| collapse(&s)).filter(|s| !s.is_empty());
        let credibility_rating = credibility_rating.map(|s| collapse(&s)).filter(|s| !s.is_empty());
        let encoded = encode_dcs(factual_reporting.as_deref(), credibility_rating.as_deref())?;
        Ok(Self {
            domain: domain.into(),
            bias_rating: bias_rating.map(|s| collapse(&s)).filter(|s| !s.is_empty()),
            factual_reporting,
            credibility_rating,
            encoded,
            normalized: normalize_dcs(encoded as i64)?,
            parse_failure: false,
        })
    }

    /// Record for a domain with no ratings.
    pub fn absent(domain: impl Into<String>) -> Self {
        Self {
            domain: domain.into(),
            bias_rating: None,
            factual_reporting: None,
            credibility_rating: None,
            encoded: 0,
            normalized: absent_score(),
            parse_failure: false,
        }
    }

    pub fn has_rating(&self) -> bool {
        self.factual_reporting.is_some()
    }
}
