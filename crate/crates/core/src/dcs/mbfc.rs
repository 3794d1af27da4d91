use std::sync::{Arc, OnceLock};

use regex::Regex;
use scraper::{Html, Selector};

use super::{DcsCache, DcsError, DcsRecord};
use crate::html::text_with_breaks;
use crate::http::PoliteClient;

pub const DEFAULT_MBFC_BASE: &str = "https://mediabiasfactcheck.com";

/// Raw rating strings found on a source page.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParsedRatings {
    pub bias_rating: Option<String>,
    pub factual_reporting: Option<String>,
    pub credibility_rating: Option<String>,
}

fn field(text: &str, label: &str) -> Option<String> {
    let re = Regex::new(&format!(r"(?im)^\s*{label}\s*:\s*([^\n(]+)")).expect("static pattern");
    re.captures(text).map(|c| c[1].trim().to_lowercase()).filter(|s| !s.is_empty())
}

/// Extracts the three rating lines from an MBFC source page.
pub fn parse_mbfc_page(html: &str) -> ParsedRatings {
    let doc = Html::parse_document(html);
    let text = text_with_breaks(doc.root_element());
    ParsedRatings {
        bias_rating: field(&text, "Bias Rating"),
        factual_reporting: field(&text, "Factual Reporting"),
        credibility_rating: field(&text, "MBFC Credibility Rating"),
    }
}

/// Result links from an MBFC search page, in page order.
pub fn parse_search_results(html: &str) -> Vec<String> {
    static SEL: OnceLock<Selector> = OnceLock::new();
    let sel = SEL.get_or_init(|| Selector::parse("article h2 a, article h3 a, h2.entry-title a, h3.entry-title a").unwrap());
    let doc = Html::parse_document(html);
    let mut out: Vec<String> = Vec::new();
    for a in doc.select(sel) {
        if let Some(href) = a.value().attr("href") {
            if !out.iter().any(|h| h == href) {
                out.push(href.to_string());
            }
        }
    }
    out
}

/// Cache-first MBFC lookup.
pub struct MbfcClient {
    http: PoliteClient,
    cache: Arc<DcsCache>,
    base: String,
    max_candidates: usize,
}

impl MbfcClient {
    pub fn new(http: PoliteClient, cache: Arc<DcsCache>) -> Self {
        Self { http, cache, base: DEFAULT_MBFC_BASE.to_string(), max_candidates: 3 }
    }

    pub fn with_base(mut self, base: impl Into<String>) -> Self {
        self.base = base.into().trim_end_matches('/').to_string();
        self
    }

    pub fn cache(&self) -> &Arc<DcsCache> {
        &self.cache
    }

    pub fn lookup(&self, domain: &str) -> Result<DcsRecord, DcsError> {
        self.lookup_at(domain, chrono::Utc::now().timestamp())
    }

    /// Looks up `domain` as of `now` (unix seconds).
    pub fn lookup_at(&self, domain: &str, now: i64) -> Result<DcsRecord, DcsError> {
        let domain = domain.trim().to_ascii_lowercase();
        if let Some(hit) = self.cache.get_fresh(&domain, now) {
            return Ok(hit);
        }
        match self.fetch_record(&domain) {
            Ok(record) => {
                self.cache.insert(record.clone(), now);
                Ok(record)
            }
            Err(reason) => match self.cache.get(&domain) {
                Some(stale) => {
                    tracing::warn!(domain = %domain, %reason, "using stale dcs record");
                    Ok(stale)
                }
                None => Err(DcsError::Unavailable { domain, reason }),
            },
        }
    }

    fn fetch_record(&self, domain: &str) -> Result<DcsRecord, String> {
        let search_url = format!("{}/?s={}", self.base, domain);
        let search = self.http.get(&search_url).map_err(|e| e.to_string())?;
        for link in parse_search_results(&search).into_iter().take(self.max_candidates) {
            let page = self.http.get(&link).map_err(|e| e.to_string())?;
            if !page.to_ascii_lowercase().contains(domain) {
                continue;
            }
            let ratings = parse_mbfc_page(&page);
            return Ok(match DcsRecord::from_ratings(domain, ratings.bias_rating.clone(), ratings.factual_reporting.clone(), ratings.credibility_rating.clone()) {
                Ok(r) if r.factual_reporting.is_some() => r,
                _ => DcsRecord { parse_failure: true, bias_rating: ratings.bias_rating, ..DcsRecord::absent(domain) },
            });
        }
        Ok(DcsRecord::absent(domain))
    }
}
