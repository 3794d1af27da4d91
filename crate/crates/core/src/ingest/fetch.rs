//! Article fetching and text extraction.

use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use scraper::{ElementRef, Html, Selector};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::{registrable_domain, IngestError};
use crate::html::{collapse_ws, inline_text, strip_tags, text_with_breaks, SKIP_TAGS};
use crate::http::PoliteClient;

/// Bodies shorter than this are treated as extraction failures.
pub const MIN_BODY_CHARS: usize = 200;

const BOILERPLATE_TAGS: &[&str] = &["nav", "header", "footer", "aside", "form"];

/// CSS selectors for one site.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractionRule {
    pub domain: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub title_selector: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_selector: Option<String>,
}

/// Reads a JSON array of rules and checks every selector parses.
pub fn load_rules(path: &Path) -> Result<Vec<ExtractionRule>, IngestError> {
    let text = fs::read_to_string(path).map_err(|source| IngestError::Read { path: path.to_path_buf(), source })?;
    let rules: Vec<ExtractionRule> = serde_json::from_str(&text).map_err(|e| IngestError::Parse { path: path.to_path_buf(), reason: e.to_string() })?;
    for r in &rules {
        if r.title_selector.is_none() && r.body_selector.is_none() {
            return Err(IngestError::Config(format!("rule for {} has no selector", r.domain)));
        }
        for sel in r.title_selector.iter().chain(&r.body_selector) {
            Selector::parse(sel).map_err(|e| IngestError::Config(format!("rule for {}: bad selector {sel:?}: {e}", r.domain)))?;
        }
    }
    Ok(rules)
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ExtractedArticle {
    pub title: Option<String>,
    pub body: Option<String>,
    /// Body text existed but was under [`MIN_BODY_CHARS`] and was dropped.
    pub thin: bool,
}

/// Content-addressed store of raw HTML: `<dir>/<sha256(url)>.html`.
#[derive(Debug, Clone)]
pub struct HtmlCache {
    dir: PathBuf,
}

impl HtmlCache {
    pub fn new(dir: impl Into<PathBuf>) -> Self {
        Self { dir: dir.into() }
    }

    pub fn path_for(&self, url: &str) -> PathBuf {
        self.dir.join(format!("{}.html", hex::encode(Sha256::digest(url.as_bytes()))))
    }

    pub fn get(&self, url: &str) -> Option<String> {
        fs::read_to_string(self.path_for(url)).ok()
    }

    pub fn put(&self, url: &str, html: &str) -> Result<(), IngestError> {
        let path = self.path_for(url);
        let cache_err = |source| IngestError::Cache { path: path.clone(), source };
        fs::create_dir_all(&self.dir).map_err(cache_err)?;
        let tmp = path.with_extension("html.tmp");
        fs::write(&tmp, html).map_err(cache_err)?;
        fs::rename(&tmp, &path).map_err(cache_err)
    }
}

fn excluded(el: ElementRef<'_>) -> bool {
    el.ancestors().filter_map(ElementRef::wrap).any(|a| {
        let tag = a.value().name();
        SKIP_TAGS.contains(&tag) || BOILERPLATE_TAGS.contains(&tag)
    })
}

fn select_text(doc: &Html, selector: &str, block: bool) -> Option<String> {
    let sel = Selector::parse(selector).ok()?;
    let parts: Vec<String> = doc
        .select(&sel)
        .map(|e| if block { text_with_breaks(e) } else { inline_text(e) })
        .filter(|t| !t.is_empty())
        .collect();
    (!parts.is_empty()).then(|| parts.join("\n"))
}

/// Paragraph-density heuristic: the element whose direct `<p>` children
/// hold the most text, ignoring navigation, headers, footers, asides and
/// forms. Ties keep the earlier element.
fn readable_body(doc: &Html) -> Option<String> {
    let p_sel = Selector::parse("p").unwrap();
    let mut blocks: Vec<(ElementRef<'_>, usize, Vec<String>)> = Vec::new();
    for p in doc.select(&p_sel) {
        if excluded(p) {
            continue;
        }
        let Some(parent) = p.parent().and_then(ElementRef::wrap) else { continue };
        let text = inline_text(p);
        if text.is_empty() {
            continue;
        }
        match blocks.iter_mut().find(|b| b.0 == parent) {
            Some(b) => {
                b.1 += text.chars().count();
                b.2.push(text);
            }
            None => blocks.push((parent, text.chars().count(), vec![text])),
        }
    }
    let mut best: Option<&(ElementRef<'_>, usize, Vec<String>)> = None;
    for b in &blocks {
        if best.is_none_or(|x| b.1 > x.1) {
            best = Some(b);
        }
    }
    best.map(|b| b.2.join("\n\n"))
}

fn default_title(doc: &Html) -> Option<String> {
    for sel in ["h1", "title"] {
        let s = Selector::parse(sel).unwrap();
        if let Some(t) = doc.select(&s).map(inline_text).find(|t| !t.is_empty()) {
            return Some(t);
        }
    }
    None
}

/// Extracts title and body from a page. A rule whose domain matches the
/// URL's registrable domain is applied first; anything it does not yield
/// comes from the generic heuristics.
pub fn extract_article(html: &str, url: &str, rules: &[ExtractionRule]) -> ExtractedArticle {
    let doc = Html::parse_document(html);
    let domain = registrable_domain(url);
    let rule = rules.iter().find(|r| domain.as_deref() == Some(r.domain.trim().to_ascii_lowercase().as_str()));

    let title = rule.and_then(|r| r.title_selector.as_deref()).and_then(|s| select_text(&doc, s, false)).or_else(|| default_title(&doc));
    let body = rule.and_then(|r| r.body_selector.as_deref()).and_then(|s| select_text(&doc, s, true)).or_else(|| readable_body(&doc));

    let clean = |s: String| {
        let s = strip_tags(&s);
        let s = s.lines().map(collapse_ws).collect::<Vec<_>>().join("\n");
        s.trim().to_string()
    };
    let title = title.map(|t| collapse_ws(&strip_tags(&t))).filter(|t| !t.is_empty());
    let body = body.map(clean).filter(|b| !b.is_empty());
    match body {
        Some(b) if b.chars().count() < MIN_BODY_CHARS => {
            tracing::warn!(url, chars = b.chars().count(), "thin content, body omitted");
            ExtractedArticle { title, body: None, thin: true }
        }
        body => ExtractedArticle { title, body, thin: false },
    }
}

/// Cache-first fetch and extraction. Network failures (including 404)
/// surface as retryable [`IngestError::Fetch`].
pub fn fetch_article(client: &PoliteClient, cache: &HtmlCache, url: &str, rules: &[ExtractionRule]) -> Result<ExtractedArticle, IngestError> {
    let html = match cache.get(url) {
        Some(h) => h,
        None => {
            let h = client.get(url)?;
            cache.put(url, &h)?;
            h
        }
    };
    Ok(extract_article(&html, url, rules))
}

/// Fetches many URLs on a bounded worker pool; results keep input order.
pub fn fetch_many(
    client: &PoliteClient,
    cache: &HtmlCache,
    urls: &[String],
    rules: &[ExtractionRule],
    workers: usize,
) -> Vec<Result<ExtractedArticle, IngestError>> {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build().expect("thread pool");
    pool.install(|| urls.par_iter().map(|u| fetch_article(client, cache, u, rules)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::http::canned::{fast_client, CannedFetcher};
    use std::sync::Arc;

    fn para(n: usize, word: &str) -> String {
        format!("<p>{}</p>", vec![word; n].join(" "))
    }

    #[test]
    fn single_article_block() {
        let paras: String = (0..5).map(|i| para(12, &format!("sentence{i}"))).collect();
        let html = format!("<html><head><title>T</title></head><body><article>{paras}</article></body></html>");
        let got = extract_article(&html, "https://x.com/a", &[]);
        let expected: Vec<String> = (0..5).map(|i| vec![format!("sentence{i}"); 12].join(" ")).collect();
        assert_eq!(got.body.unwrap(), expected.join("\n\n"));
        assert_eq!(got.title.as_deref(), Some("T"));
    }

    #[test]
    fn nav_loses_to_article_div() {
        // nav carries more raw text than any single paragraph, but is removed;
        // among the remaining blocks the article div has the most paragraph text
        let nav = format!("<nav>{}</nav>", (0..20).map(|_| para(10, "menu")).collect::<String>());
        let sidebar = format!("<div class='side'>{}</div>", para(15, "promo"));
        let article = format!("<div class='story'>{}</div>", (0..4).map(|_| para(20, "news")).collect::<String>());
        let html = format!("<html><body>{nav}{sidebar}{article}</body></html>");
        let body = extract_article(&html, "https://x.com/a", &[]).body.unwrap();
        assert!(body.starts_with("news news"));
        assert!(!body.contains("menu") && !body.contains("promo"));
    }

    #[test]
    fn domain_rule_wins() {
        let html = format!(
            "<html><body><h1>Generic</h1><h2 class='hl'>Real <em>headline</em></h2><div class='txt'>{}</div>{}</body></html>",
            para(50, "ruled"),
            (0..5).map(|_| para(50, "other")).collect::<String>()
        );
        let rules = vec![ExtractionRule { domain: "example.com".into(), title_selector: Some("h2.hl".into()), body_selector: Some("div.txt".into()) }];
        let got = extract_article(&html, "https://www.example.com/x", &rules);
        assert_eq!(got.title.as_deref(), Some("Real headline"));
        assert!(got.body.unwrap().starts_with("ruled"));
        let generic = extract_article(&html, "https://other.org/x", &rules);
        assert_eq!(generic.title.as_deref(), Some("Generic"));
    }

    #[test]
    fn thin_content_is_dropped() {
        let got = extract_article("<html><body><p>Too short.</p></body></html>", "https://x.com/a", &[]);
        assert!(got.thin);
        assert_eq!(got.body, None);
    }

    #[test]
    fn no_tags_survive() {
        let html = format!("<html><body><p>{} &lt;script&gt;alert(1)&lt;/script&gt; tail</p></body></html>", "word ".repeat(60));
        let got = extract_article(&html, "https://x.com/a", &[]);
        let re = regex::Regex::new(r"<[^>]+>").unwrap();
        assert!(!re.is_match(got.body.as_deref().unwrap()));
    }

    #[test]
    fn cache_first_and_404_retryable() {
        let dir = tempfile::tempdir().unwrap();
        let cache = HtmlCache::new(dir.path());
        let body = format!("<html><body><p>{}</p></body></html>", "text ".repeat(60));
        let mock = Arc::new(CannedFetcher::with(&[("https://x.com/a", 200, &body)]));
        let client = fast_client(mock.clone());
        fetch_article(&client, &cache, "https://x.com/a", &[]).unwrap();
        assert!(cache.path_for("https://x.com/a").exists());
        let n = mock.requests();
        fetch_article(&client, &cache, "https://x.com/a", &[]).unwrap();
        assert_eq!(mock.requests(), n);
        match fetch_article(&client, &cache, "https://x.com/missing", &[]) {
            Err(IngestError::Fetch(e)) => assert!(e.is_retryable()),
            other => panic!("{other:?}"),
        }
        let many = fetch_many(&client, &cache, &["https://x.com/a".to_string(), "https://x.com/missing".to_string()], &[], 2);
        assert!(many[0].is_ok() && many[1].is_err());
    }

    #[test]
    fn rules_file_is_validated() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rules.json");
        fs::write(&p, r#"[{"domain": "a.com", "body_selector": "div.x"}]"#).unwrap();
        assert_eq!(load_rules(&p).unwrap().len(), 1);
        fs::write(&p, r#"[{"domain": "a.com"}]"#).unwrap();
        assert!(load_rules(&p).is_err());
        fs::write(&p, r#"[{"domain": "a.com", "body_selector": "div[[["}]"#).unwrap();
        assert!(load_rules(&p).is_err());
    }
}
