//! Source adapters: read one upstream dataset (CSV, TSV or JSON-Lines) and
//! normalize its rows into [`Article`]s. Rows missing mandatory fields are
//! skipped with a reason code instead of failing the run.

mod fetch;
mod urls;

use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{article_id, Article, ClassLabel, SourceDataset};

pub use fetch::{extract_article, fetch_article, fetch_many, load_rules, ExtractedArticle, ExtractionRule, HtmlCache, MIN_BODY_CHARS};
pub use urls::{clean_title, date_from_url, domain_label, parse_date, registrable_domain, title_from_url};

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{path}: {reason}")]
    Parse { path: PathBuf, reason: String },
    #[error("invalid adapter config: {0}")]
    Config(String),
    #[error("unparseable url {0:?}")]
    Url(String),
    #[error("no usable path segment in {0:?}")]
    NoSlug(String),
    #[error("fetch failed: {0}")]
    Fetch(#[from] crate::http::FetchError),
    #[error("html cache {path}: {source}")]
    Cache { path: PathBuf, source: std::io::Error },
}

/// Article fields a source column can feed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArticleField {
    Title,
    Body,
    Date,
    Url,
    Domain,
    Topic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum LabelAssignment {
    Fixed { label: ClassLabel },
    /// Label read from `column`; values not listed skip the row.
    Rule { column: String, values: BTreeMap<String, ClassLabel> },
}

/// Keeps a row only when `column` (trimmed, case-insensitive) is one of `one_of`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RowFilter {
    pub column: String,
    pub one_of: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SourceAdapterConfig {
    pub source_dataset: SourceDataset,
    pub input_path: PathBuf,
    pub field_mapping: BTreeMap<ArticleField, String>,
    pub label_assignment: LabelAssignment,
    #[serde(default)]
    pub row_filters: Vec<RowFilter>,
    /// Derive the title from the URL slug instead of a title column.
    #[serde(default)]
    pub title_from_url: bool,
    /// Fall back to a date found in the URL path.
    #[serde(default)]
    pub date_from_url: bool,
}

impl SourceAdapterConfig {
    pub fn validate(&self) -> Result<(), IngestError> {
        let has = |f| self.field_mapping.contains_key(&f);
        if !has(ArticleField::Url) {
            return Err(IngestError::Config("field_mapping must map url".into()));
        }
        if !has(ArticleField::Title) && !self.title_from_url {
            return Err(IngestError::Config("field_mapping needs title, or title_from_url".into()));
        }
        if !has(ArticleField::Date) && !self.date_from_url {
            return Err(IngestError::Config("field_mapping needs date, or date_from_url".into()));
        }
        Ok(())
    }

    /// Column layout of the public release of each upstream dataset.
    pub fn preset(source: SourceDataset, input_path: impl Into<PathBuf>) -> Self {
        use ArticleField::*;
        let map = |pairs: &[(ArticleField, &str)]| pairs.iter().map(|(f, c)| (*f, c.to_string())).collect();
        let fixed = |label| LabelAssignment::Fixed { label };
        let input_path = input_path.into();
        match source {
            SourceDataset::Multifc => Self {
                source_dataset: source,
                input_path,
                field_mapping: map(&[(Title, "title"), (Url, "url"), (Date, "date"), (Topic, "topic")]),
                label_assignment: fixed(ClassLabel::FactChecked),
                row_filters: vec![],
                title_from_url: false,
                date_from_url: true,
            },
            SourceDataset::Pubhealth => Self {
                source_dataset: source,
                input_path,
                field_mapping: map(&[(Title, "claim"), (Url, "sources"), (Date, "date_published"), (Body, "main_text"), (Topic, "subjects")]),
                label_assignment: fixed(ClassLabel::FactChecked),
                row_filters: vec![],
                title_from_url: false,
                date_from_url: false,
            },
            SourceDataset::Politifact => Self {
                source_dataset: source,
                input_path,
                field_mapping: map(&[(Url, "factcheck_analysis_link"), (Date, "factcheck_date"), (Topic, "topic")]),
                label_assignment: fixed(ClassLabel::FactChecked),
                row_filters: vec![],
                title_from_url: true,
                date_from_url: true,
            },
            SourceDataset::Fnc => Self {
                source_dataset: source,
                input_path,
                field_mapping: map(&[(Url, "url"), (Domain, "domain"), (Body, "content"), (Topic, "topic")]),
                label_assignment: LabelAssignment::Rule { column: "type".into(), values: [("reliable".to_string(), ClassLabel::Credible)].into() },
                row_filters: vec![],
                title_from_url: true,
                date_from_url: true,
            },
            SourceDataset::Nelagt => Self {
                source_dataset: source,
                input_path,
                field_mapping: map(&[(Title, "title"), (Url, "url"), (Date, "date"), (Body, "content"), (Topic, "topic")]),
                label_assignment: LabelAssignment::Rule {
                    column: "label".into(),
                    values: [
                        ("0".to_string(), ClassLabel::Credible),
                        ("reliable".to_string(), ClassLabel::Credible),
                        ("2".to_string(), ClassLabel::Unreliable),
                        ("unreliable".to_string(), ClassLabel::Unreliable),
                    ]
                    .into(),
                },
                row_filters: vec![],
                title_from_url: false,
                date_from_url: false,
            },
            SourceDataset::Grafn => Self {
                source_dataset: source,
                input_path,
                field_mapping: map(&[(Title, "title"), (Url, "site_url"), (Date, "published"), (Body, "text"), (Topic, "topic")]),
                label_assignment: fixed(ClassLabel::Unreliable),
                row_filters: vec![
                    RowFilter { column: "language".into(), one_of: vec!["english".into()] },
                    RowFilter { column: "type".into(), one_of: ["bs", "conspiracy", "satire", "junksci", "fake"].map(String::from).to_vec() },
                ],
                title_from_url: false,
                date_from_url: false,
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SkipReason {
    MalformedRow,
    MissingTitleAndUrl,
    MissingDate,
    UnparseableDate,
    EmptyTitle,
    LabelUnmapped,
    Filtered,
}

/// One skip-report line.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkipRecord {
    /// 1-based data row (header excluded).
    pub row: usize,
    pub reason: SkipReason,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct IngestReport {
    pub articles: Vec<Article>,
    pub skipped: Vec<SkipRecord>,
}

impl IngestReport {
    pub fn skip_counts(&self) -> BTreeMap<SkipReason, usize> {
        let mut out = BTreeMap::new();
        for s in &self.skipped {
            *out.entry(s.reason).or_insert(0) += 1;
        }
        out
    }
}

/// A source row: column name to raw string value.
pub type Row = BTreeMap<String, String>;

/// Reads every row of a CSV (`.csv`), TSV (`.tsv`) or JSON-Lines
/// (`.jsonl`, `.json`) file. A row that fails to parse becomes `Err(reason)`.
pub fn read_rows(path: &Path) -> Result<Vec<Result<Row, String>>, IngestError> {
    let read_err = |source| IngestError::Read { path: path.to_path_buf(), source };
    let ext = path.extension().and_then(|e| e.to_str()).unwrap_or("").to_ascii_lowercase();
    let file = File::open(path).map_err(read_err)?;
    match ext.as_str() {
        "csv" | "tsv" => {
            let mut reader = csv::ReaderBuilder::new().delimiter(if ext == "tsv" { b'\t' } else { b',' }).flexible(true).from_reader(file);
            let headers = reader.headers().map_err(|e| IngestError::Parse { path: path.to_path_buf(), reason: e.to_string() })?.clone();
            Ok(reader
                .records()
                .map(|rec| {
                    let rec = rec.map_err(|e| e.to_string())?;
                    Ok(headers.iter().zip(rec.iter()).map(|(h, v)| (h.trim().to_string(), v.to_string())).collect())
                })
                .collect())
        }
        "jsonl" | "json" | "ndjson" => {
            let mut rows = Vec::new();
            for line in BufReader::new(file).lines() {
                let line = line.map_err(read_err)?;
                if line.trim().is_empty() {
                    continue;
                }
                rows.push(json_row(&line));
            }
            Ok(rows)
        }
        _ => Err(IngestError::Parse { path: path.to_path_buf(), reason: format!("unsupported extension {ext:?} (csv, tsv, jsonl)") }),
    }
}

fn json_row(line: &str) -> Result<Row, String> {
    let value: serde_json::Value = serde_json::from_str(line).map_err(|e| e.to_string())?;
    let obj = value.as_object().ok_or("row is not a JSON object")?;
    Ok(obj
        .iter()
        .filter_map(|(k, v)| {
            let s = match v {
                serde_json::Value::Null => return None,
                serde_json::Value::String(s) => s.clone(),
                serde_json::Value::Array(items) => items.iter().map(|i| i.as_str().map(str::to_string).unwrap_or_else(|| i.to_string())).collect::<Vec<_>>().join(","),
                other => other.to_string(),
            };
            Some((k.clone(), s))
        })
        .collect())
}

/// Reads and normalizes the configured source file.
pub fn ingest_source(config: &SourceAdapterConfig) -> Result<IngestReport, IngestError> {
    config.validate()?;
    let rows = read_rows(&config.input_path)?;
    Ok(ingest_rows(config, rows))
}

/// Normalizes already-read rows. Deterministic: output follows row order.
pub fn ingest_rows(config: &SourceAdapterConfig, rows: Vec<Result<Row, String>>) -> IngestReport {
    let mut report = IngestReport::default();
    for (i, row) in rows.into_iter().enumerate() {
        let row_no = i + 1;
        let outcome = match row {
            Ok(r) => normalize_row(config, &r),
            Err(e) => Err((SkipReason::MalformedRow, Some(e))),
        };
        match outcome {
            Ok(a) => report.articles.push(a),
            Err((reason, detail)) => {
                tracing::debug!(row = row_no, ?reason, "skipped row");
                report.skipped.push(SkipRecord { row: row_no, reason, detail });
            }
        }
    }
    report
}

type Skip = (SkipReason, Option<String>);

/// First URL in a cell that may hold several (comma/space separated).
fn first_url(cell: &str) -> String {
    cell.split(|c: char| c == ',' || c.is_whitespace())
        .map(|s| s.trim_matches(|c| "[]'\"".contains(c)))
        .find(|s| s.starts_with("http://") || s.starts_with("https://"))
        .unwrap_or(cell.trim())
        .to_string()
}

fn normalize_row(config: &SourceAdapterConfig, row: &Row) -> Result<Article, Skip> {
    let get = |f: ArticleField| config.field_mapping.get(&f).and_then(|c| row.get(c)).map(|v| v.trim()).filter(|v| !v.is_empty());

    for filter in &config.row_filters {
        let value = row.get(&filter.column).map(|v| v.trim().to_lowercase()).unwrap_or_default();
        if !filter.one_of.iter().any(|o| o.to_lowercase() == value) {
            return Err((SkipReason::Filtered, Some(format!("{}={value:?}", filter.column))));
        }
    }
    let label = match &config.label_assignment {
        LabelAssignment::Fixed { label } => *label,
        LabelAssignment::Rule { column, values } => {
            let raw = row.get(column).map(|v| v.trim().to_lowercase()).unwrap_or_default();
            match values.iter().find(|(k, _)| k.to_lowercase() == raw) {
                Some((_, l)) => *l,
                None => return Err((SkipReason::LabelUnmapped, Some(raw))),
            }
        }
    };

    let url = get(ArticleField::Url).map(first_url).unwrap_or_default();
    let domain = registrable_domain(&url).or_else(|| get(ArticleField::Domain).and_then(registrable_domain)).unwrap_or_default();

    let raw_title = if config.title_from_url {
        if url.is_empty() {
            return Err((SkipReason::MissingTitleAndUrl, None));
        }
        title_from_url(&url).map_err(|e| (SkipReason::EmptyTitle, Some(e.to_string())))?
    } else {
        match get(ArticleField::Title) {
            Some(t) => t.to_string(),
            None if url.is_empty() => return Err((SkipReason::MissingTitleAndUrl, None)),
            None => title_from_url(&url).map_err(|e| (SkipReason::EmptyTitle, Some(e.to_string())))?,
        }
    };
    let title = clean_title(&crate::html::strip_tags(&raw_title), &domain);
    if title.is_empty() {
        return Err((SkipReason::EmptyTitle, None));
    }

    let date = match get(ArticleField::Date) {
        Some(raw) => match parse_date(raw) {
            Some(d) => d,
            None => match config.date_from_url.then(|| date_from_url(&url)).flatten() {
                Some(d) => d,
                None => return Err((SkipReason::UnparseableDate, Some(raw.to_string()))),
            },
        },
        None => match config.date_from_url.then(|| date_from_url(&url)).flatten() {
            Some(d) => d,
            None => return Err((SkipReason::MissingDate, None)),
        },
    };

    Ok(Article {
        id: article_id(&title, config.source_dataset),
        body: get(ArticleField::Body).map(crate::html::strip_tags).map(|b| b.trim().to_string()).filter(|b| !b.is_empty()),
        title,
        date,
        url,
        domain,
        topic: get(ArticleField::Topic).map(|t| t.to_lowercase()).unwrap_or_default(),
        label,
        source_dataset: config.source_dataset,
    })
}
