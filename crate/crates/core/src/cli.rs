//! Command-line front end. Every stage reads and writes plain files
//! (JSON-Lines, JSON, or the binary matrix/model formats), logs JSON lines
//! to stderr and exits 0 on success, 1 on usage errors, 2 on data errors.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::{self, File};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::sync::Arc;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use ndarray::Array2;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::baselines::{self, BaselineConfig, BaselineFeatures, BaselineKind};
use crate::dcs::{self, DcsCache, DcsRecord, MbfcClient};
use crate::features::{self, load_embeddings, EmbeddingSet, FeatureMode, Vocabulary};
use crate::filter::{self, AuditReport};
use crate::http::{canned::CannedFetcher, PoliteClient, RateLimiter, RetryPolicy};
use crate::ingest::{self, HtmlCache, SourceAdapterConfig};
use crate::metrics::evaluate;
use crate::model::{self, EvverConfig, GridSpec, LabeledSet};
use crate::pipeline::{self, TopicMap};
use crate::types::{Article, ClassLabel, DatasetSplit, EvidenceItem, SourceDataset, SplitKind};

/// A problem with how the command was invoked rather than with its data.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

#[derive(Parser, Debug)]
#[command(name = "evver", version, about = "Build evidence-credibility corpora, train the classifier, and filter Web evidence")]
pub struct Cli {
    /// Run seed; every stage forks its own generator from it [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads [default: number of processors]
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    /// TOML run config with `seed`, `workers` and `log_level` keys
    #[arg(long = "run-config", global = true)]
    pub run_config: Option<PathBuf>,
    /// Log filter, e.g. `info` or `evver=debug`
    #[arg(long = "log-level", global = true)]
    pub log_level: Option<String>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Normalize one upstream dataset into corpus JSON-Lines
    Ingest(IngestArgs),
    /// Merge ingested sources into a balanced, split corpus
    BuildDataset(BuildArgs),
    /// Look up domain credibility ratings
    FetchDcs(FetchDcsArgs),
    /// Count or TF-IDF vectors for a corpus
    Featurize(FeaturizeArgs),
    /// Train the evidence classifier on embeddings
    Train(TrainArgs),
    /// Cross-validated hyperparameter search
    Gridsearch(GridArgs),
    /// Fit and evaluate a reference classifier
    Baseline(BaselineArgs),
    /// Classify evidence, keep the credible items, write an audit
    Filter(FilterArgs),
    /// Render audit reports as one table
    Report(ReportArgs),
    /// Corpus statistics table
    Stats(StatsArgs),
}

#[derive(Args, Debug)]
pub struct IngestArgs {
    /// multifc, pubhealth, politifact, fnc, nelagt or grafn
    #[arg(long)]
    pub source: SourceDataset,
    /// CSV, TSV or JSON-Lines file
    #[arg(long)]
    pub input: PathBuf,
    /// Adapter config JSON overriding the source's default column mapping
    #[arg(long)]
    pub adapter: Option<PathBuf>,
    /// Site extraction rules (JSON array) used with --fetch
    #[arg(long)]
    pub rules: Option<PathBuf>,
    /// Fetch pages for articles without a body
    #[arg(long)]
    pub fetch: bool,
    /// Only use cached pages; never touch the network
    #[arg(long)]
    pub offline: bool,
    /// HTML cache directory
    #[arg(long, default_value = "html-cache")]
    pub cache: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Skip report, JSON-Lines of {row, reason}
    #[arg(long)]
    pub skips: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    /// Directory of per-source corpus JSON-Lines files
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Topic map JSON [default: bundled map]
    #[arg(long = "topic-map")]
    pub topic_map: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub splits: PathBuf,
    /// Corpus statistics JSON
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Shortfall records JSON-Lines
    #[arg(long)]
    pub shortfalls: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct FetchDcsArgs {
    /// One domain per line; `#` starts a comment
    #[arg(long)]
    pub domains: PathBuf,
    /// Persistent cache file
    #[arg(long)]
    pub cache: PathBuf,
    /// Snapshot output, JSON-Lines of records
    #[arg(long)]
    pub out: PathBuf,
    /// Serve from cache only
    #[arg(long)]
    pub offline: bool,
    #[arg(long = "mbfc-base")]
    pub mbfc_base: Option<String>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum TextField {
    /// Title only
    Short,
    /// Title and body
    Long,
}

#[derive(Args, Debug)]
pub struct FeaturizeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, value_enum)]
    pub mode: FeatureModeArg,
    #[arg(long = "max-features", default_value_t = features::DEFAULT_MAX_FEATURES)]
    pub max_features: usize,
    #[arg(long, value_enum, default_value = "short")]
    pub text: TextField,
    /// Fit the vocabulary on the train split only
    #[arg(long)]
    pub splits: Option<PathBuf>,
    /// Reuse a saved vocabulary instead of fitting
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum FeatureModeArg {
    Count,
    Tfidf,
}

#[derive(Args, Debug)]
pub struct TrainArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    /// DCS snapshot or cache; required when the config sets use_dcs
    #[arg(long)]
    pub dcs: Option<PathBuf>,
    /// Corpus JSON-Lines providing labels and domains
    #[arg(long)]
    pub labels: PathBuf,
    #[arg(long)]
    pub config: PathBuf,
    /// Train on train ids, select on validation, report test
    #[arg(long)]
    pub splits: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
    /// Metrics JSON [default: <out>.metrics.json]
    #[arg(long)]
    pub metrics: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GridArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub dcs: Option<PathBuf>,
    #[arg(long)]
    pub labels: PathBuf,
    /// GridSpec JSON
    #[arg(long)]
    pub grid: PathBuf,
    /// Base config JSON (epochs, use_dcs)
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub splits: Option<PathBuf>,
    #[arg(long, default_value_t = 3)]
    pub folds: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BaselineArgs {
    /// logreg, nb, tree or mlp
    #[arg(long)]
    pub kind: BaselineKind,
    /// count, tfidf or dcs
    #[arg(long)]
    pub features: BaselineFeatures,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Splits JSON [default: split the corpus with the run seed]
    #[arg(long)]
    pub splits: Option<PathBuf>,
    /// DCS snapshot or cache, for --features dcs
    #[arg(long)]
    pub dcs: Option<PathBuf>,
    #[arg(long = "max-features", default_value_t = features::DEFAULT_MAX_FEATURES)]
    pub max_features: usize,
    /// BaselineConfig JSON
    #[arg(long)]
    pub params: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FilterArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Evidence JSON-Lines
    #[arg(long)]
    pub evidence: PathBuf,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub dcs: Option<PathBuf>,
    /// Drop file names, error pages and very short texts first
    #[arg(long)]
    pub clean: bool,
    /// Name used in the audit
    #[arg(long)]
    pub name: Option<String>,
    /// Kept evidence JSON-Lines
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub audit: PathBuf,
    /// Per-item predictions JSON-Lines
    #[arg(long)]
    pub predictions: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ReportArgs {
    /// Audit JSON files, one table row each
    #[arg(long = "audit", required = true)]
    pub audits: Vec<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct StatsArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Also write the statistics as JSON
    #[arg(long)]
    pub json: Option<PathBuf>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RunConfig {
    seed: Option<u64>,
    workers: Option<usize>,
    log_level: Option<String>,
}

struct Ctx {
    seed: u64,
}

/// Parses `argv` (program name first), runs the stage and returns the exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = match e.kind() {
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = e.print();
            return code;
        }
    };
    let run_config = match cli.run_config.as_deref().map(read_run_config).transpose() {
        Ok(c) => c.unwrap_or_default(),
        Err(e) => {
            eprintln!("error: {e:#}");
            return 1;
        }
    };
    init_logging(cli.log_level.as_deref().or(run_config.log_level.as_deref()));
    if let Some(w) = cli.workers.or(run_config.workers) {
        // already built in-process (tests) is fine
        let _ = rayon::ThreadPoolBuilder::new().num_threads(w.max(1)).build_global();
    }
    let ctx = Ctx { seed: cli.seed.or(run_config.seed).unwrap_or(crate::seed::DEFAULT_SEED) };
    tracing::info!(seed = ctx.seed, command = ?std::mem::discriminant(&cli.command), "start");
    match dispatch(&ctx, cli.command) {
        Ok(()) => 0,
        Err(e) => {
            tracing::error!(error = %format!("{e:#}"), "failed");
            eprintln!("error: {e:#}");
            if e.downcast_ref::<UsageError>().is_some() {
                1
            } else {
                2
            }
        }
    }
}

fn read_run_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn init_logging(level: Option<&str>) {
    let filter = tracing_subscriber::EnvFilter::try_new(level.unwrap_or("info")).unwrap_or_else(|_| tracing_subscriber::EnvFilter::new("info"));
    let _ = tracing_subscriber::fmt().json().with_writer(std::io::stderr).with_env_filter(filter).try_init();
}

fn dispatch(ctx: &Ctx, command: Command) -> Result<()> {
    match command {
        Command::Ingest(a) => cmd_ingest(a),
        Command::BuildDataset(a) => cmd_build(ctx, a),
        Command::FetchDcs(a) => cmd_fetch_dcs(a),
        Command::Featurize(a) => cmd_featurize(ctx, a),
        Command::Train(a) => cmd_train(ctx, a),
        Command::Gridsearch(a) => cmd_grid(ctx, a),
        Command::Baseline(a) => cmd_baseline(ctx, a),
        Command::Filter(a) => cmd_filter(ctx, a),
        Command::Report(a) => cmd_report(a),
        Command::Stats(a) => cmd_stats(a),
    }
}

// ---- file helpers

pub fn read_jsonl<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.with_context(|| format!("reading {}", path.display()))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).with_context(|| format!("{}:{}", path.display(), i + 1))?);
    }
    Ok(out)
}

pub fn write_jsonl<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path).with_context(|| format!("creating {}", path.display()))?);
    for r in rows {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    w.flush()?;
    Ok(())
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// Splits file: the run seed and the three id lists with their hashes.
#[derive(Debug, Serialize, Deserialize)]
pub struct SplitsFile {
    pub seed: u64,
    pub splits: Vec<DatasetSplit>,
    #[serde(default)]
    pub id_hashes: BTreeMap<String, String>,
}

impl SplitsFile {
    fn ids(&self, kind: SplitKind) -> Vec<String> {
        self.splits.iter().find(|s| s.split == kind).map(|s| s.article_ids.clone()).unwrap_or_default()
    }
}

/// Domain to normalized score from a DCS snapshot or cache file. Domains
/// without a rating are left out, so lookups fall back to the absent score.
pub fn load_dcs_scores(path: &Path) -> Result<HashMap<String, f64>> {
    let records: Vec<DcsRecord> = match dcs::read_snapshot(path) {
        Ok(map) => map.into_values().collect(),
        Err(_) => DcsCache::open(path).with_context(|| format!("reading dcs file {}", path.display()))?.records(),
    };
    Ok(records.into_iter().filter(|r| r.has_rating()).map(|r| (r.domain, r.normalized)).collect())
}

// ---- subcommands

fn cmd_ingest(a: IngestArgs) -> Result<()> {
    let config = match &a.adapter {
        Some(p) => {
            let mut c: SourceAdapterConfig = read_json(p)?;
            c.input_path = a.input.clone();
            c
        }
        None => SourceAdapterConfig::preset(a.source, &a.input),
    };
    config.validate().map_err(|e| usage(e.to_string()))?;
    let mut report = ingest::ingest_source(&config)?;
    if a.fetch {
        let rules = a.rules.as_deref().map(ingest::load_rules).transpose()?.unwrap_or_default();
        let client = if a.offline {
            PoliteClient::new(Arc::new(CannedFetcher::default()), Arc::new(RateLimiter::new(std::time::Duration::ZERO)), RetryPolicy { max_retries: 0, ..Default::default() })
        } else {
            PoliteClient::live()?
        };
        let cache = HtmlCache::new(&a.cache);
        let todo: Vec<usize> = report.articles.iter().enumerate().filter(|(_, x)| !x.has_body() && !x.url.is_empty()).map(|(i, _)| i).collect();
        let urls: Vec<String> = todo.iter().map(|&i| report.articles[i].url.clone()).collect();
        let results = ingest::fetch_many(&client, &cache, &urls, &rules, rayon::current_num_threads());
        let (mut filled, mut failed) = (0, 0);
        for (i, r) in todo.into_iter().zip(results) {
            match r {
                Ok(x) if x.body.is_some() => {
                    report.articles[i].body = x.body;
                    filled += 1;
                }
                Ok(_) => {}
                Err(e) => {
                    failed += 1;
                    tracing::warn!(url = %report.articles[i].url, error = %e, "fetch failed");
                }
            }
        }
        tracing::info!(filled, failed, "bodies fetched");
    }
    write_jsonl(&a.out, &report.articles)?;
    if let Some(p) = &a.skips {
        write_jsonl(p, &report.skipped)?;
    }
    tracing::info!(articles = report.articles.len(), skipped = report.skipped.len(), "ingest done");
    println!("{} articles, {} rows skipped", report.articles.len(), report.skipped.len());
    Ok(())
}

fn cmd_build(ctx: &Ctx, a: BuildArgs) -> Result<()> {
    let topics = match &a.topic_map {
        Some(p) => TopicMap::load(p)?,
        None => TopicMap::shipped(),
    };
    let mut files: Vec<PathBuf> = fs::read_dir(&a.input)
        .with_context(|| format!("listing {}", a.input.display()))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "jsonl"))
        .collect();
    files.sort();
    if files.is_empty() {
        bail!("no .jsonl files in {}", a.input.display());
    }
    let mut articles: Vec<Article> = Vec::new();
    for f in &files {
        articles.extend(read_jsonl::<Article>(f)?);
    }
    let out = pipeline::build_dataset(articles, &topics, ctx.seed)?;
    write_jsonl(&a.out, &out.corpus)?;
    let splits = SplitsFile {
        seed: ctx.seed,
        id_hashes: out.splits.iter().map(|s| (format!("{:?}", s.split).to_lowercase(), s.id_hash())).collect(),
        splits: out.splits.to_vec(),
    };
    write_json(&a.splits, &splits)?;
    if let Some(p) = &a.stats {
        write_json(&p.clone(), &json!({ "seed": ctx.seed, "stats": out.stats, "unknown_topics": out.unknown_topics }))?;
    }
    if let Some(p) = &a.shortfalls {
        write_jsonl(p, &out.shortfalls)?;
    }
    print!("{}", out.stats.render());
    Ok(())
}

fn cmd_fetch_dcs(a: FetchDcsArgs) -> Result<()> {
    let text = fs::read_to_string(&a.domains).with_context(|| format!("reading {}", a.domains.display()))?;
    let domains: Vec<String> = text
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim().to_ascii_lowercase())
        .filter(|l| !l.is_empty())
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect();
    let cache = Arc::new(DcsCache::open(&a.cache)?);
    let http = if a.offline {
        PoliteClient::new(Arc::new(CannedFetcher::default()), Arc::new(RateLimiter::new(std::time::Duration::ZERO)), RetryPolicy { max_retries: 0, ..Default::default() })
    } else {
        PoliteClient::live()?
    };
    let mut client = MbfcClient::new(http, cache.clone());
    if let Some(base) = &a.mbfc_base {
        client = client.with_base(base.clone());
    }
    let mut records = Vec::new();
    let mut failed = 0;
    for d in &domains {
        match client.lookup(d) {
            Ok(r) => records.push(r),
            Err(e) => {
                failed += 1;
                tracing::warn!(domain = %d, error = %e, "dcs lookup failed");
            }
        }
    }
    cache.flush()?;
    write_jsonl(&a.out, &records)?;
    println!("{} domains rated, {} failed", records.len(), failed);
    Ok(())
}

fn article_text(a: &Article, field: TextField) -> String {
    match (field, &a.body) {
        (TextField::Long, Some(b)) => format!("{}\n{}", a.title, b),
        _ => a.title.clone(),
    }
}

fn cmd_featurize(ctx: &Ctx, a: FeaturizeArgs) -> Result<()> {
    let corpus: Vec<Article> = read_jsonl(&a.corpus)?;
    let texts: Vec<String> = corpus.iter().map(|x| article_text(x, a.text)).collect();
    let vocab = match &a.vocab {
        Some(p) => read_json::<Vocabulary>(p)?,
        None => {
            let fit_on: Vec<&String> = match &a.splits {
                Some(p) => {
                    let train: HashSet<String> = read_json::<SplitsFile>(p)?.ids(SplitKind::Train).into_iter().collect();
                    corpus.iter().zip(&texts).filter(|(x, _)| train.contains(&x.id)).map(|(_, t)| t).collect()
                }
                None => texts.iter().collect(),
            };
            features::fit_vocabulary(&fit_on, a.max_features)
        }
    };
    let mode = match a.mode {
        FeatureModeArg::Count => FeatureMode::Count,
        FeatureModeArg::Tfidf => FeatureMode::Tfidf,
    };
    let rows = features::vectorize(&texts, &vocab, mode);
    features::write_sparse_matrix(&a.out, &rows, vocab.len())?;
    let side = |ext: &str| PathBuf::from(format!("{}.{ext}", a.out.display()));
    write_json(&side("vocab.json"), &vocab)?;
    write_json(
        &side("meta.json"),
        &json!({ "seed": ctx.seed, "mode": mode, "max_features": a.max_features, "vocab_size": vocab.len(), "ids": corpus.iter().map(|x| &x.id).collect::<Vec<_>>() }),
    )?;
    println!("{} rows x {} features", rows.len(), vocab.len());
    Ok(())
}

/// Embedding rows, labels and DCS scores for the requested ids.
fn labeled_set(ids: &[String], emb: &EmbeddingSet, by_id: &HashMap<String, Article>, dcs: Option<&HashMap<String, f64>>) -> Result<LabeledSet> {
    let mut features = Array2::<f32>::zeros((ids.len(), emb.dim));
    let mut labels = Vec::with_capacity(ids.len());
    let mut scores = Vec::with_capacity(ids.len());
    let mut missing = Vec::new();
    for (r, id) in ids.iter().enumerate() {
        let (Some(x), Some(article)) = (emb.get(id), by_id.get(id)) else {
            missing.push(id.as_str());
            continue;
        };
        features.row_mut(r).assign(&ndarray::ArrayView1::from(x));
        labels.push(article.label);
        if let Some(d) = dcs {
            scores.push(d.get(&article.domain).copied().unwrap_or_else(dcs::absent_score) as f32);
        }
    }
    if !missing.is_empty() {
        bail!("{} ids lack an embedding or a label (first: {})", missing.len(), missing[0]);
    }
    Ok(LabeledSet::new(features, dcs.map(|_| scores), labels)?)
}

struct TrainingData {
    emb: EmbeddingSet,
    by_id: HashMap<String, Article>,
    dcs: Option<HashMap<String, f64>>,
    splits: Option<SplitsFile>,
}

fn load_training_data(embeddings: &Path, labels: &Path, dcs: Option<&Path>, splits: Option<&Path>) -> Result<TrainingData> {
    let emb = load_embeddings(embeddings)?;
    let by_id = read_jsonl::<Article>(labels)?.into_iter().map(|a| (a.id.clone(), a)).collect();
    let dcs = dcs.map(load_dcs_scores).transpose()?;
    let splits = splits.map(read_json::<SplitsFile>).transpose()?;
    Ok(TrainingData { emb, by_id, dcs, splits })
}

impl TrainingData {
    fn set(&self, kind: Option<SplitKind>) -> Result<LabeledSet> {
        let ids: Vec<String> = match (kind, &self.splits) {
            (Some(k), Some(s)) => s.ids(k),
            _ => self.emb.ids().iter().filter(|id| self.by_id.contains_key(*id)).cloned().collect(),
        };
        labeled_set(&ids, &self.emb, &self.by_id, self.dcs.as_ref())
    }
}

/// Config JSON with `input_dim` optional; when present it must match.
fn resolve_config(mut value: serde_json::Value, dim: usize, seed: u64) -> Result<EvverConfig> {
    let obj = value.as_object_mut().ok_or_else(|| usage("config must be a JSON object"))?;
    if let Some(d) = obj.get("input_dim").and_then(|v| v.as_u64()) {
        if d as usize != dim {
            bail!("config input_dim {d} does not match embedding dimension {dim}");
        }
    }
    obj.insert("input_dim".into(), json!(dim));
    obj.entry("seed").or_insert(json!(seed));
    obj.entry("hidden_dims").or_insert(json!([512]));
    let cfg: EvverConfig = serde_json::from_value(value).map_err(|e| usage(format!("config: {e}")))?;
    cfg.validate().map_err(|e| usage(e.to_string()))?;
    Ok(cfg)
}

fn check_dcs_flag(use_dcs: bool, dcs: &Option<HashMap<String, f64>>) -> Result<()> {
    match (use_dcs, dcs.is_some()) {
        (true, false) => Err(usage("config sets use_dcs but --dcs was not given")),
        (false, true) => Err(usage("--dcs given but config has use_dcs false")),
        _ => Ok(()),
    }
}

fn cmd_train(ctx: &Ctx, a: TrainArgs) -> Result<()> {
    let data = load_training_data(&a.embeddings, &a.labels, a.dcs.as_deref(), a.splits.as_deref())?;
    let cfg = resolve_config(read_json(&a.config)?, data.emb.dim, ctx.seed)?;
    check_dcs_flag(cfg.use_dcs, &data.dcs)?;
    let has_splits = data.splits.is_some();
    let train_set = data.set(has_splits.then_some(SplitKind::Train))?;
    let val_set = has_splits.then(|| data.set(Some(SplitKind::Validation))).transpose()?;
    let model = model::train::<f32>(&train_set, &cfg, val_set.as_ref().filter(|v| !v.is_empty()))?;
    model::save_model(&model, &a.out)?;

    let mut metrics = json!({ "seed": cfg.seed, "config": cfg, "best_epoch": model.best_epoch, "epochs": model.training_metrics });
    let eval = |set: &LabeledSet| -> Result<_> { Ok(evaluate(&model.predict(set)?, &set.labels)) };
    metrics["train"] = json!(eval(&train_set)?);
    if let Some(v) = val_set.as_ref().filter(|v| !v.is_empty()) {
        metrics["validation"] = json!(eval(v)?);
    }
    if has_splits {
        let test = data.set(Some(SplitKind::Test))?;
        if !test.is_empty() {
            let report = eval(&test)?;
            println!("test accuracy {:.4}", report.accuracy);
            metrics["test"] = json!(report);
        }
    }
    let mpath = a.metrics.clone().unwrap_or_else(|| PathBuf::from(format!("{}.metrics.json", a.out.display())));
    write_json(&mpath, &metrics)?;
    Ok(())
}

fn cmd_grid(ctx: &Ctx, a: GridArgs) -> Result<()> {
    let data = load_training_data(&a.embeddings, &a.labels, a.dcs.as_deref(), a.splits.as_deref())?;
    let grid: GridSpec = read_json(&a.grid)?;
    grid.validate().map_err(|e| usage(e.to_string()))?;
    let base_json = match &a.config {
        Some(p) => read_json(p)?,
        None => json!({}),
    };
    let base = resolve_config(base_json, data.emb.dim, ctx.seed)?;
    check_dcs_flag(base.use_dcs, &data.dcs)?;
    let set = data.set(data.splits.is_some().then_some(SplitKind::Train))?;
    let ranked = model::grid_search(&set, &grid, &base, a.folds, ctx.seed)?;
    if let Some(best) = ranked.first() {
        println!("best: hidden {:?} lr {} acc {:.4}", best.config.hidden_dims, best.config.learning_rate, best.score.mean);
    }
    write_json(&a.out, &json!({ "seed": ctx.seed, "folds": a.folds, "points": ranked.len(), "ranked": ranked }))
}

fn cmd_baseline(ctx: &Ctx, a: BaselineArgs) -> Result<()> {
    let corpus: Vec<Article> = read_jsonl(&a.corpus)?;
    let mut params: BaselineConfig = a.params.as_deref().map(read_json).transpose()?.unwrap_or_default();
    params.seed = ctx.seed;
    let splits = match &a.splits {
        Some(p) => read_json::<SplitsFile>(p)?,
        None => SplitsFile { seed: ctx.seed, splits: pipeline::split(&corpus, ctx.seed)?.to_vec(), id_hashes: BTreeMap::new() },
    };
    let by_id: HashMap<&str, &Article> = corpus.iter().map(|x| (x.id.as_str(), x)).collect();
    let pick = |k: SplitKind| -> Result<Vec<&Article>> {
        splits.ids(k).iter().map(|id| by_id.get(id.as_str()).copied().ok_or_else(|| anyhow!("split id {id} not in corpus"))).collect()
    };
    let (train, val, test) = (pick(SplitKind::Train)?, pick(SplitKind::Validation)?, pick(SplitKind::Test)?);

    let featurize: Box<dyn Fn(&[&Article]) -> Vec<features::SparseVector<f64>>> = match a.features {
        BaselineFeatures::DcsOnly => {
            let path = a.dcs.as_deref().ok_or_else(|| usage("--features dcs needs --dcs"))?;
            let scores = load_dcs_scores(path)?;
            Box::new(move |arts: &[&Article]| baselines::dcs_features(&arts.iter().map(|x| scores.get(&x.domain).copied()).collect::<Vec<_>>()))
        }
        mode => {
            let titles: Vec<&str> = train.iter().map(|x| x.title.as_str()).collect();
            let vocab = features::fit_vocabulary(&titles, a.max_features);
            let fm = if mode == BaselineFeatures::Count { FeatureMode::Count } else { FeatureMode::Tfidf };
            Box::new(move |arts: &[&Article]| features::vectorize(&arts.iter().map(|x| x.title.as_str()).collect::<Vec<_>>(), &vocab, fm))
        }
    };
    let labels = |arts: &[&Article]| arts.iter().map(|x| x.label).collect::<Vec<ClassLabel>>();
    let model = baselines::fit_baseline(a.kind, a.features, &featurize(&train), &labels(&train), &params)?;
    let mut out = json!({ "seed": ctx.seed, "kind": a.kind, "features": a.features, "params": params });
    for (name, part) in [("validation", &val), ("test", &test)] {
        if !part.is_empty() {
            out[name] = json!(baselines::evaluate_baseline(&model, &featurize(part), &labels(part))?);
        }
    }
    if let Some(acc) = out["test"]["accuracy"].as_f64() {
        println!("test accuracy {acc:.4}");
    }
    write_json(&a.out, &out)
}

fn cmd_filter(ctx: &Ctx, a: FilterArgs) -> Result<()> {
    let model = model::load_model::<f32>(&a.model)?;
    let emb = load_embeddings(&a.embeddings)?;
    let mut items: Vec<EvidenceItem> = read_jsonl(&a.evidence)?;
    if a.clean {
        let (kept, report) = filter::clean_evidence(items);
        tracing::info!(?report, "cleaned evidence");
        items = kept;
    }
    let dcs = a.dcs.as_deref().map(load_dcs_scores).transpose()?;
    if model.config.use_dcs != dcs.is_some() {
        return Err(usage(if model.config.use_dcs { "model uses dcs; pass --dcs" } else { "model does not use dcs; drop --dcs" }));
    }
    let outcomes = filter::classify_evidence(&items, &model, &emb, dcs.as_ref())?;
    let mut scored_items = Vec::new();
    let mut predictions = Vec::new();
    let mut errors = 0;
    for (item, o) in items.iter().zip(outcomes) {
        match o {
            Ok(p) => {
                scored_items.push(item.clone());
                predictions.push(p);
            }
            Err(e) => {
                errors += 1;
                tracing::warn!(item = %e.item_id, error = %e.error, "item not scored");
            }
        }
    }
    let kept = filter::filter_credible(&scored_items, &predictions)?;
    write_jsonl(&a.out, &kept)?;
    if let Some(p) = &a.predictions {
        write_jsonl(p, &predictions)?;
    }
    let name = a.name.clone().unwrap_or_else(|| a.evidence.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default());
    let report = filter::audit(&name, &predictions)?;
    let mut value = serde_json::to_value(&report)?;
    value["seed"] = json!(ctx.seed);
    value["unscored"] = json!(errors);
    write_json(&a.audit, &value)?;
    println!("{}", report.summary_line());
    Ok(())
}

fn cmd_report(a: ReportArgs) -> Result<()> {
    let reports: Vec<AuditReport> = a.audits.iter().map(|p| read_json(p)).collect::<Result<_>>()?;
    let table = filter::render_audit_table(&reports);
    match &a.out {
        Some(p) => fs::write(p, &table)?,
        None => print!("{table}"),
    }
    Ok(())
}

fn cmd_stats(a: StatsArgs) -> Result<()> {
    let corpus: Vec<Article> = read_jsonl(&a.corpus)?;
    let stats = pipeline::corpus_stats(&corpus);
    print!("{}", stats.render());
    if let Some(p) = &a.json {
        write_json(p, &stats)?;
    }
    Ok(())
}
