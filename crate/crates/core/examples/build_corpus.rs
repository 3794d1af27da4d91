//! Ingest two small sources, balance against the fact-checked counts,
//! and split 80/10/10.
//!
//! cargo run --example build_corpus

use std::io::Write;

use evver::ingest::{ingest_source, SourceAdapterConfig};
use evver::pipeline::{build_dataset, TopicMap};
use evver::types::SourceDataset;

fn main() -> anyhow::Result<()> {
    let dir = tempfile::tempdir()?;

    let fc_path = dir.path().join("politifact.csv");
    let mut fc = std::fs::File::create(&fc_path)?;
    writeln!(fc, "factcheck_analysis_link,factcheck_date")?;
    for (i, year) in [2017, 2018, 2018, 2019, 2020, 2021].iter().enumerate() {
        writeln!(fc, "https://www.politifact.com/factchecks/{year}/mar/0{}/claim-number-{i}-about-taxes/,{year}-03-0{}", i + 1, i + 1)?;
    }

    let nela_path = dir.path().join("nela.jsonl");
    let mut nela = std::fs::File::create(&nela_path)?;
    for i in 0..30 {
        let year = 2017 + i % 5;
        let (label, site) = if i % 2 == 0 { (0, "reuters.com") } else { (2, "infowars.com") };
        let row = serde_json::json!({
            "title": format!("Story {i} on the tax plan"),
            "content": "Body text.",
            "date": format!("{year}-03-01"),
            "url": format!("https://{site}/story-{i}"),
            "source": site,
            "label": label,
        });
        writeln!(nela, "{row}")?;
    }

    let mut articles = Vec::new();
    for (source, path) in [(SourceDataset::Politifact, &fc_path), (SourceDataset::Nelagt, &nela_path)] {
        let report = ingest_source(&SourceAdapterConfig::preset(source, path))?;
        println!("{source}: {} articles, skipped {:?}", report.articles.len(), report.skip_counts());
        articles.extend(report.articles);
    }

    let out = build_dataset(articles, &TopicMap::shipped(), 42)?;
    print!("{}", out.stats.render());
    for s in &out.shortfalls {
        println!("short: {} {} {}: {} of {}", s.year, s.topic, s.label, s.drawn, s.target);
    }
    for split in &out.splits {
        println!("{:?}: {} ids, hash {}", split.split, split.article_ids.len(), &split.id_hash()[..12]);
    }
    Ok(())
}
