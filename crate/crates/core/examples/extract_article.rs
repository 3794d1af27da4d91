//! Fetch pages through the cache and pull out title and body. Uses canned
//! responses so it runs offline; swap in `PoliteClient::live()` for real sites.
//!
//! cargo run --example extract_article

use std::sync::Arc;

use evver::http::canned::{fast_client, CannedFetcher};
use evver::ingest::{extract_article, fetch_many, ExtractionRule, HtmlCache};

const PAGE: &str = r#"<html><head><title>Budget passes | Daily Ledger</title></head><body>
<nav><p>Home</p><p>Politics</p><p>Sports</p></nav>
<article><h1>Budget passes after late-night session</h1>
<p>Lawmakers approved the state budget shortly after midnight, ending a three-week standoff over school funding.</p>
<p>The final bill raises per-pupil spending and trims a proposed transit expansion, according to the appropriations committee.</p>
<p>The governor is expected to sign it on Friday.</p></article>
<footer><p>Copyright Daily Ledger</p></footer></body></html>"#;

fn main() -> anyhow::Result<()> {
    let url = "https://www.dailyledger.example/2019/06/budget-passes";
    let plain = extract_article(PAGE, url, &[]);
    println!("title: {:?}\nbody:\n{}\n", plain.title, plain.body.as_deref().unwrap_or("<none>"));

    let rules = vec![ExtractionRule { domain: "dailyledger.example".into(), title_selector: Some("title".into()), body_selector: None }];
    println!("with rule: {:?}\n", extract_article(PAGE, url, &rules).title);

    let dir = tempfile::tempdir()?;
    let cache = HtmlCache::new(dir.path());
    let fetcher = Arc::new(CannedFetcher::with(&[(url, 200, PAGE)]));
    let client = fast_client(fetcher.clone());
    let urls = vec![url.to_string(), "https://www.dailyledger.example/missing".to_string()];
    for _ in 0..2 {
        let results = fetch_many(&client, &cache, &urls, &[], 2);
        for (u, r) in urls.iter().zip(&results) {
            println!("{u}: {}", if r.is_ok() { "ok".to_string() } else { format!("{}", r.as_ref().unwrap_err()) });
        }
        println!("requests so far: {}", fetcher.requests());
    }
    println!("cached at {}", cache.path_for(url).display());
    Ok(())
}
