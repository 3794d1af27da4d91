//! Encode MBFC rating pairs into domain credibility scores.
//!
//! cargo run --example dcs_encoding

use evver::dcs::{encode_dcs, normalize_dcs, DcsRecord};

fn main() -> anyhow::Result<()> {
    let pairs = [
        ("nytimes.com", Some("high"), Some("high credibility")),
        ("example-tabloid.com", Some("mixed"), Some("medium credibility")),
        ("theonion.com", Some("satire"), None),
        ("unrated.net", None, None),
    ];
    println!("{:<22}{:>8}{:>12}", "domain", "encoded", "normalized");
    for (domain, factual, cred) in pairs {
        let record = DcsRecord::from_ratings(domain, None, factual.map(String::from), cred.map(String::from))?;
        println!("{:<22}{:>8}{:>12.4}", record.domain, record.encoded, record.normalized);
    }

    // mixed factuality is resolved by the credibility rating
    for cred in ["low credibility", "medium credibility", "high credibility"] {
        let e = encode_dcs(Some("mixed"), Some(cred))?;
        println!("mixed + {cred:<20} -> {e:>2} -> {:.4}", normalize_dcs(e as i64)?);
    }
    Ok(())
}
