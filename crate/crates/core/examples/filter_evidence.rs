//! Score evidence with a trained classifier, keep the credible items and
//! print the audit line.
//!
//! cargo run --release --example filter_evidence

use std::collections::HashMap;

use ndarray::Array2;
use rand::Rng;

use evver::features::{EmbeddingSet, Pooling};
use evver::filter::{audit, classify_evidence, clean_evidence, filter_credible, render_audit_table};
use evver::model::{train, EvverConfig, LabeledSet, Model};
use evver::types::{ClassLabel, EvidenceItem, EvidenceKind};

const DIM: usize = 8;

fn vector(class: usize, rng: &mut impl Rng) -> Vec<f32> {
    (0..DIM).map(|j| rng.gen_range(-0.5..0.5) + if j == class { 2.0 } else { 0.0 }).collect()
}

fn main() -> anyhow::Result<()> {
    let mut rng = evver::seed::fork(42, "example/filter");

    let n = 300;
    let mut x = Array2::<f32>::zeros((n, DIM));
    let mut labels = Vec::new();
    for r in 0..n {
        x.row_mut(r).assign(&ndarray::Array1::from(vector(r % 3, &mut rng)));
        labels.push(ClassLabel::ALL[r % 3]);
    }
    let mut cfg = EvverConfig::new(DIM, vec![16]);
    cfg.use_dcs = true;
    cfg.batch_size = 32;
    cfg.max_epochs = 40;
    cfg.learning_rate = 1e-2;
    let dcs_train = labels.iter().map(|l| [0.4, 0.9, 0.1][l.index()]).collect();
    let model: Model<f32> = train(&LabeledSet::new(x, Some(dcs_train), labels)?, &cfg, None)?;

    let texts = [
        ("e1", "Officials confirmed the budget vote on Tuesday.", Some("reuters.com"), 1),
        ("e2", "PolitiFact rated this claim Pants on Fire.", Some("politifact.com"), 0),
        ("e3", "They do not want you to know this secret cure.", Some("naturalnews.com"), 2),
        ("e4", "image_0412.jpg", None, 1),
        ("e5", "404 Not Found", None, 1),
        ("e6", "The council published the full report online.", None, 1),
    ];
    let items: Vec<EvidenceItem> = texts
        .iter()
        .map(|(id, text, domain, _)| EvidenceItem { id: id.to_string(), text: text.to_string(), domain: domain.map(String::from), kind: EvidenceKind::Short })
        .collect();
    let emb = EmbeddingSet::new(
        "example",
        Pooling::Cls,
        DIM,
        texts.iter().map(|t| t.0.to_string()).collect(),
        texts.iter().map(|t| vector(t.3, &mut rng)).collect(),
    )?;
    let dcs: HashMap<String, f64> = [("reuters.com", 0.857), ("politifact.com", 0.857), ("naturalnews.com", 0.143)]
        .into_iter()
        .map(|(d, s)| (d.to_string(), s))
        .collect();

    let (items, cleaned) = clean_evidence(items);
    println!("cleaning: {cleaned:?}");
    let preds: Vec<_> = classify_evidence(&items, &model, &emb, Some(&dcs))?.into_iter().collect::<Result<_, _>>().map_err(|e| anyhow::anyhow!("{e:?}"))?;
    for (item, p) in items.iter().zip(&preds) {
        println!("{:<4}{:<14}{:?}", item.id, p.label.name(), p.probabilities.map(|v| (v * 1000.0).round() / 1000.0));
    }
    let kept = filter_credible(&items, &preds)?;
    println!("kept: {:?}", kept.iter().map(|k| k.id.as_str()).collect::<Vec<_>>());
    let report = audit("example", &preds)?;
    println!("{}", report.summary_line());
    print!("{}", render_audit_table(&[report]));
    Ok(())
}
