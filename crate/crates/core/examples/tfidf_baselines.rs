//! TF-IDF features with the three classical baselines.
//!
//! cargo run --example tfidf_baselines

use evver::baselines::{evaluate_baseline, fit_baseline, BaselineConfig, BaselineFeatures, BaselineKind};
use evver::features::{fit_vocabulary, vectorize, FeatureMode};
use evver::types::ClassLabel;

fn main() -> anyhow::Result<()> {
    let templates = [
        (ClassLabel::FactChecked, ["says", "claim", "false", "mostly", "rating", "pants"]),
        (ClassLabel::Credible, ["senate", "votes", "budget", "reported", "officials", "said"]),
        (ClassLabel::Unreliable, ["shocking", "truth", "they", "hide", "exposed", "secret"]),
    ];
    let mut docs = Vec::new();
    let mut labels = Vec::new();
    for i in 0..90 {
        let (label, words) = &templates[i % 3];
        let (a, b) = (words[i % 6], words[(i / 3) % 6]);
        // a shared word on every title keeps the task from being trivial
        docs.push(format!("{a} {b} news today {}", if i % 7 == 0 { "claim" } else { "" }));
        labels.push(*label);
    }
    let (train_docs, test_docs) = docs.split_at(72);
    let (train_y, test_y) = labels.split_at(72);

    let vocab = fit_vocabulary(train_docs, 1000);
    let x_train = vectorize(train_docs, &vocab, FeatureMode::Tfidf);
    let x_test = vectorize(test_docs, &vocab, FeatureMode::Tfidf);
    println!("vocabulary: {} tokens", vocab.len());

    let cfg = BaselineConfig::default();
    for kind in [BaselineKind::Logreg, BaselineKind::NaiveBayes, BaselineKind::DecisionTree] {
        let model = fit_baseline(kind, BaselineFeatures::Tfidf, &x_train, train_y, &cfg)?;
        let report = evaluate_baseline(&model, &x_test, test_y)?;
        println!("{kind:?}: accuracy {:.3}, macro-F1 {:.3}", report.accuracy, report.macro_f1);
    }
    Ok(())
}
