//! Acceptance suite. Each criterion runs in isolation, prints one
//! `PASS`/`FAIL` line with its runtime, and the test fails if any criterion does.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use chrono::NaiveDate;
use ndarray::Array2;
use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use evver::baselines::{fit_decision_tree, fit_naive_bayes, LogReg, TreeNode};
use evver::dcs::{encode_ratings, normalize_dcs, Credibility, Factuality};
use evver::features::{fit_vocabulary, tfidf_vector, tokenize, SparseVector};
use evver::filter::{audit, filter_credible, Prediction};
use evver::model::{grad_check, train, EvverConfig, LabeledSet};
use evver::pipeline::{build_dataset, TopicMap};
use evver::types::{article_id, Article, ClassLabel, EvidenceItem, EvidenceKind, SourceDataset};

type Outcome = Result<(), String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Outcome {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Criterion {
    name: &'static str,
    budget: Duration,
    run: fn() -> Outcome,
}

#[test]
fn acceptance() {
    let criteria = [
        Criterion { name: "dcs encoding table", budget: Duration::from_secs(1), run: dcs_table },
        Criterion { name: "dcs normalization", budget: Duration::from_secs(1), run: dcs_normalization },
        Criterion { name: "tf-idf oracle equivalence", budget: Duration::from_secs(5), run: tfidf_oracle },
        Criterion { name: "gradient verification", budget: Duration::from_secs(60), run: gradient_verification },
        Criterion { name: "training sanity", budget: Duration::from_secs(120), run: training_sanity },
        Criterion { name: "dcs utility", budget: Duration::from_secs(120), run: dcs_utility },
        Criterion { name: "filter invariants", budget: Duration::from_secs(1), run: filter_invariants },
        Criterion { name: "split/balance determinism", budget: Duration::from_secs(30), run: split_balance },
        Criterion { name: "baseline oracles", budget: Duration::from_secs(10), run: baseline_oracles },
        Criterion { name: "audit arithmetic", budget: Duration::from_secs(1), run: audit_arithmetic },
    ];
    // raw handle so the lines survive libtest's output capture
    let mut out = std::io::stdout();
    let mut failed = Vec::new();
    writeln!(out).unwrap();
    for c in &criteria {
        let start = Instant::now();
        let result = catch_unwind(AssertUnwindSafe(c.run)).unwrap_or_else(|p| {
            Err(p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string())).unwrap_or_else(|| "panic".into()))
        });
        let elapsed = start.elapsed();
        let result = result.and_then(|()| ensure(elapsed <= c.budget, || format!("took {elapsed:.2?}, budget {:?}", c.budget)));
        match &result {
            Ok(()) => writeln!(out, "PASS  {:<28} {elapsed:>10.2?}", c.name).unwrap(),
            Err(e) => {
                writeln!(out, "FAIL  {:<28} {elapsed:>10.2?}  {e}", c.name).unwrap();
                failed.push(c.name);
            }
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}

// ---- dcs

fn dcs_table() -> Outcome {
    use Credibility as C;
    use Factuality as F;
    let expected: [(Option<F>, [i8; 4]); 8] = [
        // credibility columns: absent, low, medium, high
        (None, [0, 0, 0, 0]),
        (Some(F::Satire), [-3, -3, -3, -3]),
        (Some(F::VeryLow), [-2, -2, -2, -2]),
        (Some(F::Low), [-1, -1, -1, -1]),
        (Some(F::Mixed), [0, -1, 1, 2]),
        (Some(F::MostlyFactual), [2, 2, 2, 2]),
        (Some(F::High), [3, 3, 3, 3]),
        (Some(F::VeryHigh), [4, 4, 4, 4]),
    ];
    let creds = [None, Some(C::Low), Some(C::Medium), Some(C::High)];
    let mut checked = 0;
    for (f, row) in expected {
        for (c, want) in creds.iter().zip(row) {
            let got = encode_ratings(f, *c);
            ensure(got == want, || format!("{f:?} x {c:?}: got {got}, want {want}"))?;
            checked += 1;
        }
    }
    ensure(checked == 32, || format!("checked {checked} combinations"))
}

fn dcs_normalization() -> Outcome {
    let expect = |e: i64, num: f64| -> Outcome {
        let got = normalize_dcs(e).map_err(|x| x.to_string())?;
        ensure((got - num / 7.0).abs() < 1e-12, || format!("{e} -> {got}, want {num}/7"))
    };
    expect(-3, 0.0)?;
    expect(4, 7.0)?;
    expect(0, 3.0)?;
    let values: Vec<f64> = (-3..=4).map(|e| normalize_dcs(e).unwrap()).collect();
    ensure(values.len() == 8 && values.windows(2).all(|w| w[0] < w[1]), || format!("not increasing: {values:?}"))?;
    for (i, v) in values.iter().enumerate() {
        expect(i as i64 - 3, i as f64).map_err(|e| format!("{e} ({v})"))?;
    }
    ensure(normalize_dcs(5).is_err() && normalize_dcs(-4).is_err(), || "out-of-range scores accepted".into())
}

// ---- tf-idf

/// Direct evaluation: raw count times ln((1+N)/(1+df)) + 1, then unit norm.
fn tfidf_oracle_row(doc: &str, corpus: &[String], vocab_tokens: &[String]) -> Vec<f64> {
    let n = corpus.len() as f64;
    let tokenized: Vec<Vec<String>> = corpus.iter().map(|d| tokenize(d)).collect();
    let doc_tokens = tokenize(doc);
    let mut row: Vec<f64> = vocab_tokens
        .iter()
        .map(|t| {
            let tf = doc_tokens.iter().filter(|x| *x == t).count() as f64;
            let df = tokenized.iter().filter(|d| d.contains(t)).count() as f64;
            tf * (((1.0 + n) / (1.0 + df)).ln() + 1.0)
        })
        .collect();
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        row.iter_mut().for_each(|v| *v /= norm);
    }
    row
}

fn tfidf_oracle() -> Outcome {
    let words: Vec<String> = (0..60).map(|i| format!("w{i}")).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for round in 0..20 {
        let docs = rng.gen_range(1..=50);
        let corpus: Vec<String> = (0..docs)
            .map(|_| {
                let len = rng.gen_range(0..=200);
                // skewed draw so document frequencies vary
                (0..len).map(|_| words[(rng.gen::<f64>().powi(2) * words.len() as f64) as usize].as_str()).collect::<Vec<_>>().join(" ")
            })
            .collect();
        let max_features = rng.gen_range(5..=80);
        let vocab = fit_vocabulary(&corpus, max_features);
        for (d, doc) in corpus.iter().enumerate() {
            let got = tfidf_vector(doc, &vocab).to_dense();
            let want = tfidf_oracle_row(doc, &corpus, vocab.tokens());
            for (j, (g, w)) in got.iter().zip(&want).enumerate() {
                ensure((g - w).abs() <= 1e-9, || format!("corpus {round} doc {d} feature {j}: {g} vs {w}"))?;
            }
            let norm = got.iter().map(|v| v * v).sum::<f64>().sqrt();
            ensure(norm == 0.0 || (norm - 1.0).abs() <= 1e-9, || format!("corpus {round} doc {d}: norm {norm}"))?;
        }
    }
    Ok(())
}

// ---- classifier

fn gradient_verification() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut configs = 0;
    let mut with_dcs = [0usize; 2];
    for i in 0..24 {
        let layers = 1 + i % 3;
        let hidden: Vec<usize> = (0..layers).map(|_| rng.gen_range(1..=32)).collect();
        let mut cfg = EvverConfig::new(rng.gen_range(1..=32), hidden);
        cfg.use_dcs = i % 2 == 0;
        cfg.l2 = if (i / 2) % 2 == 0 { 0.0 } else { 1e-3 };
        let report = grad_check(&cfg, 6, 1e-4, i as u64).map_err(|e| e.to_string())?;
        ensure(report.passed, || format!("config {cfg:?}: max relative error {:.3e} at {:?}", report.max_relative_error, report.worst))?;
        configs += 1;
        with_dcs[cfg.use_dcs as usize] += 1;
    }
    ensure(configs >= 20 && with_dcs.iter().all(|&n| n > 0), || format!("only {configs} configs"))
}

/// Gaussian clusters, centres `separation` apart along distinct axes.
fn gaussian_clusters(per_class: usize, dim: usize, separation: f32, rng: &mut ChaCha8Rng) -> (Array2<f32>, Vec<ClassLabel>) {
    let n = per_class * 3;
    let mut x = Array2::zeros((n, dim));
    let mut labels = Vec::with_capacity(n);
    for r in 0..n {
        let c = r % 3;
        for j in 0..dim {
            let z: f32 = StandardNormal.sample(rng);
            x[[r, j]] = z + if j == c { separation } else { 0.0 };
        }
        labels.push(ClassLabel::ALL[c]);
    }
    (x, labels)
}

fn held_out_accuracy(model: &evver::model::Model<f32>, set: &LabeledSet) -> Result<f64, String> {
    let pred = model.predict(set).map_err(|e| e.to_string())?;
    Ok(pred.iter().zip(&set.labels).filter(|(p, t)| p == t).count() as f64 / set.len() as f64)
}

fn training_sanity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let (x, labels) = gaussian_clusters(200, 16, 5.0, &mut rng);
    let all = LabeledSet::new(x, None, labels).map_err(|e| e.to_string())?;
    // 80/20 held-out split, classes interleaved so both halves stay balanced
    let train_rows: Vec<usize> = (0..all.len()).filter(|i| i % 5 != 0).collect();
    let test_rows: Vec<usize> = (0..all.len()).filter(|i| i % 5 == 0).collect();
    let (tr, te) = (all.subset(&train_rows), all.subset(&test_rows));

    let mut cfg = EvverConfig::new(16, vec![32]);
    cfg.learning_rate = 1e-3;
    cfg.max_epochs = 200;
    cfg.batch_size = 32;
    cfg.seed = 42;
    let a = train::<f32>(&tr, &cfg, None).map_err(|e| e.to_string())?;
    let acc = held_out_accuracy(&a, &te)?;
    ensure(acc >= 0.95, || format!("held-out accuracy {acc:.4}"))?;
    let b = train::<f32>(&tr, &cfg, None).map_err(|e| e.to_string())?;
    let bits = |m: &evver::model::Model<f32>| m.parameters().map(|v| v.to_bits()).collect::<Vec<u32>>();
    ensure(bits(&a) == bits(&b), || "two runs with seed 42 differ".into())
}

/// Labels follow the DCS bucket 70% of the time; embeddings are noise.
fn dcs_driven_set(n: usize, rng: &mut ChaCha8Rng) -> Result<LabeledSet, String> {
    let dim = 16;
    let mut x = Array2::zeros((n, dim));
    x.mapv_inplace(|_: f32| StandardNormal.sample(rng));
    let mut dcs = Vec::with_capacity(n);
    let mut labels = Vec::with_capacity(n);
    for _ in 0..n {
        let s: f32 = rng.gen();
        let bucket = ((s * 3.0) as usize).min(2);
        let label = if rng.gen::<f64>() < 0.7 { ClassLabel::ALL[bucket] } else { ClassLabel::ALL[rng.gen_range(0..3)] };
        dcs.push(s);
        labels.push(label);
    }
    LabeledSet::new(x, Some(dcs), labels).map_err(|e| e.to_string())
}

fn dcs_utility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let tr = dcs_driven_set(900, &mut rng)?;
    let te = dcs_driven_set(600, &mut rng)?;
    let mut cfg = EvverConfig::new(16, vec![32]);
    cfg.learning_rate = 1e-2;
    cfg.max_epochs = 150;
    cfg.batch_size = 64;
    cfg.dropout = 0.1;
    cfg.l2 = 1e-3;
    let without = train::<f32>(&tr, &cfg, None).map_err(|e| e.to_string())?;
    cfg.use_dcs = true;
    let with = train::<f32>(&tr, &cfg, None).map_err(|e| e.to_string())?;
    let (a_with, a_without) = (held_out_accuracy(&with, &te)?, held_out_accuracy(&without, &te)?);
    println!("      dcs utility: with {a_with:.4}, without {a_without:.4}");
    ensure(a_with - a_without >= 0.15, || format!("with {a_with:.4} vs without {a_without:.4}"))
}

// ---- filter

fn filter_invariants() -> Outcome {
    let strategy = prop::collection::vec((0.0f64..1.0, 0.0f64..1.0, 0.0f64..1.0), 0..200);
    let mut runner = TestRunner::new(Config { cases: 256, failure_persistence: None, ..Config::default() });
    runner
        .run(&strategy, |rows| {
            let items: Vec<EvidenceItem> = (0..rows.len())
                .map(|i| EvidenceItem { id: format!("e{i}"), text: format!("text {i}"), domain: None, kind: EvidenceKind::Short })
                .collect();
            let preds: Vec<Prediction> = rows
                .iter()
                .enumerate()
                .map(|(i, &(a, b, c))| {
                    let s = a + b + c + 1e-12;
                    Prediction::from_probabilities(format!("e{i}"), [a / s, b / s, c / s], false)
                })
                .collect();
            let kept = filter_credible(&items, &preds).unwrap();
            // subset, in input order
            let mut cursor = items.iter();
            for k in &kept {
                prop_assert!(cursor.any(|x| x == k));
            }
            let by_id: HashMap<&str, &Prediction> = preds.iter().map(|p| (p.item_id.as_str(), p)).collect();
            prop_assert!(kept.iter().all(|k| by_id[k.id.as_str()].label == ClassLabel::Credible));
            prop_assert_eq!(kept.len(), preds.iter().filter(|p| p.label == ClassLabel::Credible).count());
            let kept_preds: Vec<Prediction> = kept.iter().map(|k| by_id[k.id.as_str()].clone()).collect();
            prop_assert_eq!(filter_credible(&kept, &kept_preds).unwrap(), kept);
            Ok(())
        })
        .map_err(|e| e.to_string())
}

fn audit_arithmetic() -> Outcome {
    let mut preds = Vec::new();
    let mk = |i: usize, label: usize| {
        let mut p = [0.1; 3];
        p[label] = 0.8;
        Prediction::from_probabilities(format!("p{i}"), p, false)
    };
    for (label, count) in [(0, 10_084), (1, 102), (2, 52)] {
        for _ in 0..count {
            preds.push(mk(preds.len(), label));
        }
    }
    let r = audit("fixture", &preds).map_err(|e| e.to_string())?;
    ensure(r.summary_line() == "98.5% / 1.0% / 0.5% / 10,238", || format!("rendered {:?}", r.summary_line()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..200 {
        let n = rng.gen_range(1..5000);
        let preds: Vec<Prediction> = (0..n).map(|i| mk(i, rng.gen_range(0..3))).collect();
        let r = audit("random", &preds).map_err(|e| e.to_string())?;
        let mut counts = [0usize; 3];
        preds.iter().for_each(|p| counts[p.label.index()] += 1);
        ensure(r.counts == counts && r.sample_count == n, || format!("counts {:?} vs {counts:?}", r.counts))?;
        let pct = [r.percent_fact_checked, r.percent_credible, r.percent_unreliable];
        let tenths: Vec<i64> = pct.iter().map(|p| (p * 10.0).round() as i64).collect();
        ensure(tenths.iter().sum::<i64>() == 1000, || format!("{pct:?} does not sum to 100"))?;
        for (p, c) in pct.iter().zip(counts) {
            let exact = 100.0 * c as f64 / n as f64;
            ensure((p - exact).abs() < 0.1 + 1e-9, || format!("{p} vs exact {exact}"))?;
        }
    }
    Ok(())
}

// ---- dataset

fn fixture_corpus(rng: &mut ChaCha8Rng) -> Vec<Article> {
    let topics = ["politics", "wellness", "sports", "business"];
    let mut out = Vec::new();
    let plan = [
        (ClassLabel::FactChecked, SourceDataset::Multifc, 70),
        (ClassLabel::Credible, SourceDataset::Fnc, 60),
        (ClassLabel::Credible, SourceDataset::Nelagt, 60),
        (ClassLabel::Unreliable, SourceDataset::Nelagt, 50),
        (ClassLabel::Unreliable, SourceDataset::Grafn, 60),
    ];
    for (label, source, n) in plan {
        for i in 0..n {
            let title = format!("{} {} headline {i}", label.name(), source.name());
            let date = NaiveDate::from_ymd_opt(rng.gen_range(2016..=2022), rng.gen_range(1..=12), rng.gen_range(1..=28)).unwrap();
            out.push(Article {
                id: article_id(&title, source),
                url: format!("https://{}.example/{i}", source.name()),
                domain: format!("{}.example", source.name()),
                title,
                body: None,
                date,
                topic: topics[rng.gen_range(0..topics.len())].into(),
                label,
                source_dataset: source,
            });
        }
    }
    out
}

fn split_balance() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let corpus = fixture_corpus(&mut rng);
    ensure(corpus.len() == 300, || format!("fixture has {}", corpus.len()))?;
    let topics = TopicMap::shipped();
    let a = build_dataset(corpus.clone(), &topics, 42).map_err(|e| e.to_string())?;
    let mut shuffled = corpus;
    shuffled.reverse();
    let b = build_dataset(shuffled, &topics, 42).map_err(|e| e.to_string())?;
    let hashes = |o: &evver::pipeline::BuildOutput| o.splits.iter().map(|s| s.id_hash()).collect::<Vec<_>>();
    ensure(hashes(&a) == hashes(&b), || "split id-hashes differ between runs".into())?;

    let mut per_year: BTreeMap<i32, [usize; 3]> = BTreeMap::new();
    for x in &a.corpus {
        per_year.entry(x.year()).or_default()[x.label.index()] += 1;
    }
    let mut missing: BTreeMap<(i32, ClassLabel), usize> = BTreeMap::new();
    for s in &a.shortfalls {
        *missing.entry((s.year, s.label)).or_default() += s.missing();
    }
    for (year, counts) in &per_year {
        for label in [ClassLabel::Credible, ClassLabel::Unreliable] {
            let gap = counts[0] - counts[label.index()];
            let recorded = missing.get(&(*year, label)).copied().unwrap_or(0);
            ensure(gap == recorded, || format!("{year} {label}: gap {gap}, recorded shortfall {recorded}"))?;
        }
    }

    for label in ClassLabel::ALL {
        let n = a.corpus.iter().filter(|x| x.label == label).count();
        let in_split = |k: usize| a.splits[k].article_ids.iter().filter(|id| a.corpus.iter().any(|x| &x.id == *id && x.label == label)).count();
        let sizes = [in_split(0), in_split(1), in_split(2)];
        let want = [n * 8 / 10, n / 10, n - n * 8 / 10 - n / 10];
        ensure(sizes == want, || format!("{label}: split sizes {sizes:?}, want {want:?}"))?;
    }
    Ok(())
}

// ---- baselines

fn sparse(dense: &[f64]) -> SparseVector<f64> {
    SparseVector::from_dense(dense)
}

fn baseline_oracles() -> Outcome {
    use ClassLabel::*;
    // 4-document hand corpus over vocabulary [check, claim, fake, good, news]
    let docs = [[1.0, 1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 0.0, 2.0, 1.0], [0.0, 0.0, 2.0, 0.0, 1.0], [0.0, 0.0, 0.0, 1.0, 0.0]];
    let labels = [FactChecked, Credible, Unreliable, Credible];
    let xs: Vec<_> = docs.iter().map(|d| sparse(d)).collect();
    let nb = fit_naive_bayes(&xs, &labels, 1.0).map_err(|e| e.to_string())?;
    // class totals: fc 2 tokens, cr 4, un 3; V = 5, alpha 1
    let theta: [[f64; 5]; 3] = [
        [2.0 / 7.0, 2.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0, 1.0 / 7.0],
        [1.0 / 9.0, 1.0 / 9.0, 1.0 / 9.0, 4.0 / 9.0, 2.0 / 9.0],
        [1.0 / 8.0, 1.0 / 8.0, 3.0 / 8.0, 1.0 / 8.0, 2.0 / 8.0],
    ];
    let prior = [0.25, 0.5, 0.25];
    let queries = [[0.0, 0.0, 0.0, 1.0, 1.0], [0.0, 1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0, 1.0], [1.0, 0.0, 0.0, 1.0, 0.0], [0.0; 5]];
    for q in queries {
        let joint: Vec<f64> = (0..3).map(|c| prior[c] * (0..5).map(|j| theta[c][j].powf(q[j])).product::<f64>()).collect();
        let z: f64 = joint.iter().sum();
        let posterior: Vec<f64> = joint.iter().map(|j| j / z).collect();
        let want = evver::model::argmax_label(&posterior);
        let got = nb.predict(&sparse(&q));
        ensure(got == want, || format!("nb on {q:?}: {got} vs oracle {want}"))?;
        let jll = nb.joint_log_likelihood(&sparse(&q));
        let m = jll.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let zl: f64 = jll.iter().map(|v| (v - m).exp()).sum();
        for c in 0..3 {
            let p = (jll[c] - m).exp() / zl;
            ensure((p - posterior[c]).abs() < 1e-12, || format!("posterior class {c} on {q:?}: {p} vs {}", posterior[c]))?;
        }
    }

    let xs: Vec<_> = [0.1, 0.2, 0.3, 0.4, 0.6, 0.7, 0.8, 0.9].iter().map(|v| sparse(&[*v])).collect();
    let ys = [Credible, Credible, Credible, Credible, Unreliable, Unreliable, Unreliable, Unreliable];
    let tree = fit_decision_tree(&xs, &ys, 5, 1).map_err(|e| e.to_string())?;
    ensure(tree.depth() == 1, || format!("tree depth {}", tree.depth()))?;
    match &tree.root {
        TreeNode::Split { feature: 0, threshold, .. } => ensure((threshold - 0.5).abs() < 1e-12, || format!("threshold {threshold}"))?,
        other => return Err(format!("root is {other:?}")),
    }

    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let dim = 6;
    let xs: Vec<_> = (0..12).map(|_| sparse(&(0..dim).map(|_| if rng.gen_bool(0.6) { rng.gen_range(-1.0..1.0) } else { 0.0 }).collect::<Vec<_>>())).collect();
    let ys: Vec<ClassLabel> = (0..12).map(|i| ClassLabel::ALL[i % 3]).collect();
    let mut model = LogReg::zeros(dim);
    model.weights.iter_mut().for_each(|w| *w = rng.gen_range(-0.5..0.5));
    model.bias = [0.1, -0.2, 0.05];
    for l2 in [0.0, 1e-2] {
        let (_, gw, gb) = model.loss_and_gradient(&xs, &ys, l2);
        let h = 1e-6;
        let rel = |a: f64, n: f64| (a - n).abs() / (a.abs() + n.abs()).max(1e-6);
        for k in 0..gw.len() + 3 {
            let bump = |m: &mut LogReg, d: f64| if k < gw.len() { m.weights[k] += d } else { m.bias[k - gw.len()] += d };
            let mut plus = model.clone();
            bump(&mut plus, h);
            let mut minus = model.clone();
            bump(&mut minus, -h);
            let numeric = (plus.loss(&xs, &ys, l2) - minus.loss(&xs, &ys, l2)) / (2.0 * h);
            let analytic = if k < gw.len() { gw[k] } else { gb[k - gw.len()] };
            ensure(rel(analytic, numeric) < 1e-4, || format!("logreg param {k} l2 {l2}: {analytic} vs {numeric}"))?;
        }
    }
    Ok(())
}
