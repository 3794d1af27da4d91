use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::types::{Article, ClassLabel};

/// Largest allowed gap between two classes' title-length CDFs.
pub const TITLE_KS_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total: usize,
    /// Indexed by class code.
    pub per_class: [usize; 3],
    pub per_year: BTreeMap<i32, [usize; 3]>,
    /// Mean title length in whitespace tokens, per class.
    pub title_len_mean: [f64; 3],
    pub title_len_std: [f64; 3],
    /// Percent of articles with a body.
    pub full_text_coverage: f64,
    /// Max over class pairs of the KS distance between title-length
    /// distributions.
    pub title_len_ks: f64,
    pub title_len_balanced: bool,
}

fn ks_distance(a: &[usize], b: &[usize]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return 0.0;
    }
    let mut points: Vec<usize> = a.iter().chain(b).copied().collect();
    points.sort_unstable();
    points.dedup();
    let cdf = |v: &[usize], x: usize| v.iter().filter(|&&t| t <= x).count() as f64 / v.len() as f64;
    points.into_iter().map(|x| (cdf(a, x) - cdf(b, x)).abs()).fold(0.0, f64::max)
}

pub fn corpus_stats(corpus: &[Article]) -> CorpusStats {
    let mut s = CorpusStats { total: corpus.len(), ..Default::default() };
    let mut lengths: [Vec<usize>; 3] = Default::default();
    let mut with_body = 0;
    for a in corpus {
        let c = a.label.index();
        s.per_class[c] += 1;
        s.per_year.entry(a.year()).or_insert([0; 3])[c] += 1;
        lengths[c].push(a.title.split_whitespace().count());
        with_body += usize::from(a.has_body());
    }
    for c in 0..3 {
        let n = lengths[c].len();
        if n == 0 {
            continue;
        }
        let mean = lengths[c].iter().sum::<usize>() as f64 / n as f64;
        s.title_len_mean[c] = mean;
        s.title_len_std[c] = (lengths[c].iter().map(|&l| (l as f64 - mean).powi(2)).sum::<f64>() / n as f64).sqrt();
    }
    if !corpus.is_empty() {
        s.full_text_coverage = 100.0 * with_body as f64 / corpus.len() as f64;
    }
    s.title_len_ks = [(0, 1), (0, 2), (1, 2)].iter().map(|&(i, j)| ks_distance(&lengths[i], &lengths[j])).fold(0.0, f64::max);
    s.title_len_balanced = s.title_len_ks <= TITLE_KS_LIMIT;
    s
}

impl CorpusStats {
    pub fn render(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("{:<14}{:>10}{:>12}{:>10}\n", "class", "articles", "title mean", "std"));
        for l in ClassLabel::ALL {
            let c = l.index();
            out.push_str(&format!("{:<14}{:>10}{:>12.2}{:>10.2}\n", l.heading(), self.per_class[c], self.title_len_mean[c], self.title_len_std[c]));
        }
        out.push_str(&format!("{:<14}{:>10}\n", "total", self.total));
        out.push_str(&format!("full text coverage {:.1}%\n", self.full_text_coverage));
        out.push_str(&format!(
            "title length KS gap {:.3} ({})\n",
            self.title_len_ks,
            if self.title_len_balanced { "balanced" } else { "above 0.05" }
        ));
        out.push_str(&format!("{:<6}{:>14}{:>10}{:>12}\n", "year", "fact-checked", "credible", "unreliable"));
        for (y, c) in &self.per_year {
            out.push_str(&format!("{:<6}{:>14}{:>10}{:>12}\n", y, c[0], c[1], c[2]));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::tests::article;
    use crate::types::SourceDataset;

    #[test]
    fn empty_corpus_is_all_zero() {
        let s = corpus_stats(&[]);
        assert_eq!(s, CorpusStats { title_len_balanced: true, ..Default::default() });
    }

    #[test]
    fn hand_counted() {
        let mut a = vec![
            article("one two", (2017, 1, 1), "x", ClassLabel::FactChecked, SourceDataset::Multifc),
            article("one two three four", (2017, 1, 1), "x", ClassLabel::FactChecked, SourceDataset::Multifc),
            article("a b c", (2018, 1, 1), "x", ClassLabel::Credible, SourceDataset::Fnc),
            article("a b c", (2018, 2, 1), "x", ClassLabel::Unreliable, SourceDataset::Grafn),
        ];
        a[0].body = Some("text".into());
        let s = corpus_stats(&a);
        assert_eq!(s.per_class, [2, 1, 1]);
        assert_eq!(s.per_year[&2017], [2, 0, 0]);
        assert_eq!(s.title_len_mean[0], 3.0);
        assert_eq!(s.title_len_std[0], 1.0);
        assert_eq!(s.full_text_coverage, 25.0);
        // fact-checked CDF at 3 is 0.5, credible is 1.0
        assert_eq!(s.title_len_ks, 0.5);
        assert!(!s.title_len_balanced);
        assert!(s.render().contains("Fact-checked"));
    }

    #[test]
    fn ks_of_identical_samples_is_zero() {
        assert_eq!(ks_distance(&[1, 2, 3], &[3, 2, 1]), 0.0);
        assert_eq!(ks_distance(&[1, 1], &[5, 5]), 1.0);
    }
}
