//! Statistical text features (token counts, TF-IDF) and precomputed
//! transformer embeddings.

mod embeddings;
mod sparse_file;

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

pub use embeddings::{load_embeddings, save_embeddings, EmbeddingError, EmbeddingSet, Manifest, Pooling, EMBEDDING_MAGIC, EMBEDDING_VERSION};
pub use sparse_file::{read_sparse_matrix, write_sparse_matrix, SparseFileError};

/// Default vocabulary cap.
pub const DEFAULT_MAX_FEATURES: usize = 50_000;

/// Lowercases and splits on every run of non-alphanumeric characters.
pub fn tokenize(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// Sparse vector with strictly increasing indices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SparseVector<T> {
    pub dim: usize,
    pub indices: Vec<usize>,
    pub values: Vec<T>,
}

impl<T: Copy + Default> SparseVector<T> {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, indices: Vec::new(), values: Vec::new() }
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.indices.iter().copied().zip(self.values.iter().copied())
    }

    pub fn to_dense(&self) -> Vec<T> {
        let mut dense = vec![T::default(); self.dim];
        for (i, v) in self.iter() {
            dense[i] = v;
        }
        dense
    }
}

impl SparseVector<f64> {
    pub fn l2_norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn from_dense(dense: &[f64]) -> Self {
        let mut out = Self::zeros(dense.len());
        for (i, &v) in dense.iter().enumerate() {
            if v != 0.0 {
                out.indices.push(i);
                out.values.push(v);
            }
        }
        out
    }
}

impl From<SparseVector<u32>> for SparseVector<f64> {
    fn from(v: SparseVector<u32>) -> Self {
        SparseVector { dim: v.dim, indices: v.indices, values: v.values.into_iter().map(f64::from).collect() }
    }
}

/// Fitted token vocabulary with document frequencies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(from = "VocabularyRepr")]
pub struct Vocabulary {
    tokens: Vec<String>,
    document_frequency: Vec<u32>,
    corpus_size: usize,
    #[serde(skip)]
    index: HashMap<String, usize>,
}

impl Vocabulary {
    /// Builds a vocabulary from explicit entries `(token, df)`; indices follow
    /// lexicographic token order.
    pub fn from_entries<I, S>(entries: I, corpus_size: usize) -> Self
    where
        I: IntoIterator<Item = (S, u32)>,
        S: Into<String>,
    {
        let sorted: BTreeMap<String, u32> = entries.into_iter().map(|(t, df)| (t.into(), df)).collect();
        let (tokens, document_frequency): (Vec<_>, Vec<_>) = sorted.into_iter().unzip();
        let mut vocab = Self { tokens, document_frequency, corpus_size, index: HashMap::new() };
        vocab.rebuild_index();
        vocab
    }

    fn rebuild_index(&mut self) {
        self.index = self.tokens.iter().enumerate().map(|(i, t)| (t.clone(), i)).collect();
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn corpus_size(&self) -> usize {
        self.corpus_size
    }

    pub fn index_of(&self, token: &str) -> Option<usize> {
        self.index.get(token).copied()
    }

    pub fn token(&self, index: usize) -> &str {
        &self.tokens[index]
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    pub fn document_frequency(&self, index: usize) -> u32 {
        self.document_frequency[index]
    }

    /// Smoothed inverse document frequency: `ln((1+N)/(1+df)) + 1`.
    pub fn idf(&self, index: usize) -> f64 {
        let n = self.corpus_size as f64;
        let df = self.document_frequency[index] as f64;
        ((1.0 + n) / (1.0 + df)).ln() + 1.0
    }
}

#[derive(Deserialize)]
struct VocabularyRepr {
    tokens: Vec<String>,
    document_frequency: Vec<u32>,
    corpus_size: usize,
}

impl From<VocabularyRepr> for Vocabulary {
    fn from(repr: VocabularyRepr) -> Self {
        let mut vocab =
            Vocabulary { tokens: repr.tokens, document_frequency: repr.document_frequency, corpus_size: repr.corpus_size, index: HashMap::new() };
        vocab.rebuild_index();
        vocab
    }
}

/// Keeps the `max_features` tokens with the highest document frequency,
/// ties broken lexicographically.
pub fn fit_vocabulary<S: AsRef<str> + Sync>(corpus: &[S], max_features: usize) -> Vocabulary {
    use rayon::prelude::*;

    let df = corpus
        .par_iter()
        .fold(HashMap::<String, u32>::new, |mut acc, doc| {
            let unique: HashSet<String> = tokenize(doc.as_ref()).into_iter().collect();
            for token in unique {
                *acc.entry(token).or_default() += 1;
            }
            acc
        })
        .reduce(HashMap::new, |mut a, b| {
            for (token, count) in b {
                *a.entry(token).or_default() += count;
            }
            a
        });

    let mut ranked: Vec<(String, u32)> = df.into_iter().collect();
    ranked.sort_unstable_by(|(ta, da), (tb, db)| db.cmp(da).then_with(|| ta.cmp(tb)));
    ranked.truncate(max_features);
    Vocabulary::from_entries(ranked, corpus.len())
}

fn raw_counts(text: &str, vocab: &Vocabulary) -> BTreeMap<usize, u32> {
    let mut counts = BTreeMap::new();
    for token in tokenize(text) {
        if let Some(i) = vocab.index_of(&token) {
            *counts.entry(i).or_insert(0) += 1;
        }
    }
    counts
}

/// Raw token counts restricted to the vocabulary.
pub fn count_vector(text: &str, vocab: &Vocabulary) -> SparseVector<u32> {
    let counts = raw_counts(text, vocab);
    let (indices, values) = counts.into_iter().unzip();
    SparseVector { dim: vocab.len(), indices, values }
}

/// Raw-count tf times smoothed idf, L2-normalized. A document with no
/// in-vocabulary tokens stays the zero vector.
pub fn tfidf_vector(text: &str, vocab: &Vocabulary) -> SparseVector<f64> {
    let counts = raw_counts(text, vocab);
    let mut out = SparseVector::zeros(vocab.len());
    for (i, c) in counts {
        out.indices.push(i);
        out.values.push(c as f64 * vocab.idf(i));
    }
    let norm = out.l2_norm();
    if norm > 0.0 {
        out.values.iter_mut().for_each(|v| *v /= norm);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Count,
    Tfidf,
}

/// Vectorizes a batch of documents in parallel, preserving order.
pub fn vectorize<S: AsRef<str> + Sync>(docs: &[S], vocab: &Vocabulary, mode: FeatureMode) -> Vec<SparseVector<f64>> {
    use rayon::prelude::*;
    docs.par_iter()
        .map(|d| match mode {
            FeatureMode::Count => count_vector(d.as_ref(), vocab).into(),
            FeatureMode::Tfidf => tfidf_vector(d.as_ref(), vocab),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn tokenizer_rules() {
        assert_eq!(tokenize("Biden said X!"), vec!["biden", "said", "x"]);
        assert!(tokenize("").is_empty());
        assert_eq!(tokenize("COVID-19 cure"), vec!["covid", "19", "cure"]);
    }

    #[test]
    fn vocabulary_top_k_with_lexicographic_ties() {
        let vocab = fit_vocabulary(&["a b", "b c"], 2);
        assert_eq!(vocab.len(), 2);
        assert_eq!(vocab.tokens(), &["a".to_string(), "b".to_string()]);
        assert_eq!(vocab.document_frequency(vocab.index_of("b").unwrap()), 2);
        assert_eq!(vocab.document_frequency(vocab.index_of("a").unwrap()), 1);
        assert!(vocab.index_of("c").is_none());

        let all = fit_vocabulary(&["a b", "b c"], 100);
        assert_eq!(all.len(), 3);
        assert_eq!(fit_vocabulary(&["a b", "b c"], 2), vocab);
    }

    #[test]
    fn counts() {
        let vocab = Vocabulary::from_entries([("a", 1), ("b", 1)], 1);
        assert_eq!(count_vector("b b a", &vocab).to_dense(), vec![1, 2]);
        assert_eq!(count_vector("zzz qq", &vocab).nnz(), 0);
        assert_eq!(count_vector("a b b", &vocab), count_vector("b a b", &vocab));
    }

    #[test]
    fn tfidf_two_doc_example() {
        let vocab = fit_vocabulary(&["a b", "b"], 10);
        let v = tfidf_vector("a b", &vocab);
        let wa = (3.0f64 / 2.0).ln() + 1.0;
        let wb = 1.0;
        let norm = (wa * wa + wb * wb).sqrt();
        let dense = v.to_dense();
        assert!((dense[vocab.index_of("a").unwrap()] - wa / norm).abs() < 1e-12);
        assert!((dense[vocab.index_of("b").unwrap()] - wb / norm).abs() < 1e-12);
    }

    #[test]
    fn tfidf_zero_vector_has_no_nan() {
        let vocab = fit_vocabulary(&["a b"], 10);
        let v = tfidf_vector("nothing here", &vocab);
        assert_eq!(v.nnz(), 0);
        assert_eq!(v.l2_norm(), 0.0);
    }

    #[test]
    fn identical_docs_give_identical_vectors() {
        let docs = ["x y y", "x y y", "x y y"];
        let vocab = fit_vocabulary(&docs, 10);
        let vs = vectorize(&docs, &vocab, FeatureMode::Tfidf);
        assert!(vs.windows(2).all(|w| w[0] == w[1]));
    }

    proptest! {
        #[test]
        fn vocabulary_is_order_invariant(mut docs in proptest::collection::vec("[a-e ]{0,20}", 1..12), k in 1usize..6) {
            let a = fit_vocabulary(&docs, k);
            docs.reverse();
            let b = fit_vocabulary(&docs, k);
            prop_assert_eq!(a, b);
        }

        #[test]
        fn tfidf_norm_is_zero_or_one(docs in proptest::collection::vec("[a-f ]{0,30}", 1..10)) {
            let vocab = fit_vocabulary(&docs, 4);
            for d in &docs {
                let n = tfidf_vector(d, &vocab).l2_norm();
                prop_assert!(n == 0.0 || (n - 1.0).abs() < 1e-12);
            }
        }
    }
}
