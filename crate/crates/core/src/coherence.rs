//! C_v topic coherence: boolean sliding-window probability estimation,
//! NPMI context vectors, indirect cosine confirmation, arithmetic-mean
//! aggregation.
//!
//! The reference corpus for probability estimation is the same
//! preprocessed corpus the model was fitted on. Documents shorter than
//! the window width contribute one truncated window.

use std::collections::{BTreeSet, HashMap};
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::preprocess::TokenizedDocument;

#[derive(Debug, Error)]
pub enum CoherenceError {
    #[error("word {0:?} does not occur in the reference corpus")]
    WordNotInCorpus(String),
    #[error("topic has {got} words, need at least 2")]
    TopicTooSmall { got: usize },
    #[error("invalid config: {0}")]
    InvalidConfig(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoherenceConfig {
    /// Words per topic fed to the measure.
    pub top_n: usize,
    /// Sliding-window width in tokens.
    pub window: usize,
    /// Smoothing constant inside the NPMI logarithms.
    pub epsilon: f64,
    /// Exponent applied to NPMI values in the context vectors.
    pub gamma: f64,
}

impl Default for CoherenceConfig {
    fn default() -> Self {
        CoherenceConfig {
            top_n: 10,
            window: 110,
            epsilon: 1e-12,
            gamma: 1.0,
        }
    }
}

impl CoherenceConfig {
    fn validate(&self) -> Result<(), CoherenceError> {
        if self.top_n < 2 {
            return Err(CoherenceError::InvalidConfig("top_n < 2".into()));
        }
        if self.window < 2 {
            return Err(CoherenceError::InvalidConfig("window < 2".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(CoherenceError::InvalidConfig("epsilon <= 0".into()));
        }
        if !(self.gamma > 0.0) {
            return Err(CoherenceError::InvalidConfig("gamma <= 0".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceScore {
    pub value: f64,
    pub per_topic: Vec<f64>,
    /// Number of values pushed back into [0,1] by float error.
    pub clamp_events: usize,
}

/// Boolean sliding-window counts over the corpus, restricted to a set of
/// words of interest. Pair keys are ordered `(min, max)`.
#[derive(Debug, Clone)]
pub struct WindowCounts {
    total_windows: usize,
    word_windows: HashMap<String, usize>,
    pair_windows: HashMap<(String, String), usize>,
}

impl WindowCounts {
    pub fn total_windows(&self) -> usize {
        self.total_windows
    }

    pub fn windows_with(&self, word: &str) -> usize {
        self.word_windows.get(word).copied().unwrap_or(0)
    }

    pub fn windows_with_pair(&self, w1: &str, w2: &str) -> usize {
        if w1 == w2 {
            return self.windows_with(w1);
        }
        let key = if w1 < w2 {
            (w1.to_string(), w2.to_string())
        } else {
            (w2.to_string(), w1.to_string())
        };
        self.pair_windows.get(&key).copied().unwrap_or(0)
    }

    pub fn prob(&self, word: &str) -> f64 {
        self.windows_with(word) as f64 / self.total_windows as f64
    }

    pub fn joint_prob(&self, w1: &str, w2: &str) -> f64 {
        self.windows_with_pair(w1, w2) as f64 / self.total_windows as f64
    }
}

/// Counts boolean sliding windows of the given width. A document of
/// length L contributes max(1, L - window + 1) windows (empty documents
/// contribute none).
pub fn sliding_window_counts(
    docs: &[TokenizedDocument],
    window: usize,
    words_of_interest: &BTreeSet<String>,
) -> WindowCounts {
    let mut counts = WindowCounts {
        total_windows: 0,
        word_windows: HashMap::new(),
        pair_windows: HashMap::new(),
    };
    for doc in docs {
        let len = doc.tokens.len();
        if len == 0 {
            continue;
        }
        let n_windows = if len >= window { len - window + 1 } else { 1 };
        for start in 0..n_windows {
            let end = (start + window).min(len);
            counts.total_windows += 1;
            let mut present: BTreeSet<&str> = BTreeSet::new();
            for tok in &doc.tokens[start..end] {
                if words_of_interest.contains(tok) {
                    present.insert(tok.as_str());
                }
            }
            let present: Vec<&str> = present.into_iter().collect();
            for (i, w1) in present.iter().enumerate() {
                *counts.word_windows.entry(w1.to_string()).or_insert(0) += 1;
                for w2 in &present[i + 1..] {
                    *counts
                        .pair_windows
                        .entry((w1.to_string(), w2.to_string()))
                        .or_insert(0) += 1;
                }
            }
        }
    }
    counts
}

/// Normalized pointwise mutual information with epsilon smoothing:
/// `log((P12 + eps) / (P1 * P2)) / (-log(P12 + eps))`.
pub fn npmi(
    w1: &str,
    w2: &str,
    counts: &WindowCounts,
    epsilon: f64,
) -> Result<f64, CoherenceError> {
    let p1 = counts.prob(w1);
    let p2 = counts.prob(w2);
    if p1 <= 0.0 {
        return Err(CoherenceError::WordNotInCorpus(w1.to_string()));
    }
    if p2 <= 0.0 {
        return Err(CoherenceError::WordNotInCorpus(w2.to_string()));
    }
    let p12 = counts.joint_prob(w1, w2) + epsilon;
    Ok((p12 / (p1 * p2)).ln() / -p12.ln())
}

fn signed_pow(x: f64, gamma: f64) -> f64 {
    x.signum() * x.abs().powf(gamma)
}

fn cosine(a: &[f64], b: &[f64]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| x * y).sum();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Scores a list of topics (word lists) against the reference corpus.
///
/// One-set segmentation: each word of a topic W is confirmed against the
/// whole set via the cosine between its NPMI^gamma context vector and the
/// elementwise sum of all context vectors of W.
pub fn cv_score(
    topics: &[Vec<String>],
    docs: &[TokenizedDocument],
    cfg: &CoherenceConfig,
) -> Result<CoherenceScore, CoherenceError> {
    cfg.validate()?;
    for topic in topics {
        if topic.len() < 2 {
            return Err(CoherenceError::TopicTooSmall { got: topic.len() });
        }
    }
    let words: BTreeSet<String> = topics.iter().flatten().cloned().collect();
    let counts = sliding_window_counts(docs, cfg.window, &words);
    let mut per_topic = Vec::with_capacity(topics.len());
    let mut clamp_events = 0usize;
    for topic in topics {
        let n = topic.len();
        let mut vectors: Vec<Vec<f64>> = Vec::with_capacity(n);
        for w in topic {
            let mut v = Vec::with_capacity(n);
            for w2 in topic {
                v.push(signed_pow(npmi(w, w2, &counts, cfg.epsilon)?, cfg.gamma));
            }
            vectors.push(v);
        }
        let mut sum_vec = vec![0.0; n];
        for v in &vectors {
            for (s, x) in sum_vec.iter_mut().zip(v) {
                *s += x;
            }
        }
        let subscore =
            vectors.iter().map(|v| cosine(v, &sum_vec)).sum::<f64>() / n as f64;
        per_topic.push(subscore);
    }
    let raw = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
    let value = if raw < 0.0 {
        if raw < -1e-9 {
            clamp_events += 1;
        }
        0.0
    } else if raw > 1.0 {
        if raw > 1.0 + 1e-9 {
            clamp_events += 1;
        }
        1.0
    } else {
        raw
    };
    Ok(CoherenceScore {
        value,
        per_topic,
        clamp_events,
    })
}

/// Debug dump: all within-topic NPMI pairs as CSV `w1,w2,npmi`.
pub fn dump_npmi_csv(
    topics: &[Vec<String>],
    docs: &[TokenizedDocument],
    cfg: &CoherenceConfig,
    path: &Path,
) -> Result<(), CoherenceError> {
    let words: BTreeSet<String> = topics.iter().flatten().cloned().collect();
    let counts = sliding_window_counts(docs, cfg.window, &words);
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "w1,w2,npmi")?;
    for topic in topics {
        for w1 in topic {
            for w2 in topic {
                let v = npmi(w1, w2, &counts, cfg.epsilon)?;
                writeln!(f, "{w1},{w2},{v:.9}")?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::NaiveDate;

    fn tokdoc(id: &str, tokens: &[&str]) -> TokenizedDocument {
        TokenizedDocument {
            id: id.into(),
            date: NaiveDate::from_ymd_opt(2005, 2, 2).unwrap(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
        }
    }

    fn interest(words: &[&str]) -> BTreeSet<String> {
        words.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn window_enumeration_by_hand() {
        let docs = vec![tokdoc("d", &["a", "b", "a"])];
        let counts = sliding_window_counts(&docs, 2, &interest(&["a", "b"]));
        assert_eq!(counts.total_windows(), 2);
        assert_eq!(counts.windows_with("a"), 2);
        assert_eq!(counts.windows_with("b"), 2);
        assert_eq!(counts.windows_with_pair("a", "b"), 2);
    }

    #[test]
    fn short_document_single_window() {
        let docs = vec![tokdoc("d", &["only"])];
        let counts = sliding_window_counts(&docs, 110, &interest(&["only"]));
        assert_eq!(counts.total_windows(), 1);
        assert_eq!(counts.prob("only"), 1.0);
    }

    #[test]
    fn disjoint_documents_no_cross_pairs() {
        let docs = vec![tokdoc("d1", &["a", "b"]), tokdoc("d2", &["x", "y"])];
        let counts = sliding_window_counts(&docs, 5, &interest(&["a", "b", "x", "y"]));
        assert_eq!(counts.windows_with_pair("a", "x"), 0);
        assert_eq!(counts.windows_with_pair("b", "y"), 0);
    }

    #[test]
    fn npmi_perfect_cooccurrence() {
        // p(w1)=p(w2)=p(w1,w2)=0.5: NPMI -> 1 as eps -> 0.
        let docs = vec![tokdoc("d1", &["a", "b"]), tokdoc("d2", &["c", "d"])];
        let counts = sliding_window_counts(&docs, 5, &interest(&["a", "b", "c", "d"]));
        let v = npmi("a", "b", &counts, 1e-12).unwrap();
        assert!((v - 1.0).abs() < 1e-9, "npmi = {v}");
    }

    #[test]
    fn npmi_never_cooccurring_large_negative() {
        let docs = vec![tokdoc("d1", &["a", "b"]), tokdoc("d2", &["c", "d"])];
        let counts = sliding_window_counts(&docs, 5, &interest(&["a", "b", "c", "d"]));
        let v = npmi("a", "c", &counts, 1e-12).unwrap();
        assert!(v < -0.9, "npmi = {v}");
    }

    #[test]
    fn npmi_independent_words_near_zero() {
        // In 4 windows: w1 in {1,2}, w2 in {1,3}: P(w1)=P(w2)=0.5,
        // P(w1,w2)=0.25 = P(w1)P(w2).
        let docs = vec![
            tokdoc("d1", &["a", "b"]),
            tokdoc("d2", &["a", "q"]),
            tokdoc("d3", &["b", "q"]),
            tokdoc("d4", &["q", "q"]),
        ];
        let counts = sliding_window_counts(&docs, 5, &interest(&["a", "b"]));
        let v = npmi("a", "b", &counts, 1e-12).unwrap();
        assert!(v.abs() < 1e-9, "npmi = {v}");
    }

    #[test]
    fn npmi_unknown_word() {
        let docs = vec![tokdoc("d1", &["a"])];
        let counts = sliding_window_counts(&docs, 5, &interest(&["a", "zz"]));
        assert!(matches!(
            npmi("a", "zz", &counts, 1e-12),
            Err(CoherenceError::WordNotInCorpus(_))
        ));
    }

    fn coherent_corpus() -> Vec<TokenizedDocument> {
        // Topic words co-occur in every window that contains any of them,
        // but with marginal probability 0.5 so NPMI is ~1, not degenerate.
        let topic: Vec<&str> = vec!["t0", "t1", "t2", "t3"];
        let other: Vec<&str> = vec!["o0", "o1", "o2", "o3"];
        vec![
            tokdoc("d1", &topic),
            tokdoc("d2", &other),
            tokdoc("d3", &topic),
            tokdoc("d4", &other),
        ]
    }

    #[test]
    fn fully_coherent_topic_scores_one() {
        let docs = coherent_corpus();
        let cfg = CoherenceConfig {
            top_n: 4,
            ..Default::default()
        };
        let topics = vec![vec!["t0".into(), "t1".into(), "t2".into(), "t3".into()]];
        let score = cv_score(&topics, &docs, &cfg).unwrap();
        assert!(score.value >= 0.99, "score = {}", score.value);
    }

    #[test]
    fn deterministic() {
        let docs = coherent_corpus();
        let cfg = CoherenceConfig {
            top_n: 4,
            ..Default::default()
        };
        let topics = vec![vec!["t0".into(), "t1".into(), "t2".into(), "t3".into()]];
        let s1 = cv_score(&topics, &docs, &cfg).unwrap();
        let s2 = cv_score(&topics, &docs, &cfg).unwrap();
        assert_eq!(s1, s2);
    }

    #[test]
    fn coherent_beats_incoherent() {
        // i0..i2 never share a window.
        let docs = vec![
            tokdoc("d1", &["c0", "c1", "c2"]),
            tokdoc("d2", &["c0", "c1", "c2"]),
            tokdoc("d3", &["i0", "f0"]),
            tokdoc("d4", &["i1", "f1"]),
            tokdoc("d5", &["i2", "f2"]),
        ];
        let cfg = CoherenceConfig {
            top_n: 3,
            ..Default::default()
        };
        let topics = vec![
            vec!["c0".into(), "c1".into(), "c2".into()],
            vec!["i0".into(), "i1".into(), "i2".into()],
        ];
        let score = cv_score(&topics, &docs, &cfg).unwrap();
        assert!(
            score.per_topic[0] > score.per_topic[1],
            "per_topic = {:?}",
            score.per_topic
        );
        assert!(score.value >= 0.0 && score.value <= 1.0);
    }

    #[test]
    fn invariant_under_permutations() {
        let docs = coherent_corpus();
        let cfg = CoherenceConfig {
            top_n: 4,
            ..Default::default()
        };
        let t1 = vec!["t0".into(), "t1".into(), "t2".into(), "t3".into()];
        let t2 = vec!["o0".into(), "o1".into(), "o2".into(), "o3".into()];
        let t1_shuffled = vec!["t2".into(), "t0".into(), "t3".into(), "t1".into()];
        let a = cv_score(&[t1.clone(), t2.clone()], &docs, &cfg).unwrap();
        let b = cv_score(&[t2, t1_shuffled], &docs, &cfg).unwrap();
        assert!((a.value - b.value).abs() < 1e-12);
    }

    #[test]
    fn missing_topic_word_is_an_error() {
        let docs = coherent_corpus();
        let cfg = CoherenceConfig {
            top_n: 2,
            ..Default::default()
        };
        let topics = vec![vec!["t0".into(), "missing".into()]];
        assert!(matches!(
            cv_score(&topics, &docs, &cfg),
            Err(CoherenceError::WordNotInCorpus(_))
        ));
    }
}
