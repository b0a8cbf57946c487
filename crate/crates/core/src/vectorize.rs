//! Dictionary construction and the BOW / tf-idf document-term matrices.
//!
//! Terms appearing in more than `max_df` of the documents are excluded
//! (strict inequality). The tf-idf weight is `A[i,j] * ln(d / f_j)`;
//! terms present in every document get idf 0 and their columns are
//! dropped to keep the no-all-zero-row invariant meaningful.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::fingerprint_ids;
use crate::preprocess::TokenizedDocument;

#[derive(Debug, Error)]
pub enum VectorizeError {
    #[error("no terms survive the document-frequency cutoff")]
    EmptyVocabulary,
    #[error("document {id:?} has no terms in the dictionary")]
    EmptyDocumentRow { id: String },
    #[error("no documents given")]
    NoDocuments,
    #[error("max_df must lie in (0, 1], got {0}")]
    InvalidMaxDf(f64),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// The term index: unique terms in lexicographic order plus their
/// document frequencies.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Dictionary {
    terms: Vec<String>,
    doc_freq: Vec<usize>,
    n_docs: usize,
}

impl Dictionary {
    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    /// Vocabulary size V.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn doc_freq(&self, term_idx: usize) -> usize {
        self.doc_freq[term_idx]
    }

    /// Number of documents the dictionary was built from.
    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.terms.binary_search_by(|t| t.as_str().cmp(term)).ok()
    }

    pub fn from_parts(terms: Vec<String>, doc_freq: Vec<usize>, n_docs: usize) -> Self {
        debug_assert_eq!(terms.len(), doc_freq.len());
        Dictionary {
            terms,
            doc_freq,
            n_docs,
        }
    }
}

/// Builds the dictionary, excluding terms with document frequency
/// strictly above `max_df` (as a fraction of the corpus).
pub fn build_dictionary(
    docs: &[TokenizedDocument],
    max_df: f64,
) -> Result<Dictionary, VectorizeError> {
    if docs.is_empty() {
        return Err(VectorizeError::NoDocuments);
    }
    if !(max_df > 0.0 && max_df <= 1.0) {
        return Err(VectorizeError::InvalidMaxDf(max_df));
    }
    let m = docs.len() as f64;
    let mut df: BTreeMap<&str, usize> = BTreeMap::new();
    for doc in docs {
        let mut seen: Vec<&str> = doc.tokens.iter().map(|t| t.as_str()).collect();
        seen.sort_unstable();
        seen.dedup();
        for t in seen {
            *df.entry(t).or_insert(0) += 1;
        }
    }
    let mut terms = Vec::new();
    let mut doc_freq = Vec::new();
    for (term, f) in df {
        if f as f64 / m > max_df {
            continue;
        }
        terms.push(term.to_string());
        doc_freq.push(f);
    }
    if terms.is_empty() {
        return Err(VectorizeError::EmptyVocabulary);
    }
    Ok(Dictionary {
        terms,
        doc_freq,
        n_docs: docs.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Bow,
    Tfidf,
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatrixKind::Bow => write!(f, "bow"),
            MatrixKind::Tfidf => write!(f, "tfidf"),
        }
    }
}

/// Sparse document-term matrix; rows hold `(term_idx, weight)` pairs
/// sorted by term index.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DocTermMatrix {
    pub kind: MatrixKind,
    doc_ids: Vec<String>,
    doc_dates: Vec<NaiveDate>,
    rows: Vec<Vec<(usize, f64)>>,
    dictionary: Dictionary,
}

impl DocTermMatrix {
    /// Number of documents d.
    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    /// Number of terms t.
    pub fn n_terms(&self) -> usize {
        self.dictionary.len()
    }

    pub fn doc_ids(&self) -> &[String] {
        &self.doc_ids
    }

    pub fn doc_dates(&self) -> &[NaiveDate] {
        &self.doc_dates
    }

    pub fn dictionary(&self) -> &Dictionary {
        &self.dictionary
    }

    /// The nonzero `(term_idx, weight)` entries of one document row.
    pub fn row(&self, doc: usize) -> &[(usize, f64)] {
        &self.rows[doc]
    }

    pub fn get(&self, doc: usize, term: usize) -> f64 {
        self.rows[doc]
            .binary_search_by(|(t, _)| t.cmp(&term))
            .map(|i| self.rows[doc][i].1)
            .unwrap_or(0.0)
    }

    /// Fingerprint over the ordered `(id, date)` pairs; matches the
    /// corpus-side fingerprint for the same document set.
    pub fn fingerprint(&self) -> String {
        fingerprint_ids(
            self.doc_ids
                .iter()
                .map(|s| s.as_str())
                .zip(self.doc_dates.iter().copied()),
        )
    }

    /// Writes the matrix as `doc_id term weight` triplets plus a
    /// `<path>.dict` sidecar with `term doc_freq` lines.
    pub fn export_triplets(&self, path: &Path) -> Result<(), VectorizeError> {
        let mut f = std::fs::File::create(path)?;
        for (d, row) in self.rows.iter().enumerate() {
            for (t, w) in row {
                writeln!(f, "{} {} {}", self.doc_ids[d], self.dictionary.terms[*t], w)?;
            }
        }
        let mut side = std::fs::File::create(path.with_extension("dict"))?;
        for (t, term) in self.dictionary.terms.iter().enumerate() {
            writeln!(side, "{} {}", term, self.dictionary.doc_freq[t])?;
        }
        Ok(())
    }
}

/// Builds the BOW matrix A: `A[i,j]` counts dictionary term j in document i.
pub fn bow_matrix(
    docs: &[TokenizedDocument],
    dict: &Dictionary,
) -> Result<DocTermMatrix, VectorizeError> {
    let mut rows = Vec::with_capacity(docs.len());
    let mut doc_ids = Vec::with_capacity(docs.len());
    let mut doc_dates = Vec::with_capacity(docs.len());
    for doc in docs {
        let mut counts: HashMap<usize, f64> = HashMap::new();
        for tok in &doc.tokens {
            if let Some(idx) = dict.index_of(tok) {
                *counts.entry(idx).or_insert(0.0) += 1.0;
            }
        }
        if counts.is_empty() {
            return Err(VectorizeError::EmptyDocumentRow { id: doc.id.clone() });
        }
        let mut row: Vec<(usize, f64)> = counts.into_iter().collect();
        row.sort_unstable_by_key(|(t, _)| *t);
        rows.push(row);
        doc_ids.push(doc.id.clone());
        doc_dates.push(doc.date);
    }
    Ok(DocTermMatrix {
        kind: MatrixKind::Bow,
        doc_ids,
        doc_dates,
        rows,
        dictionary: dict.clone(),
    })
}

/// Applies `T[i,j] = A[i,j] * ln(d / f_j)`. Columns with idf 0 (terms in
/// every document) are dropped; the dictionary is re-indexed accordingly.
/// A matrix with zero columns (degenerate corpus) is legal here and
/// rejected downstream.
pub fn tfidf_transform(a: &DocTermMatrix) -> DocTermMatrix {
    let d = a.n_docs() as f64;
    let dict = &a.dictionary;
    let idf: Vec<f64> = (0..dict.len())
        .map(|j| (d / dict.doc_freq[j] as f64).ln())
        .collect();
    // Re-index surviving columns.
    let mut remap = vec![usize::MAX; dict.len()];
    let mut terms = Vec::new();
    let mut doc_freq = Vec::new();
    for j in 0..dict.len() {
        if idf[j] > 0.0 {
            remap[j] = terms.len();
            terms.push(dict.terms[j].clone());
            doc_freq.push(dict.doc_freq[j]);
        }
    }
    let rows = a
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .filter(|(t, _)| remap[*t] != usize::MAX)
                .map(|(t, w)| (remap[*t], w * idf[*t]))
                .collect()
        })
        .collect();
    DocTermMatrix {
        kind: MatrixKind::Tfidf,
        doc_ids: a.doc_ids.clone(),
        doc_dates: a.doc_dates.clone(),
        rows,
        dictionary: Dictionary {
            terms,
            doc_freq,
            n_docs: dict.n_docs,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn tokdoc(id: &str, tokens: &[&str]) -> TokenizedDocument {
        TokenizedDocument {
            id: id.into(),
            date: NaiveDate::from_ymd_opt(2005, 2, 2).unwrap(),
            tokens: tokens.iter().map(|s| s.to_string()).collect(),
        }
    }

    #[test]
    fn dictionary_df_cutoff() {
        let docs = vec![
            tokdoc("d1", &["a", "b"]),
            tokdoc("d2", &["a", "c"]),
            tokdoc("d3", &["a"]),
        ];
        let dict = build_dictionary(&docs, 0.5).unwrap();
        assert_eq!(dict.terms(), &["b", "c"]);
        assert_eq!(dict.doc_freq(0), 1);
    }

    #[test]
    fn dictionary_single_doc_no_filter() {
        let docs = vec![tokdoc("d1", &["x"])];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        assert_eq!(dict.terms(), &["x"]);
    }

    #[test]
    fn dictionary_all_filtered() {
        let docs = vec![tokdoc("d1", &["a"]), tokdoc("d2", &["a"])];
        let err = build_dictionary(&docs, 0.5).unwrap_err();
        assert!(matches!(err, VectorizeError::EmptyVocabulary));
    }

    #[test]
    fn bow_hand_count() {
        let docs = vec![tokdoc("d1", &["b", "b", "c"]), tokdoc("d2", &["c"])];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        let a = bow_matrix(&docs, &dict).unwrap();
        assert_eq!(a.get(0, 0), 2.0);
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(1, 0), 0.0);
        assert_eq!(a.get(1, 1), 1.0);
    }

    #[test]
    fn bow_singleton() {
        let docs = vec![tokdoc("d1", &["b"])];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        let a = bow_matrix(&docs, &dict).unwrap();
        assert_eq!(a.get(0, 0), 1.0);
    }

    #[test]
    fn bow_empty_row_rejected() {
        let docs = vec![tokdoc("d1", &["a"])];
        let dict = Dictionary::from_parts(vec!["b".into()], vec![1], 1);
        let err = bow_matrix(&docs, &dict).unwrap_err();
        assert!(matches!(err, VectorizeError::EmptyDocumentRow { .. }));
    }

    #[test]
    fn tfidf_drops_ubiquitous_term() {
        let docs = vec![tokdoc("d1", &["q"]), tokdoc("d2", &["q"])];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        let a = bow_matrix(&docs, &dict).unwrap();
        let t = tfidf_transform(&a);
        assert_eq!(t.n_terms(), 0);
    }

    #[test]
    fn tfidf_hand_evaluation() {
        // d=3, term "p" in docs 1 and 3 (f=2), term "q" in doc 2 (f=1)
        let docs = vec![
            tokdoc("d1", &["p"]),
            tokdoc("d2", &["q"]),
            tokdoc("d3", &["p"]),
        ];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        let a = bow_matrix(&docs, &dict).unwrap();
        let t = tfidf_transform(&a);
        let ln32 = (3.0f64 / 2.0).ln();
        let ln3 = 3.0f64.ln();
        assert!((t.get(0, 0) - ln32).abs() < 1e-12);
        assert!((t.get(1, 1) - ln3).abs() < 1e-12);
        assert!((t.get(2, 0) - ln32).abs() < 1e-12);
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(t.get(1, 0), 0.0);
    }

    #[test]
    fn tfidf_single_doc_degenerate() {
        let docs = vec![tokdoc("d1", &["p", "p", "p"])];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        let a = bow_matrix(&docs, &dict).unwrap();
        let t = tfidf_transform(&a);
        assert_eq!(t.n_terms(), 0); // EmptyVocabulary downstream
    }

    #[test]
    fn idf_monotone_in_doc_freq() {
        let d = 10.0f64;
        for f in 1..9usize {
            let idf_lo = (d / f as f64).ln();
            let idf_hi = (d / (f + 1) as f64).ln();
            assert!(idf_lo > idf_hi);
        }
    }

    #[test]
    fn tfidf_preserves_sparsity_pattern() {
        let docs = vec![
            tokdoc("d1", &["p", "q", "r"]),
            tokdoc("d2", &["q"]),
            tokdoc("d3", &["r", "r"]),
        ];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        let a = bow_matrix(&docs, &dict).unwrap();
        let t = tfidf_transform(&a);
        for d in 0..a.n_docs() {
            for (orig_idx, term) in a.dictionary().terms().iter().enumerate() {
                if let Some(new_idx) = t.dictionary().index_of(term) {
                    assert_eq!(a.get(d, orig_idx) == 0.0, t.get(d, new_idx) == 0.0);
                }
            }
        }
    }

    #[test]
    fn determinism() {
        let docs = vec![
            tokdoc("d1", &["z", "a", "m", "a"]),
            tokdoc("d2", &["m", "z"]),
        ];
        let d1 = build_dictionary(&docs, 1.0).unwrap();
        let d2 = build_dictionary(&docs, 1.0).unwrap();
        assert_eq!(d1, d2);
        let a1 = bow_matrix(&docs, &d1).unwrap();
        let a2 = bow_matrix(&docs, &d2).unwrap();
        assert_eq!(a1, a2);
    }

    #[test]
    fn export_round_readable() {
        let docs = vec![tokdoc("d1", &["p", "q"]), tokdoc("d2", &["q"])];
        let dict = build_dictionary(&docs, 1.0).unwrap();
        let a = bow_matrix(&docs, &dict).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.triplets");
        a.export_triplets(&path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.contains("d1 p 1"));
        assert!(std::fs::read_to_string(path.with_extension("dict"))
            .unwrap()
            .contains("q 2"));
    }
}
