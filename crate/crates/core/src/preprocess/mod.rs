//! The cleansing and normalization pipeline applied to each document.
//!
//! Order is fixed: strip special characters, lowercase, remove punctuation,
//! whitespace tokenize, drop blocklist terms, drop stopwords, drop numbers
//! and single characters, then Porter-stem. Stopword removal happens
//! before stemming (the lists hold surface forms, not stems).

mod porter;

pub use porter::porter_stem;

use std::collections::BTreeSet;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::corpus::Document;

/// Default English stopword list, one term per line.
pub const DEFAULT_STOPWORDS: &str = include_str!("../../data/stopwords.txt");
/// Default blocklist: committee member surnames, cities, and boilerplate
/// words that appear in nearly every statement.
pub const DEFAULT_BLOCKLIST: &str = include_str!("../../data/blocklist.txt");

#[derive(Debug, Error)]
pub enum PreprocessError {
    #[error("i/o error reading term list {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("term list entry {term:?} is not lowercase and whitespace-free")]
    InvalidTerm { term: String },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub blocklist: BTreeSet<String>,
    pub stopwords: BTreeSet<String>,
    pub stem: bool,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        PreprocessConfig {
            blocklist: parse_term_list(DEFAULT_BLOCKLIST).expect("bundled blocklist is valid"),
            stopwords: parse_term_list(DEFAULT_STOPWORDS).expect("bundled stopwords are valid"),
            stem: true,
        }
    }
}

impl PreprocessConfig {
    pub fn from_files(
        stopwords: Option<&Path>,
        blocklist: Option<&Path>,
        stem: bool,
    ) -> Result<Self, PreprocessError> {
        let read = |p: &Path| -> Result<BTreeSet<String>, PreprocessError> {
            let text = std::fs::read_to_string(p).map_err(|e| PreprocessError::Io {
                path: p.display().to_string(),
                source: e,
            })?;
            parse_term_list(&text)
        };
        Ok(PreprocessConfig {
            stopwords: match stopwords {
                Some(p) => read(p)?,
                None => parse_term_list(DEFAULT_STOPWORDS)?,
            },
            blocklist: match blocklist {
                Some(p) => read(p)?,
                None => parse_term_list(DEFAULT_BLOCKLIST)?,
            },
            stem,
        })
    }
}

/// Parses a term-list file: one term per line, '#' starts a comment.
pub fn parse_term_list(text: &str) -> Result<BTreeSet<String>, PreprocessError> {
    let mut terms = BTreeSet::new();
    for line in text.lines() {
        let term = line.split('#').next().unwrap_or("").trim();
        if term.is_empty() {
            continue;
        }
        let ok = term
            .chars()
            .all(|c| c.is_ascii_lowercase() || c.is_ascii_digit());
        if !ok {
            return Err(PreprocessError::InvalidTerm {
                term: term.to_string(),
            });
        }
        terms.insert(term.to_string());
    }
    Ok(terms)
}

/// A document reduced to its normalized token list.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenizedDocument {
    pub id: String,
    pub date: NaiveDate,
    pub tokens: Vec<String>,
}

/// Runs the eight-step normalization pipeline on one document.
pub fn normalize(doc: &Document, cfg: &PreprocessConfig) -> TokenizedDocument {
    let mut cleaned = String::with_capacity(doc.text.len());
    for c in doc.text.chars() {
        // Steps 1-3: special characters and punctuation become spaces,
        // letters are lowercased.
        if c.is_alphanumeric() {
            for lc in c.to_lowercase() {
                cleaned.push(lc);
            }
        } else {
            cleaned.push(' ');
        }
    }
    let tokens = cleaned
        .split_whitespace()
        .filter(|t| t.is_ascii())
        .filter(|t| !cfg.blocklist.contains(*t))
        .filter(|t| !cfg.stopwords.contains(*t))
        .filter(|t| t.len() > 1 && !t.chars().all(|c| c.is_ascii_digit()))
        .map(|t| {
            if cfg.stem {
                porter_stem(t)
            } else {
                t.to_string()
            }
        })
        .collect();
    TokenizedDocument {
        id: doc.id.clone(),
        date: doc.date,
        tokens,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn doc(text: &str) -> Document {
        Document {
            id: "d".into(),
            date: NaiveDate::from_ymd_opt(2005, 2, 2).unwrap(),
            text: text.into(),
        }
    }

    #[test]
    fn pipeline_hand_trace() {
        let mut cfg = PreprocessConfig::default();
        cfg.blocklist.insert("committee".into());
        let out = normalize(&doc("The Committee decided to lower rates."), &cfg);
        assert_eq!(out.tokens, vec!["decid", "lower", "rate"]);
    }

    #[test]
    fn empty_text_empty_tokens() {
        let out = normalize(&doc(""), &PreprocessConfig::default());
        assert!(out.tokens.is_empty());
    }

    #[test]
    fn case_folding_only() {
        let cfg = PreprocessConfig {
            blocklist: BTreeSet::new(),
            stopwords: BTreeSet::new(),
            stem: false,
        };
        let out = normalize(&doc("Growth growth GROWTH"), &cfg);
        assert_eq!(out.tokens, vec!["growth", "growth", "growth"]);
    }

    #[test]
    fn numbers_and_single_chars_dropped() {
        let cfg = PreprocessConfig {
            blocklist: BTreeSet::new(),
            stopwords: BTreeSet::new(),
            stem: false,
        };
        let out = normalize(&doc("on 2005 a vote of 9 to 1 rates"), &cfg);
        assert_eq!(out.tokens, vec!["on", "vote", "of", "to", "rates"]);
    }

    #[test]
    fn blocklist_and_stopwords_checked_on_surface_forms() {
        let mut cfg = PreprocessConfig::default();
        cfg.blocklist.insert("governor".into());
        let out = normalize(&doc("the governor approves rates"), &cfg);
        for t in &out.tokens {
            assert!(!cfg.stopwords.contains(t) || cfg.stem, "stopword {t} survived");
            assert_ne!(t, "governor");
        }
    }

    #[test]
    fn lowercase_closure() {
        let cfg = PreprocessConfig::default();
        let text = "Inflation pressures remain Elevated in recent Months";
        let upper = text.to_uppercase();
        assert_eq!(
            normalize(&doc(text), &cfg).tokens,
            normalize(&doc(&upper), &cfg).tokens
        );
    }

    #[test]
    fn term_list_parsing() {
        let parsed = parse_term_list("# comment\nboard\napprove # inline\n\ngovernor\n").unwrap();
        assert_eq!(
            parsed.into_iter().collect::<Vec<_>>(),
            vec!["approve", "board", "governor"]
        );
        assert!(parse_term_list("Upper").is_err());
        assert!(parse_term_list("two words").is_err());
    }
}
