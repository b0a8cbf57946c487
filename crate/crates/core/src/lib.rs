//! Topic-modeling engine for dated statement corpora.
//!
//! The pipeline goes: raw statements -> markup stripping -> token
//! normalization (stopwords, blocklist, Porter stemming) -> dictionary and
//! BOW / tf-idf matrices -> collapsed-Gibbs LDA -> C_v coherence scoring ->
//! randomized hyperparameter search -> trend, embedding, and indicator
//! reports.

pub mod coherence;
pub mod corpus;
pub mod hyperopt;
pub mod indicators;
pub mod lda;
pub mod pipeline;
pub mod preprocess;
pub mod report;
pub mod trends;
pub mod vectorize;

pub use corpus::{Corpus, Document, RawDocument};
pub use lda::{LdaHyperparams, LdaModel};
pub use preprocess::{PreprocessConfig, TokenizedDocument};
pub use vectorize::{Dictionary, DocTermMatrix, MatrixKind};
