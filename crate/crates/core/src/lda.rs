//! Collapsed Gibbs sampling for LDA over BOW or tf-idf matrices.
//!
//! Sufficient statistics are weighted: a BOW cell with count c becomes c
//! unit-weight sampling sites, while a tf-idf cell (d, v) is a single
//! site of weight `T[d,v]` whose assignment moves that weight between
//! topic counts. With all weights 1 this is the classic token-level
//! sampler. Fits are single-threaded and bit-deterministic given the
//! seed; randomness comes from a ChaCha20 stream.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;
use thiserror::Error;

use crate::preprocess::TokenizedDocument;
use crate::vectorize::{Dictionary, DocTermMatrix, MatrixKind};

#[derive(Debug, Error)]
pub enum LdaError {
    #[error("invalid hyperparameters: {0}")]
    InvalidHyperparams(String),
    #[error("matrix has no documents or no terms")]
    EmptyMatrix,
    #[error("topic index {topic} out of range for K={k}")]
    IndexOutOfRange { topic: usize, k: usize },
    #[error("document has no tokens in the model dictionary")]
    UnknownVocabularyOnly,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("artifact parse error: {0}")]
    Artifact(#[from] serde_json::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LdaHyperparams {
    pub k: usize,
    pub alpha: f64,
    pub eta: f64,
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
}

impl Default for LdaHyperparams {
    fn default() -> Self {
        LdaHyperparams {
            k: 5,
            alpha: 0.5,
            eta: 0.5,
            iterations: 1000,
            burn_in: 0,
            seed: 42,
        }
    }
}

impl LdaHyperparams {
    fn validate(&self) -> Result<(), LdaError> {
        if self.k < 2 {
            return Err(LdaError::InvalidHyperparams(format!("K={} < 2", self.k)));
        }
        if !(self.alpha > 0.0) {
            return Err(LdaError::InvalidHyperparams(format!(
                "alpha={} must be positive",
                self.alpha
            )));
        }
        if !(self.eta > 0.0) {
            return Err(LdaError::InvalidHyperparams(format!(
                "eta={} must be positive",
                self.eta
            )));
        }
        if self.iterations == 0 {
            return Err(LdaError::InvalidHyperparams("iterations=0".into()));
        }
        if self.burn_in >= self.iterations {
            return Err(LdaError::InvalidHyperparams(format!(
                "burn_in={} >= iterations={}",
                self.burn_in, self.iterations
            )));
        }
        Ok(())
    }
}

/// A fitted model: row-stochastic phi (K x V) and theta (M x K).
#[derive(Debug, Clone, PartialEq)]
pub struct LdaModel {
    pub hyper: LdaHyperparams,
    pub phi: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub dictionary: Dictionary,
    pub corpus_fingerprint: String,
    pub matrix_kind: MatrixKind,
    /// Joint collapsed log-likelihood, recorded every 50 sweeps.
    pub log_likelihood_trace: Vec<f64>,
}

struct Site {
    doc: u32,
    term: u32,
    weight: f64,
    topic: u32,
}

struct GibbsState {
    n_dk: Vec<f64>, // M x K
    n_kv: Vec<f64>, // K x V
    n_k: Vec<f64>,
    n_d: Vec<f64>,
    k: usize,
    v: usize,
}

impl GibbsState {
    fn new(m: usize, k: usize, v: usize) -> Self {
        GibbsState {
            n_dk: vec![0.0; m * k],
            n_kv: vec![0.0; k * v],
            n_k: vec![0.0; k],
            n_d: vec![0.0; m],
            k,
            v,
        }
    }

    fn add(&mut self, site: &Site, sign: f64) {
        let w = site.weight * sign;
        let (d, t, kk) = (site.doc as usize, site.term as usize, site.topic as usize);
        self.n_dk[d * self.k + kk] += w;
        self.n_kv[kk * self.v + t] += w;
        self.n_k[kk] += w;
        self.n_d[d] += w;
    }

    fn log_likelihood(&self, alpha: f64, eta: f64) -> f64 {
        let (k, v) = (self.k, self.v);
        let m = self.n_d.len();
        let mut ll = 0.0;
        for kk in 0..k {
            ll += ln_gamma(v as f64 * eta) - v as f64 * ln_gamma(eta);
            for t in 0..v {
                ll += ln_gamma(self.n_kv[kk * v + t] + eta);
            }
            ll -= ln_gamma(self.n_k[kk] + v as f64 * eta);
        }
        for d in 0..m {
            ll += ln_gamma(k as f64 * alpha) - k as f64 * ln_gamma(alpha);
            for kk in 0..k {
                ll += ln_gamma(self.n_dk[d * k + kk] + alpha);
            }
            ll -= ln_gamma(self.n_d[d] + k as f64 * alpha);
        }
        ll
    }

    #[cfg(debug_assertions)]
    fn check_mass(&self, total: f64) {
        let dk: f64 = self.n_dk.iter().sum();
        let kv: f64 = self.n_kv.iter().sum();
        let scale = total.abs().max(1.0);
        debug_assert!((dk - total).abs() / scale < 1e-6, "n_dk mass drift");
        debug_assert!((kv - total).abs() / scale < 1e-6, "n_kv mass drift");
    }
}

fn build_sites(matrix: &DocTermMatrix) -> Vec<Site> {
    let mut sites = Vec::new();
    for d in 0..matrix.n_docs() {
        for &(t, w) in matrix.row(d) {
            match matrix.kind {
                MatrixKind::Bow => {
                    // Integer cells expand to unit sites.
                    let c = w.round() as usize;
                    for _ in 0..c {
                        sites.push(Site {
                            doc: d as u32,
                            term: t as u32,
                            weight: 1.0,
                            topic: 0,
                        });
                    }
                }
                MatrixKind::Tfidf => sites.push(Site {
                    doc: d as u32,
                    term: t as u32,
                    weight: w,
                    topic: 0,
                }),
            }
        }
    }
    sites
}

/// Fits an LDA model by collapsed Gibbs sampling.
pub fn fit(matrix: &DocTermMatrix, hyper: &LdaHyperparams) -> Result<LdaModel, LdaError> {
    let identity: Vec<usize> = (0..hyper.k).collect();
    fit_with_topic_order(matrix, hyper, &identity)
}

/// Test hook: runs the fit with topic labels visited in the order given
/// by `topic_order` (a permutation of 0..K). The sampler has no label
/// asymmetry beyond this iteration order, so the result equals the
/// identity-order fit with topics relabeled through the permutation.
pub fn fit_with_topic_order(
    matrix: &DocTermMatrix,
    hyper: &LdaHyperparams,
    topic_order: &[usize],
) -> Result<LdaModel, LdaError> {
    hyper.validate()?;
    if matrix.n_docs() == 0 || matrix.n_terms() == 0 {
        return Err(LdaError::EmptyMatrix);
    }
    {
        let mut seen = vec![false; hyper.k];
        if topic_order.len() != hyper.k
            || !topic_order.iter().all(|&t| {
                if t < hyper.k && !seen[t] {
                    seen[t] = true;
                    true
                } else {
                    false
                }
            })
        {
            return Err(LdaError::InvalidHyperparams(
                "topic_order is not a permutation of 0..K".into(),
            ));
        }
    }

    let k = hyper.k;
    let v = matrix.n_terms();
    let m = matrix.n_docs();
    let mut rng = ChaCha20Rng::seed_from_u64(hyper.seed);
    let mut sites = build_sites(matrix);
    if sites.is_empty() {
        return Err(LdaError::EmptyMatrix);
    }
    #[cfg(debug_assertions)]
    let total_mass: f64 = sites.iter().map(|s| s.weight).sum();

    let mut state = GibbsState::new(m, k, v);
    for site in sites.iter_mut() {
        site.topic = topic_order[rng.gen_range(0..k)] as u32;
        state.add(site, 1.0);
    }

    let v_eta = v as f64 * hyper.eta;
    let mut weights = vec![0.0; k];
    let mut trace = Vec::new();
    for sweep in 0..hyper.iterations {
        for i in 0..sites.len() {
            state.add(&sites[i], -1.0);
            let (d, t) = (sites[i].doc as usize, sites[i].term as usize);
            let mut total = 0.0;
            for (slot, &kk) in topic_order.iter().enumerate() {
                let p = (state.n_dk[d * k + kk] + hyper.alpha)
                    * (state.n_kv[kk * v + t] + hyper.eta)
                    / (state.n_k[kk] + v_eta);
                weights[slot] = p;
                total += p;
            }
            let u = rng.gen::<f64>() * total;
            let mut acc = 0.0;
            let mut chosen = k - 1;
            for slot in 0..k {
                acc += weights[slot];
                if u < acc {
                    chosen = slot;
                    break;
                }
            }
            sites[i].topic = topic_order[chosen] as u32;
            state.add(&sites[i], 1.0);
        }
        if (sweep + 1) % 50 == 0 || sweep + 1 == hyper.iterations {
            #[cfg(debug_assertions)]
            state.check_mass(total_mass);
            trace.push(state.log_likelihood(hyper.alpha, hyper.eta));
        }
    }

    let k_alpha = k as f64 * hyper.alpha;
    let theta = (0..m)
        .map(|d| {
            (0..k)
                .map(|kk| (state.n_dk[d * k + kk] + hyper.alpha) / (state.n_d[d] + k_alpha))
                .collect()
        })
        .collect();
    let phi = (0..k)
        .map(|kk| {
            (0..v)
                .map(|t| (state.n_kv[kk * v + t] + hyper.eta) / (state.n_k[kk] + v_eta))
                .collect()
        })
        .collect();
    Ok(LdaModel {
        hyper: *hyper,
        phi,
        theta,
        dictionary: matrix.dictionary().clone(),
        corpus_fingerprint: matrix.fingerprint(),
        matrix_kind: matrix.kind,
        log_likelihood_trace: trace,
    })
}

impl LdaModel {
    /// Fold-in inference for an unseen document, holding phi fixed.
    pub fn infer_theta(&self, doc: &TokenizedDocument) -> Result<Vec<f64>, LdaError> {
        let k = self.hyper.k;
        let term_ids: Vec<usize> = doc
            .tokens
            .iter()
            .filter_map(|t| self.dictionary.index_of(t))
            .collect();
        if term_ids.is_empty() {
            return Err(LdaError::UnknownVocabularyOnly);
        }
        let mut rng = ChaCha20Rng::seed_from_u64(self.hyper.seed);
        let mut assignments: Vec<usize> = Vec::with_capacity(term_ids.len());
        let mut n_k = vec![0.0f64; k];
        for _ in &term_ids {
            let kk = rng.gen_range(0..k);
            assignments.push(kk);
            n_k[kk] += 1.0;
        }
        let sweeps = 100;
        let mut weights = vec![0.0; k];
        for _ in 0..sweeps {
            for (i, &t) in term_ids.iter().enumerate() {
                n_k[assignments[i]] -= 1.0;
                let mut total = 0.0;
                for kk in 0..k {
                    let p = self.phi[kk][t] * (n_k[kk] + self.hyper.alpha);
                    weights[kk] = p;
                    total += p;
                }
                let u = rng.gen::<f64>() * total;
                let mut acc = 0.0;
                let mut chosen = k - 1;
                for kk in 0..k {
                    acc += weights[kk];
                    if u < acc {
                        chosen = kk;
                        break;
                    }
                }
                assignments[i] = chosen;
                n_k[chosen] += 1.0;
            }
        }
        let n = term_ids.len() as f64;
        let k_alpha = k as f64 * self.hyper.alpha;
        Ok((0..k)
            .map(|kk| (n_k[kk] + self.hyper.alpha) / (n + k_alpha))
            .collect())
    }

    /// The n highest-probability terms of a topic, weight-descending with
    /// lexicographic tie-break.
    pub fn top_words(&self, topic: usize, n: usize) -> Result<Vec<(String, f64)>, LdaError> {
        if topic >= self.hyper.k {
            return Err(LdaError::IndexOutOfRange {
                topic,
                k: self.hyper.k,
            });
        }
        let mut ranked: Vec<(String, f64)> = self
            .dictionary
            .terms()
            .iter()
            .cloned()
            .zip(self.phi[topic].iter().copied())
            .collect();
        ranked.sort_by(|a, b| {
            b.1.partial_cmp(&a.1)
                .expect("phi entries are finite")
                .then_with(|| a.0.cmp(&b.0))
        });
        ranked.truncate(n);
        Ok(ranked)
    }
}

/// Serializable model artifact. Probabilities are rounded to 6
/// significant digits; loading reproduces the file bit-exactly.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct LdaArtifact {
    pub hyper: LdaHyperparams,
    pub matrix_kind: MatrixKind,
    pub dictionary_terms: Vec<String>,
    pub dictionary_doc_freq: Vec<usize>,
    pub dictionary_n_docs: usize,
    pub doc_ids: Vec<String>,
    pub phi: Vec<Vec<f64>>,
    pub theta: Vec<Vec<f64>>,
    pub corpus_fingerprint: String,
}

fn round_sig6(x: f64) -> f64 {
    format!("{x:.5e}").parse().expect("formatted float parses")
}

impl LdaArtifact {
    pub fn from_model(model: &LdaModel, doc_ids: &[String]) -> Self {
        let round_rows =
            |rows: &[Vec<f64>]| rows.iter().map(|r| r.iter().map(|&x| round_sig6(x)).collect()).collect();
        LdaArtifact {
            hyper: model.hyper,
            matrix_kind: model.matrix_kind,
            dictionary_terms: model.dictionary.terms().to_vec(),
            dictionary_doc_freq: (0..model.dictionary.len())
                .map(|i| model.dictionary.doc_freq(i))
                .collect(),
            dictionary_n_docs: model.dictionary.n_docs(),
            doc_ids: doc_ids.to_vec(),
            phi: round_rows(&model.phi),
            theta: round_rows(&model.theta),
            corpus_fingerprint: model.corpus_fingerprint.clone(),
        }
    }

    pub fn save(&self, path: &std::path::Path) -> Result<(), LdaError> {
        let json = serde_json::to_string_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn load(path: &std::path::Path) -> Result<Self, LdaError> {
        let text = std::fs::read_to_string(path)?;
        Ok(serde_json::from_str(&text)?)
    }

    /// Rebuilds an in-memory model from the artifact. The likelihood
    /// trace is not stored and comes back empty.
    pub fn to_model(&self) -> LdaModel {
        LdaModel {
            hyper: self.hyper,
            phi: self.phi.clone(),
            theta: self.theta.clone(),
            dictionary: Dictionary::from_parts(
                self.dictionary_terms.clone(),
                self.dictionary_doc_freq.clone(),
                self.dictionary_n_docs,
            ),
            corpus_fingerprint: self.corpus_fingerprint.clone(),
            matrix_kind: self.matrix_kind,
            log_likelihood_trace: Vec::new(),
        }
    }
}
