//! Randomized hyperparameter search over the (K, alpha, eta) grid.
//!
//! The default grid is K in 3..=10 and alpha, eta from 0.05 in steps of
//! 0.1 with an exclusive upper bound of 1.55 (15 values each), an
//! 8 x 15 x 15 = 1800 point grid. Values are generated by index
//! arithmetic, never by repeated addition. Each config gets a seed
//! derived from the global seed and its own tuple, so results do not
//! depend on evaluation order.

use std::io::Write;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coherence::{cv_score, CoherenceConfig};
use crate::lda::{fit, LdaHyperparams, LdaModel};
use crate::preprocess::TokenizedDocument;
use crate::vectorize::{DocTermMatrix, MatrixKind};

#[derive(Debug, Error)]
pub enum HyperoptError {
    #[error("invalid range: {0}")]
    InvalidRange(String),
    #[error("sample size {n} exceeds grid size {grid}")]
    SampleTooLarge { n: usize, grid: usize },
    #[error("every configuration failed")]
    AllConfigsFailed,
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Inclusive integer range with step, for the topic count.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntRange {
    pub start: usize,
    pub stop: usize,
    pub step: usize,
}

/// Real range: start inclusive, stop exclusive, values start + i*step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FloatRange {
    pub start: f64,
    pub stop: f64,
    pub step: f64,
}

impl FloatRange {
    fn values(&self) -> Result<Vec<f64>, HyperoptError> {
        if !(self.step > 0.0) || self.stop <= self.start {
            return Err(HyperoptError::InvalidRange(format!(
                "float range {}..{} step {}",
                self.start, self.stop, self.step
            )));
        }
        let count = ((self.stop - self.start) / self.step + 1e-9).floor() as usize;
        let count = count.max(1);
        Ok((0..count).map(|i| self.start + i as f64 * self.step).collect())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub topics: IntRange,
    pub alpha: FloatRange,
    pub eta: FloatRange,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            topics: IntRange {
                start: 3,
                stop: 10,
                step: 1,
            },
            alpha: FloatRange {
                start: 0.05,
                stop: 1.55,
                step: 0.1,
            },
            eta: FloatRange {
                start: 0.05,
                stop: 1.55,
                step: 0.1,
            },
        }
    }
}

/// Enumerates the grid in deterministic order: K-major, then alpha,
/// then eta.
pub fn enumerate_grid(spec: &GridSpec) -> Result<Vec<(usize, f64, f64)>, HyperoptError> {
    let t = &spec.topics;
    if t.step == 0 || t.stop < t.start || t.start < 2 {
        return Err(HyperoptError::InvalidRange(format!(
            "topic range {}..={} step {}",
            t.start, t.stop, t.step
        )));
    }
    let topics: Vec<usize> = (t.start..=t.stop).step_by(t.step).collect();
    let alphas = spec.alpha.values()?;
    let etas = spec.eta.values()?;
    let mut grid = Vec::with_capacity(topics.len() * alphas.len() * etas.len());
    for &k in &topics {
        for &a in &alphas {
            for &e in &etas {
                grid.push((k, a, e));
            }
        }
    }
    Ok(grid)
}

/// Samples n grid points without replacement; output order is selection
/// order. Same seed, same sample.
pub fn sample_configs(
    grid: &[(usize, f64, f64)],
    n: usize,
    seed: u64,
) -> Result<Vec<(usize, f64, f64)>, HyperoptError> {
    if n > grid.len() {
        return Err(HyperoptError::SampleTooLarge {
            n,
            grid: grid.len(),
        });
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut indices: Vec<usize> = (0..grid.len()).collect();
    let mut picked = Vec::with_capacity(n);
    // Partial Fisher-Yates.
    for i in 0..n {
        let j = rng.gen_range(i..indices.len());
        indices.swap(i, j);
        picked.push(grid[indices[i]]);
    }
    Ok(picked)
}

/// Seed for one configuration, derived from the global seed and the
/// tuple itself so evaluation order cannot change results.
pub fn derive_config_seed(global_seed: u64, k: usize, alpha: f64, eta: f64) -> u64 {
    let mut h = Sha256::new();
    h.update(global_seed.to_le_bytes());
    h.update((k as u64).to_le_bytes());
    h.update(alpha.to_bits().to_le_bytes());
    h.update(eta.to_bits().to_le_bytes());
    let digest = h.finalize();
    u64::from_le_bytes(digest[..8].try_into().expect("sha256 yields 32 bytes"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchResult {
    pub k: usize,
    pub alpha: f64,
    pub eta: f64,
    pub coherence: f64,
    pub kind: MatrixKind,
    pub model_path: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailedConfig {
    pub k: usize,
    pub alpha: f64,
    pub eta: f64,
    pub reason: String,
}

#[derive(Debug)]
pub struct SearchReport {
    /// Successful configs sorted by (coherence desc, K asc, alpha asc,
    /// eta asc), each with its fitted model.
    pub ranked: Vec<(SearchResult, LdaModel)>,
    pub failures: Vec<FailedConfig>,
}

#[derive(Debug, Clone, Copy)]
pub struct FitOptions {
    pub iterations: usize,
    pub burn_in: usize,
    pub global_seed: u64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            iterations: 1000,
            burn_in: 0,
            global_seed: 42,
        }
    }
}

pub(crate) fn compare_results(a: &SearchResult, b: &SearchResult) -> std::cmp::Ordering {
    b.coherence
        .partial_cmp(&a.coherence)
        .expect("coherence is finite")
        .then_with(|| a.k.cmp(&b.k))
        .then_with(|| a.alpha.partial_cmp(&b.alpha).expect("alpha finite"))
        .then_with(|| a.eta.partial_cmp(&b.eta).expect("eta finite"))
}

/// Fits and scores every configuration. Per-config failures are
/// collected, never fatal.
pub fn search(
    matrix: &DocTermMatrix,
    configs: &[(usize, f64, f64)],
    fit_opts: &FitOptions,
    coherence_cfg: &CoherenceConfig,
    reference_docs: &[TokenizedDocument],
) -> SearchReport {
    let mut ranked = Vec::new();
    let mut failures = Vec::new();
    let top_n = coherence_cfg.top_n.min(matrix.n_terms());
    let eval_cfg = CoherenceConfig {
        top_n,
        ..*coherence_cfg
    };
    for &(k, alpha, eta) in configs {
        let hyper = LdaHyperparams {
            k,
            alpha,
            eta,
            iterations: fit_opts.iterations,
            burn_in: fit_opts.burn_in,
            seed: derive_config_seed(fit_opts.global_seed, k, alpha, eta),
        };
        let outcome = fit(matrix, &hyper).and_then(|model| {
            let topics: Result<Vec<Vec<String>>, _> = (0..k)
                .map(|t| {
                    model
                        .top_words(t, top_n)
                        .map(|ws| ws.into_iter().map(|(w, _)| w).collect())
                })
                .collect();
            let topics = topics?;
            match cv_score(&topics, reference_docs, &eval_cfg) {
                Ok(score) => Ok((model, score.value)),
                Err(e) => Err(crate::lda::LdaError::InvalidHyperparams(e.to_string())),
            }
        });
        match outcome {
            Ok((model, coherence)) => ranked.push((
                SearchResult {
                    k,
                    alpha,
                    eta,
                    coherence,
                    kind: matrix.kind,
                    model_path: None,
                },
                model,
            )),
            Err(e) => failures.push(FailedConfig {
                k,
                alpha,
                eta,
                reason: e.to_string(),
            }),
        }
    }
    ranked.sort_by(|a, b| compare_results(&a.0, &b.0));
    SearchReport { ranked, failures }
}

/// The top-ranked result: highest coherence, ties broken by K, alpha, eta.
pub fn select_best(report: &SearchReport) -> Result<&(SearchResult, LdaModel), HyperoptError> {
    report.ranked.first().ok_or(HyperoptError::AllConfigsFailed)
}

/// Writes the ranked table as CSV `n_topics,alpha,eta,coherence`.
pub fn write_ranking_csv(results: &[SearchResult], path: &Path) -> Result<(), HyperoptError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "n_topics,alpha,eta,coherence")?;
    for r in results {
        writeln!(f, "{},{:.2},{:.2},{:.6}", r.k, r.alpha, r.eta, r.coherence)?;
    }
    Ok(())
}
