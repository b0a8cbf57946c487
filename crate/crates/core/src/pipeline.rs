//! End-to-end orchestration: corpus -> preprocessing -> BOW / tf-idf
//! branches -> randomized search -> best model -> report bundle.
//!
//! Both matrix branches share a single preprocessing pass. A run writes
//! a manifest listing every artifact with its content hash; identical
//! configurations produce byte-identical artifacts and manifests (paths
//! in the manifest are relative to the output directory).

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::coherence::CoherenceConfig;
use crate::corpus::{load_corpus, strip_markup_text, Corpus, CorpusError, CorpusFormat, Document};
use crate::hyperopt::{
    enumerate_grid, sample_configs, search, select_best, write_ranking_csv, FitOptions, GridSpec,
    HyperoptError,
};
use crate::lda::{LdaArtifact, LdaError};
use crate::preprocess::{normalize, PreprocessConfig, PreprocessError, TokenizedDocument};
use crate::report::{
    write_dominance_csv, write_dominance_svg, write_mds_csv, write_mds_svg, write_topics_json,
    ReportError,
};
use crate::trends::{dominance_series, mds_embed, wordcloud_data, TrendsError};
use crate::vectorize::{bow_matrix, build_dictionary, tfidf_transform, MatrixKind, VectorizeError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("[corpus] {0}")]
    Corpus(#[from] CorpusError),
    #[error("[preprocess] {0}")]
    Preprocess(#[from] PreprocessError),
    #[error("[vectorize] {0}")]
    Vectorize(#[from] VectorizeError),
    #[error("[hyperopt] {0}")]
    Hyperopt(#[from] HyperoptError),
    #[error("[lda] {0}")]
    Lda(#[from] LdaError),
    #[error("[trends] {0}")]
    Trends(#[from] TrendsError),
    #[error("[report] {0}")]
    Report(#[from] ReportError),
    #[error("[io] {0}")]
    Io(#[from] std::io::Error),
}

impl PipelineError {
    /// Stage tag for CLI exit reporting.
    pub fn stage(&self) -> &'static str {
        match self {
            PipelineError::Corpus(_) => "corpus",
            PipelineError::Preprocess(_) => "preprocess",
            PipelineError::Vectorize(_) => "vectorize",
            PipelineError::Hyperopt(_) => "hyperopt",
            PipelineError::Lda(_) => "lda",
            PipelineError::Trends(_) => "trends",
            PipelineError::Report(_) => "report",
            PipelineError::Io(_) => "io",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunConfig {
    pub corpus_path: PathBuf,
    pub corpus_format: CorpusFormat,
    pub stopwords_path: Option<PathBuf>,
    pub blocklist_path: Option<PathBuf>,
    pub stem: bool,
    pub max_df: f64,
    pub grid: GridSpec,
    pub sample_count: usize,
    pub global_seed: u64,
    pub kinds: Vec<MatrixKind>,
    pub iterations: usize,
    pub burn_in: usize,
    pub coherence: CoherenceConfig,
    /// User-supplied topic labels for the report; never inferred.
    pub topic_labels: Option<Vec<String>>,
    /// Share one sampled config set across both matrix kinds instead of
    /// drawing independently per kind.
    pub shared_sample: bool,
    pub out_dir: PathBuf,
}

impl RunConfig {
    pub fn with_defaults(corpus_path: PathBuf, out_dir: PathBuf) -> Self {
        RunConfig {
            corpus_path,
            corpus_format: CorpusFormat::Jsonl,
            stopwords_path: None,
            blocklist_path: None,
            stem: true,
            max_df: 0.5,
            grid: GridSpec::default(),
            sample_count: 100,
            global_seed: 42,
            kinds: vec![MatrixKind::Bow, MatrixKind::Tfidf],
            iterations: 1000,
            burn_in: 0,
            coherence: CoherenceConfig::default(),
            topic_labels: None,
            shared_sample: false,
            out_dir,
        }
    }

    /// Hash over everything that determines the outputs. The output
    /// directory is excluded so relocated runs compare equal.
    pub fn content_hash(&self) -> String {
        let mut v = serde_json::to_value(self).expect("config serializes");
        v.as_object_mut().expect("config is an object").remove("out_dir");
        let canon = serde_json::to_string(&v).expect("value serializes");
        hex(&Sha256::digest(canon.as_bytes()))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct ArtifactEntry {
    pub path: String,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct BestEntry {
    pub kind: MatrixKind,
    pub k: usize,
    pub alpha: f64,
    pub eta: f64,
    pub coherence: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct RunManifest {
    pub config_hash: String,
    pub global_seed: u64,
    pub corpus_fingerprint: String,
    pub n_documents: usize,
    pub best: Vec<BestEntry>,
    pub artifacts: Vec<ArtifactEntry>,
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

fn file_sha256(path: &Path) -> Result<String, std::io::Error> {
    Ok(hex(&Sha256::digest(fs::read(path)?)))
}

/// Seed for the per-kind config sample. Independent draws by default;
/// `shared_sample` forces one set for both kinds.
fn sample_seed(cfg: &RunConfig, kind: MatrixKind) -> u64 {
    if cfg.shared_sample {
        cfg.global_seed
    } else {
        let mut h = Sha256::new();
        h.update(cfg.global_seed.to_le_bytes());
        h.update(kind.to_string().as_bytes());
        let d = h.finalize();
        u64::from_le_bytes(d[..8].try_into().expect("sha256 yields 32 bytes"))
    }
}

/// Executes the full pipeline and writes `manifest.json` in the output
/// directory.
pub fn run(cfg: &RunConfig) -> Result<RunManifest, PipelineError> {
    fs::create_dir_all(&cfg.out_dir)?;
    let corpus = load_corpus(&cfg.corpus_path, cfg.corpus_format)?;
    // Statements may still carry markup; stripping is a no-op on plain text.
    let corpus = Corpus::new(
        corpus
            .documents()
            .iter()
            .map(|d| Document {
                id: d.id.clone(),
                date: d.date,
                text: strip_markup_text(&d.text),
            })
            .collect(),
    )?;

    let pre_cfg = PreprocessConfig::from_files(
        cfg.stopwords_path.as_deref(),
        cfg.blocklist_path.as_deref(),
        cfg.stem,
    )?;
    // One preprocessing pass feeds both matrix branches.
    let tokenized: Vec<TokenizedDocument> = corpus
        .documents()
        .iter()
        .map(|d| normalize(d, &pre_cfg))
        .collect();

    let dict = build_dictionary(&tokenized, cfg.max_df)?;
    let bow = bow_matrix(&tokenized, &dict)?;

    let grid = enumerate_grid(&cfg.grid)?;
    let mut artifacts: Vec<String> = Vec::new();
    let mut best_entries = Vec::new();

    for &kind in &cfg.kinds {
        let matrix = match kind {
            MatrixKind::Bow => bow.clone(),
            MatrixKind::Tfidf => tfidf_transform(&bow),
        };
        let configs = sample_configs(&grid, cfg.sample_count, sample_seed(cfg, kind))?;
        let fit_opts = FitOptions {
            iterations: cfg.iterations,
            burn_in: cfg.burn_in,
            global_seed: cfg.global_seed,
        };
        let report = search(&matrix, &configs, &fit_opts, &cfg.coherence, &tokenized);

        let kind_dir = cfg.out_dir.join(kind.to_string());
        fs::create_dir_all(&kind_dir)?;
        let rel = |name: &str| format!("{kind}/{name}");

        let ranking: Vec<_> = report.ranked.iter().map(|(r, _)| r.clone()).collect();
        write_ranking_csv(&ranking, &kind_dir.join("ranking.csv"))?;
        artifacts.push(rel("ranking.csv"));

        let (best, model) = select_best(&report)?;
        best_entries.push(BestEntry {
            kind,
            k: best.k,
            alpha: best.alpha,
            eta: best.eta,
            coherence: best.coherence,
        });

        let artifact = LdaArtifact::from_model(model, matrix.doc_ids());
        artifact.save(&kind_dir.join("model.json"))?;
        artifacts.push(rel("model.json"));

        let labels = cfg.topic_labels.as_deref();
        let series = dominance_series(model, &corpus)?;
        write_dominance_csv(&series, &kind_dir.join("dominance.csv"))?;
        artifacts.push(rel("dominance.csv"));
        write_dominance_svg(&series, labels, &kind_dir.join("dominance.svg"))?;
        artifacts.push(rel("dominance.svg"));

        let embedding = mds_embed(model)?;
        write_mds_csv(&embedding, &kind_dir.join("mds.csv"))?;
        artifacts.push(rel("mds.csv"));
        write_mds_svg(&embedding, labels, &kind_dir.join("mds.svg"))?;
        artifacts.push(rel("mds.svg"));

        let clouds = wordcloud_data(model, 15.min(matrix.n_terms()))?;
        write_topics_json(&clouds, labels, &kind_dir.join("topics.json"))?;
        artifacts.push(rel("topics.json"));
    }

    artifacts.sort();
    let entries = artifacts
        .iter()
        .map(|rel| {
            Ok(ArtifactEntry {
                path: rel.clone(),
                sha256: file_sha256(&cfg.out_dir.join(rel))?,
            })
        })
        .collect::<Result<Vec<_>, std::io::Error>>()?;

    let manifest = RunManifest {
        config_hash: cfg.content_hash(),
        global_seed: cfg.global_seed,
        corpus_fingerprint: corpus.fingerprint(),
        n_documents: corpus.len(),
        best: best_entries,
        artifacts: entries,
    };
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(cfg.out_dir.join("manifest.json"), json)?;
    Ok(manifest)
}
