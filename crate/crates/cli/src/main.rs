//! Command-line front end. Exit code 0 on success; on failure the
//! stage tag from the underlying error is printed to stderr.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use fomc_topics::coherence::CoherenceConfig;
use fomc_topics::corpus::{fetch_statements, load_corpus, strip_markup_text, Corpus, CorpusFormat, Document};
use fomc_topics::hyperopt::{
    enumerate_grid, sample_configs, search, select_best, write_ranking_csv, FitOptions, GridSpec,
};
use fomc_topics::indicators::{
    extreme_summary, write_summary_csv, IndicatorName, IndicatorSeries,
};
use fomc_topics::lda::{fit, LdaArtifact, LdaHyperparams};
use fomc_topics::pipeline::{run, RunConfig};
use fomc_topics::preprocess::{normalize, PreprocessConfig};
use fomc_topics::report::{
    write_dominance_csv, write_dominance_svg, write_mds_csv, write_mds_svg, write_topics_json,
};
use fomc_topics::trends::{dominance_series, mds_embed, wordcloud_data};
use fomc_topics::vectorize::{bow_matrix, build_dictionary, tfidf_transform, MatrixKind};

#[derive(Parser)]
#[command(name = "fomc-topics", about = "Topic analysis of dated statement corpora", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, ValueEnum)]
enum KindArg {
    Bow,
    Tfidf,
    Both,
}

impl KindArg {
    fn kinds(self) -> Vec<MatrixKind> {
        match self {
            KindArg::Bow => vec![MatrixKind::Bow],
            KindArg::Tfidf => vec![MatrixKind::Tfidf],
            KindArg::Both => vec![MatrixKind::Bow, MatrixKind::Tfidf],
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Jsonl,
    TextDir,
}

impl From<FormatArg> for CorpusFormat {
    fn from(f: FormatArg) -> CorpusFormat {
        match f {
            FormatArg::Jsonl => CorpusFormat::Jsonl,
            FormatArg::TextDir => CorpusFormat::TextDir,
        }
    }
}

#[derive(Args)]
struct CorpusArgs {
    /// Corpus file (jsonl) or directory (text-dir)
    #[arg(long)]
    corpus: PathBuf,
    #[arg(long, value_enum, default_value = "jsonl")]
    format: FormatArg,
    #[arg(long)]
    stopwords: Option<PathBuf>,
    #[arg(long)]
    blocklist: Option<PathBuf>,
    /// Disable stemming
    #[arg(long)]
    no_stem: bool,
    /// Document-frequency cutoff; terms in more than this fraction of
    /// documents are dropped
    #[arg(long, default_value_t = 0.5)]
    max_df: f64,
}

impl CorpusArgs {
    fn load(&self) -> Result<(Corpus, Vec<fomc_topics::preprocess::TokenizedDocument>)> {
        let corpus = load_corpus(&self.corpus, self.format.into())?;
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
        let cfg = PreprocessConfig::from_files(
            self.stopwords.as_deref(),
            self.blocklist.as_deref(),
            !self.no_stem,
        )?;
        let tokenized = corpus.documents().iter().map(|d| normalize(d, &cfg)).collect();
        Ok((corpus, tokenized))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Download statements from a URL list and persist them as jsonl
    Fetch {
        /// File with one URL per line; '#' starts a comment
        #[arg(long)]
        urls: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Tokenize a corpus and write one token list per document
    Preprocess {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Fit a single model at fixed hyperparameters
    Fit {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum, default_value = "bow")]
        kind: KindArg,
        #[arg(long, default_value_t = 5)]
        k: usize,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 0.5)]
        eta: f64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Output model file (json)
        #[arg(long)]
        out: PathBuf,
    },
    /// Random hyperparameter search; writes ranking.csv and the best
    /// model per matrix kind
    Search {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindArg,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        /// Use one sampled config set for both kinds
        #[arg(long)]
        shared_sample: bool,
        #[arg(long)]
        out: PathBuf,
    },
    /// Rebuild the report bundle from a saved model
    Report {
        /// Saved model file (json)
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        corpus: PathBuf,
        #[arg(long, value_enum, default_value = "jsonl")]
        format: FormatArg,
        /// Comma-separated topic labels
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
    /// Extreme-value summary of indicator series over a date window
    Indicators {
        /// Repeated name=path pairs; names: interest_rate,
        /// real_gdp_growth, unemployment, inflation
        #[arg(long = "series", required = true)]
        series: Vec<String>,
        /// Date window as start:end (ISO dates, inclusive)
        #[arg(long)]
        window: String,
        #[arg(long)]
        out: PathBuf,
    },
    /// Full pipeline: preprocess, search both branches, emit reports
    /// and a manifest
    Run {
        #[command(flatten)]
        corpus: CorpusArgs,
        #[arg(long, value_enum, default_value = "both")]
        kind: KindArg,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        iterations: usize,
        #[arg(long, default_value_t = 0)]
        burn_in: usize,
        #[arg(long)]
        shared_sample: bool,
        #[arg(long, value_delimiter = ',')]
        labels: Option<Vec<String>>,
        #[arg(long)]
        out: PathBuf,
    },
}

fn build_matrix(
    tokenized: &[fomc_topics::preprocess::TokenizedDocument],
    max_df: f64,
    kind: MatrixKind,
) -> Result<fomc_topics::vectorize::DocTermMatrix> {
    let dict = build_dictionary(tokenized, max_df)?;
    let bow = bow_matrix(tokenized, &dict)?;
    Ok(match kind {
        MatrixKind::Bow => bow,
        MatrixKind::Tfidf => tfidf_transform(&bow),
    })
}

fn parse_window(s: &str) -> Result<(NaiveDate, NaiveDate)> {
    let (a, b) = s
        .split_once(':')
        .context("window must be start:end")?;
    let start = a.parse().with_context(|| format!("bad start date {a:?}"))?;
    let end = b.parse().with_context(|| format!("bad end date {b:?}"))?;
    Ok((start, end))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<()> {
    match cmd {
        Command::Fetch { urls, out } => {
            let text = std::fs::read_to_string(&urls)
                .with_context(|| format!("reading {}", urls.display()))?;
            let list: Vec<String> = text
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(String::from)
                .collect();
            let (docs, failures) = fetch_statements(&list, &out)?;
            println!("fetched {} of {} documents", docs.len(), list.len());
            for f in &failures {
                eprintln!("failed: {} ({})", f.url, f.reason);
            }
            if docs.is_empty() && !list.is_empty() {
                bail!("[corpus] every fetch failed");
            }
            Ok(())
        }
        Command::Preprocess { corpus, out } => {
            let (_, tokenized) = corpus.load()?;
            let mut lines = String::new();
            for t in &tokenized {
                let v = serde_json::json!({"id": t.id, "date": t.date, "tokens": t.tokens});
                lines.push_str(&serde_json::to_string(&v)?);
                lines.push('\n');
            }
            std::fs::write(&out, lines)?;
            println!("wrote {} documents to {}", tokenized.len(), out.display());
            Ok(())
        }
        Command::Fit {
            corpus,
            kind,
            k,
            alpha,
            eta,
            iterations,
            burn_in,
            seed,
            out,
        } => {
            let kind = *kind
                .kinds()
                .first()
                .filter(|_| kind != KindArg::Both)
                .context("fit takes a single kind (bow or tfidf)")?;
            let (_, tokenized) = corpus.load()?;
            let matrix = build_matrix(&tokenized, corpus.max_df, kind)?;
            let hyper = LdaHyperparams {
                k,
                alpha,
                eta,
                iterations,
                burn_in,
                seed,
            };
            let model = fit(&matrix, &hyper)?;
            LdaArtifact::from_model(&model, matrix.doc_ids()).save(&out)?;
            println!("model written to {}", out.display());
            Ok(())
        }
        Command::Search {
            corpus,
            kind,
            samples,
            seed,
            iterations,
            burn_in,
            shared_sample,
            out,
        } => {
            let (_, tokenized) = corpus.load()?;
            let grid = enumerate_grid(&GridSpec::default())?;
            std::fs::create_dir_all(&out)?;
            for (i, mk) in kind.kinds().into_iter().enumerate() {
                let matrix = build_matrix(&tokenized, corpus.max_df, mk)?;
                let sample_seed = if shared_sample { seed } else { seed.wrapping_add(i as u64) };
                let configs = sample_configs(&grid, samples, sample_seed)?;
                let opts = FitOptions {
                    iterations,
                    burn_in,
                    global_seed: seed,
                };
                let report = search(&matrix, &configs, &opts, &CoherenceConfig::default(), &tokenized);
                let dir = out.join(mk.to_string());
                std::fs::create_dir_all(&dir)?;
                let ranking: Vec<_> = report.ranked.iter().map(|(r, _)| r.clone()).collect();
                write_ranking_csv(&ranking, &dir.join("ranking.csv"))?;
                let (best, model) = select_best(&report)?;
                LdaArtifact::from_model(model, matrix.doc_ids()).save(&dir.join("model.json"))?;
                println!(
                    "{mk}: best K={} alpha={:.2} eta={:.2} coherence={:.6}",
                    best.k, best.alpha, best.eta, best.coherence
                );
            }
            Ok(())
        }
        Command::Report {
            model,
            corpus,
            format,
            labels,
            out,
        } => {
            let artifact = LdaArtifact::load(&model)?;
            let model = artifact.to_model();
            let corpus = load_corpus(&corpus, format.into())?;
            std::fs::create_dir_all(&out)?;
            let labels = labels.as_deref();
            let series = dominance_series(&model, &corpus)?;
            write_dominance_csv(&series, &out.join("dominance.csv"))?;
            write_dominance_svg(&series, labels, &out.join("dominance.svg"))?;
            let embedding = mds_embed(&model)?;
            write_mds_csv(&embedding, &out.join("mds.csv"))?;
            write_mds_svg(&embedding, labels, &out.join("mds.svg"))?;
            let clouds = wordcloud_data(&model, 15.min(model.dictionary.len()))?;
            write_topics_json(&clouds, labels, &out.join("topics.json"))?;
            println!("report bundle written to {}", out.display());
            Ok(())
        }
        Command::Indicators { series, window, out } => {
            let (start, end) = parse_window(&window)?;
            let mut loaded = Vec::new();
            for spec in &series {
                let (name, path) = spec
                    .split_once('=')
                    .with_context(|| format!("expected name=path, got {spec:?}"))?;
                let name = IndicatorName::parse(name)
                    .with_context(|| format!("unknown indicator {name:?}"))?;
                loaded.push(IndicatorSeries::from_csv(name, Path::new(path))?);
            }
            let entries = extreme_summary(&loaded, start, end)?;
            write_summary_csv(&entries, &out)?;
            println!("summary written to {}", out.display());
            Ok(())
        }
        Command::Run {
            corpus,
            kind,
            samples,
            seed,
            iterations,
            burn_in,
            shared_sample,
            labels,
            out,
        } => {
            let cfg = RunConfig {
                corpus_path: corpus.corpus.clone(),
                corpus_format: corpus.format.into(),
                stopwords_path: corpus.stopwords.clone(),
                blocklist_path: corpus.blocklist.clone(),
                stem: !corpus.no_stem,
                max_df: corpus.max_df,
                grid: GridSpec::default(),
                sample_count: samples,
                global_seed: seed,
                kinds: kind.kinds(),
                iterations,
                burn_in,
                coherence: CoherenceConfig::default(),
                topic_labels: labels,
                shared_sample,
                out_dir: out.clone(),
            };
            let manifest = run(&cfg)?;
            for b in &manifest.best {
                println!(
                    "{}: best K={} alpha={:.2} eta={:.2} coherence={:.6}",
                    b.kind, b.k, b.alpha, b.eta, b.coherence
                );
            }
            println!("manifest written to {}", out.join("manifest.json").display());
            Ok(())
        }
    }
}
