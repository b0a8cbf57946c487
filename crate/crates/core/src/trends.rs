//! Analysis products of a fitted model: topic dominance over time, the
//! 2-D MDS topic embedding with marginal sizes, and wordcloud data.

use chrono::NaiveDate;
use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::corpus::Corpus;
use crate::lda::{LdaError, LdaModel};

#[derive(Debug, Error)]
pub enum TrendsError {
    #[error("model was fitted on a different corpus (fingerprint mismatch)")]
    FingerprintMismatch,
    #[error("distributions have different lengths: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error(transparent)]
    Lda(#[from] LdaError),
}

/// Per-document topic mixtures paired with document dates, in corpus
/// order. The theta rows are carried over exactly, no renormalization.
#[derive(Debug, Clone, PartialEq)]
pub struct DominanceSeries {
    pub dates: Vec<NaiveDate>,
    pub mixtures: Vec<Vec<f64>>,
}

/// Pairs theta rows with document dates. The model must have been fitted
/// on this corpus.
pub fn dominance_series(model: &LdaModel, corpus: &Corpus) -> Result<DominanceSeries, TrendsError> {
    if model.corpus_fingerprint != corpus.fingerprint() {
        return Err(TrendsError::FingerprintMismatch);
    }
    Ok(DominanceSeries {
        dates: corpus.documents().iter().map(|d| d.date).collect(),
        mixtures: model.theta.clone(),
    })
}

/// A maximal run of dates sharing one dominant (argmax) topic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DominantPeriod {
    pub start: NaiveDate,
    pub end: NaiveDate,
    pub topic: usize,
}

fn argmax(row: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in row.iter().enumerate() {
        if x > row[best] {
            best = i;
        }
    }
    best
}

/// Splits the series into maximal argmax runs; runs shorter than
/// `min_len` are merged into the preceding period (the leading run is
/// always kept so the output tiles the full date range).
pub fn dominant_periods(series: &DominanceSeries, min_len: usize) -> Vec<DominantPeriod> {
    assert!(min_len >= 1, "min_len must be positive");
    let mut runs: Vec<(usize, usize, usize)> = Vec::new(); // (start_idx, end_idx, topic)
    for (i, row) in series.mixtures.iter().enumerate() {
        let t = argmax(row);
        match runs.last_mut() {
            Some((_, end, topic)) if *topic == t && *end == i - 1 => *end = i,
            _ => runs.push((i, i, t)),
        }
    }
    let mut periods: Vec<DominantPeriod> = Vec::new();
    for (start, end, topic) in runs {
        let len = end - start + 1;
        match periods.last_mut() {
            Some(prev) if len < min_len => prev.end = series.dates[end],
            _ => periods.push(DominantPeriod {
                start: series.dates[start],
                end: series.dates[end],
                topic,
            }),
        }
    }
    periods
}

/// Jensen-Shannon divergence with base-2 logarithms, bounded by 1.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64, TrendsError> {
    if p.len() != q.len() {
        return Err(TrendsError::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let kl_to_mid = |a: &[f64], b: &[f64]| -> f64 {
        a.iter()
            .zip(b)
            .map(|(&x, &y)| {
                if x > 0.0 {
                    let m = 0.5 * (x + y);
                    x * (x / m).log2()
                } else {
                    0.0
                }
            })
            .sum()
    };
    Ok(0.5 * kl_to_mid(p, q) + 0.5 * kl_to_mid(q, p))
}

/// K topic points in the plane plus their marginal weights.
#[derive(Debug, Clone, PartialEq)]
pub struct TopicEmbedding {
    pub coords: Vec<(f64, f64)>,
    pub sizes: Vec<f64>,
    /// Set when the second eigenvalue is <= 1e-12 (topics collapse onto a
    /// line); reported, not fatal.
    pub degenerate_spectrum: bool,
}

/// Classical MDS on the pairwise JS-divergence matrix of the phi rows:
/// double-center the squared distances and keep the top two eigenpairs.
/// Sign convention: in each axis the largest-magnitude coordinate is
/// made positive.
pub fn mds_embed(model: &LdaModel) -> Result<TopicEmbedding, TrendsError> {
    let k = model.hyper.k;
    let mut d2 = DMatrix::zeros(k, k);
    for i in 0..k {
        for j in i + 1..k {
            let d = js_divergence(&model.phi[i], &model.phi[j])?;
            d2[(i, j)] = d * d;
            d2[(j, i)] = d * d;
        }
    }
    // B = -1/2 J D^2 J with J = I - 11'/k.
    let ones = DMatrix::from_element(k, k, 1.0 / k as f64);
    let j = DMatrix::identity(k, k) - ones;
    let b = -0.5 * (&j * d2 * &j);
    let eig = SymmetricEigen::new(b);
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("eigenvalues are finite")
    });
    let axis = |rank: usize| -> Vec<f64> {
        let idx = order[rank];
        let lambda = eig.eigenvalues[idx].max(0.0);
        let scale = lambda.sqrt();
        let col = eig.eigenvectors.column(idx);
        let mut v: Vec<f64> = (0..k).map(|i| col[i] * scale).collect();
        // Fixed sign: largest-magnitude entry positive.
        let mut pivot = 0;
        for (i, &x) in v.iter().enumerate() {
            if x.abs() > v[pivot].abs() {
                pivot = i;
            }
        }
        if v[pivot] < 0.0 {
            for x in v.iter_mut() {
                *x = -*x;
            }
        }
        v
    };
    let xs = axis(0);
    let ys = axis(1);
    let degenerate = eig.eigenvalues[order[1]] <= 1e-12;
    let m = model.theta.len() as f64;
    let sizes: Vec<f64> = (0..k)
        .map(|kk| model.theta.iter().map(|row| row[kk]).sum::<f64>() / m)
        .collect();
    Ok(TopicEmbedding {
        coords: xs.into_iter().zip(ys).collect(),
        sizes,
        degenerate_spectrum: degenerate,
    })
}

/// Per-topic top-n words with weights renormalized to sum to 1.
pub fn wordcloud_data(model: &LdaModel, n: usize) -> Result<Vec<Vec<(String, f64)>>, TrendsError> {
    let mut out = Vec::with_capacity(model.hyper.k);
    for topic in 0..model.hyper.k {
        let mut words = model.top_words(topic, n)?;
        let total: f64 = words.iter().map(|(_, w)| w).sum();
        for (_, w) in words.iter_mut() {
            *w /= total;
        }
        out.push(words);
    }
    Ok(out)
}
