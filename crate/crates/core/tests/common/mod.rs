//! Shared helpers for the integration and acceptance suites. The C_v
//! oracle here is a deliberately naive re-derivation (explicit window
//! enumeration, dense matrices) kept independent of the library code.

// Each test binary uses a different subset of these helpers.
#![allow(dead_code)]

use std::collections::BTreeSet;
use std::path::PathBuf;

use chrono::NaiveDate;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use fomc_topics::coherence::CoherenceConfig;
use fomc_topics::preprocess::TokenizedDocument;

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

pub fn tokdoc(id: &str, tokens: &[&str]) -> TokenizedDocument {
    TokenizedDocument {
        id: id.into(),
        date: NaiveDate::from_ymd_opt(2005, 2, 2).unwrap(),
        tokens: tokens.iter().map(|s| s.to_string()).collect(),
    }
}

/// Two disjoint three-word vocabularies on alternating documents.
pub fn synthetic_two_topic(n_docs: usize, doc_len: usize) -> Vec<TokenizedDocument> {
    let vocab_a = ["aa", "bb", "cc"];
    let vocab_b = ["xx", "yy", "zz"];
    let mut rng = ChaCha20Rng::seed_from_u64(7);
    (0..n_docs)
        .map(|i| {
            let vocab = if i % 2 == 0 { &vocab_a } else { &vocab_b };
            let tokens: Vec<&str> =
                (0..doc_len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
            tokdoc(&format!("doc-{i:03}"), &tokens)
        })
        .collect()
}

/// Brute-force C_v: materialize every window as a word set, estimate
/// probabilities by counting sets, build dense NPMI^gamma matrices, and
/// confirm each row against the column-sum vector by cosine.
pub fn cv_oracle(
    topics: &[Vec<String>],
    docs: &[TokenizedDocument],
    cfg: &CoherenceConfig,
) -> (f64, Vec<f64>) {
    let mut windows: Vec<BTreeSet<&str>> = Vec::new();
    for d in docs {
        let len = d.tokens.len();
        if len == 0 {
            continue;
        }
        if len < cfg.window {
            windows.push(d.tokens.iter().map(|s| s.as_str()).collect());
        } else {
            for start in 0..=(len - cfg.window) {
                windows.push(d.tokens[start..start + cfg.window].iter().map(|s| s.as_str()).collect());
            }
        }
    }
    let n = windows.len() as f64;
    let count = |w: &str| windows.iter().filter(|win| win.contains(w)).count() as f64;
    let count2 = |a: &str, b: &str| {
        windows.iter().filter(|win| win.contains(a) && win.contains(b)).count() as f64
    };
    let mut per_topic = Vec::with_capacity(topics.len());
    for topic in topics {
        let m = topic.len();
        let mut mat = vec![vec![0.0f64; m]; m];
        for i in 0..m {
            for j in 0..m {
                let joint = if i == j {
                    count(&topic[i])
                } else {
                    count2(&topic[i], &topic[j])
                };
                let p12 = joint / n + cfg.epsilon;
                let p1 = count(&topic[i]) / n;
                let p2 = count(&topic[j]) / n;
                let v = (p12 / (p1 * p2)).ln() / -p12.ln();
                mat[i][j] = v.signum() * v.abs().powf(cfg.gamma);
            }
        }
        let mut sum = vec![0.0f64; m];
        for row in &mat {
            for (s, x) in sum.iter_mut().zip(row) {
                *s += x;
            }
        }
        let mut acc = 0.0;
        for row in &mat {
            let dot: f64 = row.iter().zip(&sum).map(|(a, b)| a * b).sum();
            let na: f64 = row.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nb: f64 = sum.iter().map(|x| x * x).sum::<f64>().sqrt();
            acc += if na == 0.0 || nb == 0.0 { 0.0 } else { dot / (na * nb) };
        }
        per_topic.push(acc / m as f64);
    }
    let raw = per_topic.iter().sum::<f64>() / per_topic.len() as f64;
    (raw.clamp(0.0, 1.0), per_topic)
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&i, &j| v[i].partial_cmp(&v[j]).unwrap());
        let mut r = vec![0.0; n];
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (ra, rb) = (ranks(a), ranks(b));
    let n = a.len() as f64;
    let ma = ra.iter().sum::<f64>() / n;
    let mb = rb.iter().sum::<f64>() / n;
    let cov: f64 = ra.iter().zip(&rb).map(|(x, y)| (x - ma) * (y - mb)).sum();
    let va: f64 = ra.iter().map(|x| (x - ma).powi(2)).sum::<f64>().sqrt();
    let vb: f64 = rb.iter().map(|y| (y - mb).powi(2)).sum::<f64>().sqrt();
    cov / (va * vb)
}
