//! Loading, fetching, and persisting dated statement corpora.
//!
//! The canonical on-disk format is JSONL: one UTF-8 JSON object per line
//! with keys exactly `{"id","date","text"}`. A corpus is always kept
//! strictly ordered by `(date, id)`.

use std::collections::HashSet;
use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: missing field {field}")]
    MissingField { line: usize, field: &'static str },
    #[error("line {line}: unparseable date {value:?}")]
    UnparseableDate { line: usize, value: String },
    #[error("duplicate document id {id:?}")]
    DuplicateId { id: String },
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("document id is empty")]
    EmptyId,
}

/// A statement as retrieved from its source, before markup stripping.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RawDocument {
    pub id: String,
    pub date: NaiveDate,
    pub source_url: Option<String>,
    pub html_or_text: String,
}

/// A dated plain-text statement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Document {
    pub id: String,
    pub date: NaiveDate,
    pub text: String,
}

/// An ordered collection of documents, sorted by `(date, id)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Corpus {
    documents: Vec<Document>,
}

impl Corpus {
    /// Builds a corpus from documents, sorting by `(date, id)` and
    /// rejecting duplicates and emptiness.
    pub fn new(mut documents: Vec<Document>) -> Result<Self, CorpusError> {
        if documents.is_empty() {
            return Err(CorpusError::EmptyCorpus);
        }
        let mut seen = HashSet::new();
        for doc in &documents {
            if doc.id.is_empty() {
                return Err(CorpusError::EmptyId);
            }
            if !seen.insert(doc.id.clone()) {
                return Err(CorpusError::DuplicateId { id: doc.id.clone() });
            }
        }
        documents.sort_by(|a, b| (a.date, &a.id).cmp(&(b.date, &b.id)));
        Ok(Corpus { documents })
    }

    pub fn documents(&self) -> &[Document] {
        &self.documents
    }

    /// Number of documents (the corpus size M).
    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// Hex SHA-256 over the ordered `(id, date)` pairs. Used to tie a
    /// fitted model back to the corpus it was fitted on.
    pub fn fingerprint(&self) -> String {
        fingerprint_ids(self.documents.iter().map(|d| (d.id.as_str(), d.date)))
    }
}

/// Fingerprint over ordered `(id, date)` pairs; shared with the matrix side
/// so a model fitted on a matrix can be checked against a corpus.
pub fn fingerprint_ids<'a, I>(ids: I) -> String
where
    I: Iterator<Item = (&'a str, NaiveDate)>,
{
    use sha2::{Digest, Sha256};
    let mut h = Sha256::new();
    for (id, date) in ids {
        h.update(id.as_bytes());
        h.update([0u8]);
        h.update(date.to_string().as_bytes());
        h.update([0u8]);
    }
    hex(&h.finalize())
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CorpusFormat {
    Jsonl,
    TextDir,
}

#[derive(Deserialize)]
struct JsonlLine {
    id: Option<String>,
    date: Option<String>,
    text: Option<String>,
}

/// Loads a corpus from `path`, either a JSONL file or a directory of text
/// files whose names start with a `YYYY-MM-DD` date prefix.
pub fn load_corpus(path: &Path, format: CorpusFormat) -> Result<Corpus, CorpusError> {
    match format {
        CorpusFormat::Jsonl => load_jsonl(path),
        CorpusFormat::TextDir => load_text_dir(path),
    }
}

fn io_err(path: &Path, source: std::io::Error) -> CorpusError {
    CorpusError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn load_jsonl(path: &Path) -> Result<Corpus, CorpusError> {
    let file = fs::File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut docs = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let lineno = i + 1;
        let line = line.map_err(|e| io_err(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        let parsed: JsonlLine = serde_json::from_str(&line).map_err(|_| {
            CorpusError::MissingField {
                line: lineno,
                field: "id/date/text",
            }
        })?;
        let id = parsed.id.ok_or(CorpusError::MissingField {
            line: lineno,
            field: "id",
        })?;
        let date_str = parsed.date.ok_or(CorpusError::MissingField {
            line: lineno,
            field: "date",
        })?;
        let text = parsed.text.ok_or(CorpusError::MissingField {
            line: lineno,
            field: "text",
        })?;
        let date = NaiveDate::parse_from_str(&date_str, "%Y-%m-%d").map_err(|_| {
            CorpusError::UnparseableDate {
                line: lineno,
                value: date_str,
            }
        })?;
        docs.push(Document { id, date, text });
    }
    Corpus::new(docs)
}

fn load_text_dir(path: &Path) -> Result<Corpus, CorpusError> {
    let mut docs = Vec::new();
    let mut entries: Vec<_> = fs::read_dir(path)
        .map_err(|e| io_err(path, e))?
        .collect::<Result<_, _>>()
        .map_err(|e| io_err(path, e))?;
    entries.sort_by_key(|e| e.file_name());
    for (i, entry) in entries.iter().enumerate() {
        let name = entry.file_name().to_string_lossy().into_owned();
        if !entry.path().is_file() {
            continue;
        }
        let prefix: String = name.chars().take(10).collect();
        let date = NaiveDate::parse_from_str(&prefix, "%Y-%m-%d").map_err(|_| {
            CorpusError::UnparseableDate {
                line: i + 1,
                value: name.clone(),
            }
        })?;
        let text = fs::read_to_string(entry.path()).map_err(|e| io_err(&entry.path(), e))?;
        let id = name
            .rsplit_once('.')
            .map(|(stem, _)| stem.to_string())
            .unwrap_or(name);
        docs.push(Document { id, date, text });
    }
    Corpus::new(docs)
}

/// Writes a corpus as canonical JSONL. `load_corpus` of the output
/// round-trips exactly.
pub fn save_corpus(corpus: &Corpus, path: &Path) -> Result<(), CorpusError> {
    let mut file = fs::File::create(path).map_err(|e| io_err(path, e))?;
    for doc in corpus.documents() {
        let line = serde_json::json!({
            "id": doc.id,
            "date": doc.date.to_string(),
            "text": doc.text,
        });
        writeln!(file, "{line}").map_err(|e| io_err(path, e))?;
    }
    Ok(())
}

/// A per-URL fetch failure. Failures are collected, not fatal.
#[derive(Debug, Clone)]
pub struct FetchError {
    pub url: String,
    pub reason: String,
}

/// Fetches each URL, persisting the raw payloads to `out` as JSONL.
/// Results keep input URL order; failures are reported per URL.
///
/// Document ids are derived from the URL's last path segment; the date is
/// parsed from a `YYYYMMDD` or `YYYY-MM-DD` run of characters in the URL,
/// falling back to 1970-01-01 when no date is recognizable.
pub fn fetch_statements(
    urls: &[String],
    out: &Path,
) -> Result<(Vec<RawDocument>, Vec<FetchError>), CorpusError> {
    const MAX_CONCURRENT: usize = 8;
    let mut results: Vec<Option<Result<RawDocument, FetchError>>> = vec![None; urls.len()];
    for chunk_start in (0..urls.len()).step_by(MAX_CONCURRENT) {
        let chunk_end = (chunk_start + MAX_CONCURRENT).min(urls.len());
        let handles: Vec<_> = urls[chunk_start..chunk_end]
            .iter()
            .map(|url| {
                let url = url.clone();
                std::thread::spawn(move || fetch_one(&url))
            })
            .collect();
        for (offset, handle) in handles.into_iter().enumerate() {
            results[chunk_start + offset] = Some(handle.join().expect("fetch thread panicked"));
        }
    }
    let mut docs = Vec::new();
    let mut errors = Vec::new();
    for r in results.into_iter().flatten() {
        match r {
            Ok(doc) => docs.push(doc),
            Err(e) => errors.push(e),
        }
    }
    let mut file = fs::File::create(out).map_err(|e| io_err(out, e))?;
    for doc in &docs {
        let line = serde_json::to_string(doc).expect("raw document serializes");
        writeln!(file, "{line}").map_err(|e| io_err(out, e))?;
    }
    Ok((docs, errors))
}

fn fetch_one(url: &str) -> Result<RawDocument, FetchError> {
    let err = |reason: String| FetchError {
        url: url.to_string(),
        reason,
    };
    let resp = reqwest::blocking::get(url).map_err(|e| err(e.to_string()))?;
    if !resp.status().is_success() {
        return Err(err(format!("http status {}", resp.status())));
    }
    let body = resp.text().map_err(|e| err(e.to_string()))?;
    let id = url
        .trim_end_matches('/')
        .rsplit('/')
        .next()
        .unwrap_or(url)
        .trim_end_matches(".htm")
        .trim_end_matches(".html")
        .to_string();
    let date = date_from_url(url).unwrap_or_else(|| NaiveDate::from_ymd_opt(1970, 1, 1).unwrap());
    Ok(RawDocument {
        id,
        date,
        source_url: Some(url.to_string()),
        html_or_text: body,
    })
}

/// Looks for an 8-digit `YYYYMMDD` run (the Federal Reserve URL scheme) or
/// an ISO `YYYY-MM-DD` substring.
fn date_from_url(url: &str) -> Option<NaiveDate> {
    let bytes = url.as_bytes();
    let mut run = 0usize;
    for (i, b) in bytes.iter().enumerate() {
        if b.is_ascii_digit() {
            run += 1;
            if run >= 8 {
                let s = &url[i + 1 - 8..=i];
                if let Ok(d) = NaiveDate::parse_from_str(s, "%Y%m%d") {
                    return Some(d);
                }
            }
        } else {
            run = 0;
        }
    }
    for i in 0..url.len().saturating_sub(9) {
        if let Ok(d) = NaiveDate::parse_from_str(&url[i..i + 10], "%Y-%m-%d") {
            return Some(d);
        }
    }
    None
}

/// Strips markup from a raw document: tags removed, entity references
/// decoded, whitespace collapsed to single spaces.
pub fn strip_markup(raw: &RawDocument) -> Document {
    Document {
        id: raw.id.clone(),
        date: raw.date,
        text: strip_markup_text(&raw.html_or_text),
    }
}

pub fn strip_markup_text(input: &str) -> String {
    let no_hidden = drop_element_content(input, &["script", "style"]);
    let mut out = String::with_capacity(no_hidden.len());
    let mut chars = no_hidden.chars().peekable();
    while let Some(c) = chars.next() {
        match c {
            '<' => {
                // Tags never nest; skip to the closing '>'.
                for t in chars.by_ref() {
                    if t == '>' {
                        break;
                    }
                }
                out.push(' ');
            }
            '&' => {
                let mut entity = String::new();
                let mut terminated = false;
                while let Some(&n) = chars.peek() {
                    if n == ';' {
                        chars.next();
                        terminated = true;
                        break;
                    }
                    if n.is_ascii_alphanumeric() || n == '#' {
                        entity.push(n);
                        chars.next();
                    } else {
                        break;
                    }
                }
                if terminated {
                    out.push_str(&decode_entity(&entity));
                } else {
                    out.push('&');
                    out.push_str(&entity);
                }
            }
            _ => out.push(c),
        }
    }
    collapse_whitespace(&out)
}

fn drop_element_content(input: &str, elements: &[&str]) -> String {
    let mut text = input.to_string();
    for el in elements {
        loop {
            let lower = text.to_lowercase();
            let open = format!("<{el}");
            let close = format!("</{el}>");
            let Some(start) = lower.find(&open) else { break };
            let Some(end_rel) = lower[start..].find(&close) else {
                break;
            };
            text.replace_range(start..start + end_rel + close.len(), " ");
        }
    }
    text
}

fn decode_entity(name: &str) -> String {
    match name {
        "amp" => "&".to_string(),
        "lt" => "<".to_string(),
        "gt" => ">".to_string(),
        "quot" => "\"".to_string(),
        "apos" => "'".to_string(),
        "nbsp" => " ".to_string(),
        "mdash" | "ndash" => "-".to_string(),
        "rsquo" | "lsquo" => "'".to_string(),
        "rdquo" | "ldquo" => "\"".to_string(),
        _ => {
            if let Some(num) = name.strip_prefix("#x").or_else(|| name.strip_prefix("#X")) {
                if let Ok(cp) = u32::from_str_radix(num, 16) {
                    if let Some(c) = char::from_u32(cp) {
                        return sanitize_decoded(c);
                    }
                }
            } else if let Some(num) = name.strip_prefix('#') {
                if let Ok(cp) = num.parse::<u32>() {
                    if let Some(c) = char::from_u32(cp) {
                        return sanitize_decoded(c);
                    }
                }
            }
            // Unknown entity: drop it rather than leak "&word;" fragments.
            " ".to_string()
        }
    }
}

// Numeric entities may decode to markup characters; keep the no-tag
// invariant by spacing them out.
fn sanitize_decoded(c: char) -> String {
    match c {
        '<' | '>' => " ".to_string(),
        _ => c.to_string(),
    }
}

fn collapse_whitespace(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}
