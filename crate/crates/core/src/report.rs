//! Report bundle emitters: dominance series, MDS embedding, and
//! per-topic word lists as CSV, SVG, and JSON. Output is byte-
//! deterministic for identical inputs.

use std::io::Write;
use std::path::Path;

use thiserror::Error;

use crate::trends::{DominanceSeries, TopicEmbedding};

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

/// Fixed categorical palette (10 entries, cycled).
const PALETTE: [&str; 10] = [
    "#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f", "#edc948", "#b07aa1", "#ff9da7",
    "#9c755f", "#bab0ac",
];

pub fn write_dominance_csv(series: &DominanceSeries, path: &Path) -> Result<(), ReportError> {
    let k = series.mixtures.first().map(|r| r.len()).unwrap_or(0);
    let mut f = std::fs::File::create(path)?;
    let header: Vec<String> = (0..k).map(|i| format!("topic_{i}")).collect();
    writeln!(f, "date,{}", header.join(","))?;
    for (date, row) in series.dates.iter().zip(&series.mixtures) {
        let vals: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
        writeln!(f, "{date},{}", vals.join(","))?;
    }
    Ok(())
}

/// Stack plot of the topic mixtures over document index, x-labelled by
/// date at the extremes.
pub fn write_dominance_svg(
    series: &DominanceSeries,
    labels: Option<&[String]>,
    path: &Path,
) -> Result<(), ReportError> {
    let (w, h) = (900.0, 400.0);
    let (ml, mr, mt, mb) = (50.0, 150.0, 20.0, 40.0);
    let (pw, ph) = (w - ml - mr, h - mt - mb);
    let n = series.mixtures.len();
    let k = series.mixtures.first().map(|r| r.len()).unwrap_or(0);
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    let x_at = |i: usize| {
        if n <= 1 {
            ml + pw / 2.0
        } else {
            ml + pw * i as f64 / (n - 1) as f64
        }
    };
    // Stacked bands, bottom-up: band t spans cumulative [0..t) to [0..t].
    for topic in 0..k {
        let mut upper: Vec<(f64, f64)> = Vec::with_capacity(n);
        let mut lower: Vec<(f64, f64)> = Vec::with_capacity(n);
        for (i, row) in series.mixtures.iter().enumerate() {
            let below: f64 = row[..topic].iter().sum();
            let above = below + row[topic];
            lower.push((x_at(i), mt + ph * (1.0 - below)));
            upper.push((x_at(i), mt + ph * (1.0 - above)));
        }
        let mut d = String::from("M");
        for (x, y) in &upper {
            d.push_str(&format!(" {x:.2},{y:.2}"));
        }
        for (x, y) in lower.iter().rev() {
            d.push_str(&format!(" L {x:.2},{y:.2}"));
        }
        d.push('Z');
        svg.push_str(&format!(
            "<path d=\"{d}\" fill=\"{}\" stroke=\"none\"/>\n",
            PALETTE[topic % PALETTE.len()]
        ));
    }
    // Axes and date labels.
    svg.push_str(&format!(
        "<line x1=\"{ml}\" y1=\"{}\" x2=\"{}\" y2=\"{}\" stroke=\"black\"/>\n",
        mt + ph,
        ml + pw,
        mt + ph
    ));
    if let (Some(first), Some(last)) = (series.dates.first(), series.dates.last()) {
        svg.push_str(&format!(
            "<text x=\"{ml}\" y=\"{}\" font-size=\"12\">{first}</text>\n",
            h - 10.0
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\" text-anchor=\"end\">{last}</text>\n",
            ml + pw,
            h - 10.0
        ));
    }
    for topic in 0..k {
        let label = labels
            .and_then(|l| l.get(topic))
            .cloned()
            .unwrap_or_else(|| format!("Topic {topic}"));
        let y = mt + 16.0 * topic as f64;
        svg.push_str(&format!(
            "<rect x=\"{}\" y=\"{}\" width=\"12\" height=\"12\" fill=\"{}\"/>\n",
            w - mr + 10.0,
            y,
            PALETTE[topic % PALETTE.len()]
        ));
        svg.push_str(&format!(
            "<text x=\"{}\" y=\"{}\" font-size=\"12\">{}</text>\n",
            w - mr + 28.0,
            y + 10.0,
            escape_xml(&label)
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

pub fn write_mds_csv(embedding: &TopicEmbedding, path: &Path) -> Result<(), ReportError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "topic,x,y,size")?;
    for (topic, ((x, y), size)) in embedding
        .coords
        .iter()
        .zip(&embedding.sizes)
        .enumerate()
    {
        writeln!(f, "{topic},{x:.6},{y:.6},{size:.6}")?;
    }
    Ok(())
}

pub fn write_mds_svg(
    embedding: &TopicEmbedding,
    labels: Option<&[String]>,
    path: &Path,
) -> Result<(), ReportError> {
    let (w, h) = (500.0, 500.0);
    let margin = 60.0;
    let span = embedding
        .coords
        .iter()
        .flat_map(|&(x, y)| [x.abs(), y.abs()])
        .fold(0.0f64, f64::max)
        .max(1e-9);
    let scale = (w / 2.0 - margin) / span;
    let mut svg = String::new();
    svg.push_str(&format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">\n"
    ));
    svg.push_str("<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n");
    svg.push_str(&format!(
        "<line x1=\"0\" y1=\"{0}\" x2=\"{w}\" y2=\"{0}\" stroke=\"#ddd\"/>\n",
        h / 2.0
    ));
    svg.push_str(&format!(
        "<line x1=\"{0}\" y1=\"0\" x2=\"{0}\" y2=\"{h}\" stroke=\"#ddd\"/>\n",
        w / 2.0
    ));
    for (topic, (&(x, y), &size)) in embedding.coords.iter().zip(&embedding.sizes).enumerate() {
        let cx = w / 2.0 + x * scale;
        let cy = h / 2.0 - y * scale;
        let r = 8.0 + 60.0 * size.sqrt();
        svg.push_str(&format!(
            "<circle cx=\"{cx:.2}\" cy=\"{cy:.2}\" r=\"{r:.2}\" fill=\"{}\" fill-opacity=\"0.6\"/>\n",
            PALETTE[topic % PALETTE.len()]
        ));
        let label = labels
            .and_then(|l| l.get(topic))
            .cloned()
            .unwrap_or_else(|| format!("Topic {topic}"));
        svg.push_str(&format!(
            "<text x=\"{cx:.2}\" y=\"{cy:.2}\" font-size=\"12\" text-anchor=\"middle\">{}</text>\n",
            escape_xml(&label)
        ));
    }
    svg.push_str("</svg>\n");
    std::fs::write(path, svg)?;
    Ok(())
}

/// Per-topic top-word arrays as JSON.
pub fn write_topics_json(
    clouds: &[Vec<(String, f64)>],
    labels: Option<&[String]>,
    path: &Path,
) -> Result<(), ReportError> {
    let topics: Vec<serde_json::Value> = clouds
        .iter()
        .enumerate()
        .map(|(topic, words)| {
            let words: Vec<serde_json::Value> = words
                .iter()
                .map(|(term, weight)| {
                    serde_json::json!({"term": term, "weight": format!("{weight:.6}").parse::<f64>().unwrap()})
                })
                .collect();
            serde_json::json!({
                "topic": topic,
                "label": labels.and_then(|l| l.get(topic)).cloned(),
                "words": words,
            })
        })
        .collect();
    let json = serde_json::to_string_pretty(&serde_json::json!({ "topics": topics }))?;
    std::fs::write(path, json)?;
    Ok(())
}

fn escape_xml(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}
