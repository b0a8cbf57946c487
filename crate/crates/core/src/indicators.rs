//! Macroeconomic indicator series: the Taylor rule and per-window
//! extreme-value summaries. All values are in percent.

use std::io::Write;
use std::path::Path;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IndicatorError {
    #[error("coefficient {name} must be positive, got {value}")]
    NonPositiveCoefficient { name: &'static str, value: f64 },
    #[error("series {0:?} has no observations in the window")]
    EmptyWindow(String),
    #[error("observation dates must be strictly increasing (at {0})")]
    NonIncreasingDates(NaiveDate),
    #[error("non-finite value at {0}")]
    NonFiniteValue(NaiveDate),
    #[error("csv parse error at line {line}: {reason}")]
    Csv { line: usize, reason: String },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IndicatorName {
    InterestRate,
    RealGdpGrowth,
    Unemployment,
    Inflation,
}

impl IndicatorName {
    pub fn as_str(&self) -> &'static str {
        match self {
            IndicatorName::InterestRate => "interest_rate",
            IndicatorName::RealGdpGrowth => "real_gdp_growth",
            IndicatorName::Unemployment => "unemployment",
            IndicatorName::Inflation => "inflation",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "interest_rate" => Some(IndicatorName::InterestRate),
            "real_gdp_growth" => Some(IndicatorName::RealGdpGrowth),
            "unemployment" => Some(IndicatorName::Unemployment),
            "inflation" => Some(IndicatorName::Inflation),
            _ => None,
        }
    }

    /// Table convention: the minimum is the notable extreme for every
    /// indicator except unemployment, where it is the maximum.
    pub fn extreme_kind(&self) -> ExtremeKind {
        match self {
            IndicatorName::Unemployment => ExtremeKind::Max,
            _ => ExtremeKind::Min,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExtremeKind {
    Min,
    Max,
}

impl ExtremeKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExtremeKind::Min => "min",
            ExtremeKind::Max => "max",
        }
    }
}

/// A dated scalar series, values in percent, dates strictly increasing.
#[derive(Debug, Clone, PartialEq)]
pub struct IndicatorSeries {
    pub name: IndicatorName,
    pub observations: Vec<(NaiveDate, f64)>,
}

impl IndicatorSeries {
    pub fn new(
        name: IndicatorName,
        observations: Vec<(NaiveDate, f64)>,
    ) -> Result<Self, IndicatorError> {
        for w in observations.windows(2) {
            if w[1].0 <= w[0].0 {
                return Err(IndicatorError::NonIncreasingDates(w[1].0));
            }
        }
        for &(d, v) in &observations {
            if !v.is_finite() {
                return Err(IndicatorError::NonFiniteValue(d));
            }
        }
        Ok(IndicatorSeries { name, observations })
    }

    /// Reads `date,value` CSV (ISO dates, optional header line).
    pub fn from_csv(name: IndicatorName, path: &Path) -> Result<Self, IndicatorError> {
        let text = std::fs::read_to_string(path)?;
        let mut observations = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.to_lowercase().starts_with("date")) {
                continue;
            }
            let (date_s, value_s) = line.split_once(',').ok_or(IndicatorError::Csv {
                line: i + 1,
                reason: "expected date,value".into(),
            })?;
            let date =
                NaiveDate::parse_from_str(date_s.trim(), "%Y-%m-%d").map_err(|e| {
                    IndicatorError::Csv {
                        line: i + 1,
                        reason: e.to_string(),
                    }
                })?;
            let value: f64 = value_s.trim().parse().map_err(|_| IndicatorError::Csv {
                line: i + 1,
                reason: format!("bad value {value_s:?}"),
            })?;
            observations.push((date, value));
        }
        IndicatorSeries::new(name, observations)
    }
}

/// Inputs of the Taylor rule, all in percent.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaylorRuleParams {
    /// Actual inflation.
    pub pi_t: f64,
    /// Target inflation.
    pub pi_star: f64,
    /// Equilibrium real rate.
    pub r_star: f64,
    /// Actual GDP growth.
    pub y_t: f64,
    /// Potential GDP growth.
    pub y_bar: f64,
    /// Inflation-gap coefficient.
    pub a_pi: f64,
    /// Output-gap coefficient.
    pub a_y: f64,
}

impl TaylorRuleParams {
    pub fn with_default_coefficients(
        pi_t: f64,
        pi_star: f64,
        r_star: f64,
        y_t: f64,
        y_bar: f64,
    ) -> Self {
        TaylorRuleParams {
            pi_t,
            pi_star,
            r_star,
            y_t,
            y_bar,
            a_pi: 0.5,
            a_y: 0.5,
        }
    }
}

/// The nominal policy rate:
/// `i = pi + r* + a_pi (pi - pi*) + a_y (y - y_bar)`.
pub fn taylor_rate(p: &TaylorRuleParams) -> Result<f64, IndicatorError> {
    if !(p.a_pi > 0.0) {
        return Err(IndicatorError::NonPositiveCoefficient {
            name: "a_pi",
            value: p.a_pi,
        });
    }
    if !(p.a_y > 0.0) {
        return Err(IndicatorError::NonPositiveCoefficient {
            name: "a_y",
            value: p.a_y,
        });
    }
    Ok(p.pi_t + p.r_star + p.a_pi * (p.pi_t - p.pi_star) + p.a_y * (p.y_t - p.y_bar))
}

/// One extreme observation of one indicator within a window.
#[derive(Debug, Clone, PartialEq)]
pub struct ExtremeEntry {
    pub name: IndicatorName,
    pub kind: ExtremeKind,
    pub value: f64,
    pub date: NaiveDate,
}

/// Per-indicator extremes inside `[start, end]`: minima everywhere,
/// maxima for unemployment. Ties take the earliest date.
pub fn extreme_summary(
    series: &[IndicatorSeries],
    start: NaiveDate,
    end: NaiveDate,
) -> Result<Vec<ExtremeEntry>, IndicatorError> {
    let mut out = Vec::with_capacity(series.len());
    for s in series {
        let kind = s.name.extreme_kind();
        let mut best: Option<(NaiveDate, f64)> = None;
        for &(d, v) in &s.observations {
            if d < start || d > end {
                continue;
            }
            let better = match (&best, kind) {
                (None, _) => true,
                (Some((_, bv)), ExtremeKind::Min) => v < *bv,
                (Some((_, bv)), ExtremeKind::Max) => v > *bv,
            };
            if better {
                best = Some((d, v));
            }
        }
        let (date, value) =
            best.ok_or_else(|| IndicatorError::EmptyWindow(s.name.as_str().to_string()))?;
        out.push(ExtremeEntry {
            name: s.name,
            kind,
            value,
            date,
        });
    }
    Ok(out)
}

/// Writes the summary as CSV `indicator,extreme,value,date`.
pub fn write_summary_csv(entries: &[ExtremeEntry], path: &Path) -> Result<(), IndicatorError> {
    let mut f = std::fs::File::create(path)?;
    writeln!(f, "indicator,extreme,value,date")?;
    for e in entries {
        writeln!(
            f,
            "{},{},{:.2},{}",
            e.name.as_str(),
            e.kind.as_str(),
            e.value,
            e.date
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn date(y: i32, m: u32, d: u32) -> NaiveDate {
        NaiveDate::from_ymd_opt(y, m, d).unwrap()
    }

    #[test]
    fn zero_gap_case() {
        let p = TaylorRuleParams::with_default_coefficients(2.0, 2.0, 2.0, 3.0, 3.0);
        assert_eq!(taylor_rate(&p).unwrap(), 4.0);
    }

    #[test]
    fn hand_evaluation() {
        let p = TaylorRuleParams::with_default_coefficients(4.0, 2.0, 2.0, 3.0, 3.0);
        assert_eq!(taylor_rate(&p).unwrap(), 7.0);
    }

    #[test]
    fn non_positive_coefficient_rejected() {
        let mut p = TaylorRuleParams::with_default_coefficients(2.0, 2.0, 2.0, 3.0, 3.0);
        p.a_pi = 0.0;
        assert!(matches!(
            taylor_rate(&p),
            Err(IndicatorError::NonPositiveCoefficient { .. })
        ));
    }

    #[test]
    fn finite_difference_slopes() {
        let base = TaylorRuleParams {
            pi_t: 2.3,
            pi_star: 2.0,
            r_star: 1.7,
            y_t: 2.9,
            y_bar: 2.1,
            a_pi: 0.5,
            a_y: 0.5,
        };
        let h = 0.5;
        let mut dp = base;
        dp.pi_t += h;
        let slope_pi = (taylor_rate(&dp).unwrap() - taylor_rate(&base).unwrap()) / h;
        assert!((slope_pi - (1.0 + base.a_pi)).abs() < 1e-9);
        let mut dy = base;
        dy.y_t += h;
        let slope_y = (taylor_rate(&dy).unwrap() - taylor_rate(&base).unwrap()) / h;
        assert!((slope_y - base.a_y).abs() < 1e-9);
    }

    fn unemployment_series() -> IndicatorSeries {
        IndicatorSeries::new(
            IndicatorName::Unemployment,
            vec![
                (date(2009, 1, 1), 7.8),
                (date(2010, 6, 1), 9.5),
                (date(2011, 6, 1), 9.1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn single_observation_is_the_extreme() {
        let s = IndicatorSeries::new(IndicatorName::Inflation, vec![(date(2009, 7, 1), -2.1)])
            .unwrap();
        let out = extreme_summary(&[s], date(2009, 1, 1), date(2009, 12, 31)).unwrap();
        assert_eq!(out[0].value, -2.1);
        assert_eq!(out[0].kind, ExtremeKind::Min);
    }

    #[test]
    fn unemployment_uses_maximum() {
        let out =
            extreme_summary(&[unemployment_series()], date(2008, 1, 1), date(2012, 1, 1)).unwrap();
        assert_eq!(out[0].value, 9.5);
        assert_eq!(out[0].date, date(2010, 6, 1));
    }

    #[test]
    fn interest_rate_uses_minimum() {
        let s = IndicatorSeries::new(
            IndicatorName::InterestRate,
            vec![
                (date(2020, 1, 1), 1.55),
                (date(2020, 4, 1), 0.05),
                (date(2020, 7, 1), 0.09),
            ],
        )
        .unwrap();
        let out = extreme_summary(&[s], date(2020, 1, 1), date(2020, 12, 31)).unwrap();
        assert_eq!(out[0].value, 0.05);
    }

    #[test]
    fn empty_window_is_an_error() {
        let out = extreme_summary(&[unemployment_series()], date(2000, 1, 1), date(2001, 1, 1));
        assert!(matches!(out, Err(IndicatorError::EmptyWindow(_))));
    }

    #[test]
    fn full_range_equals_brute_force() {
        let s = unemployment_series();
        let brute = s
            .observations
            .iter()
            .map(|&(_, v)| v)
            .fold(f64::NEG_INFINITY, f64::max);
        let out = extreme_summary(
            &[s.clone()],
            date(1900, 1, 1),
            date(2100, 1, 1),
        )
        .unwrap();
        assert_eq!(out[0].value, brute);
    }

    #[test]
    fn window_monotonicity() {
        let s = unemployment_series();
        let wide = extreme_summary(&[s.clone()], date(2009, 1, 1), date(2011, 12, 31)).unwrap();
        let narrow = extreme_summary(&[s], date(2009, 1, 1), date(2009, 12, 31)).unwrap();
        assert!(narrow[0].value <= wide[0].value);
    }

    #[test]
    fn non_increasing_dates_rejected() {
        let r = IndicatorSeries::new(
            IndicatorName::Inflation,
            vec![(date(2009, 1, 1), 1.0), (date(2009, 1, 1), 2.0)],
        );
        assert!(matches!(r, Err(IndicatorError::NonIncreasingDates(_))));
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("u.csv");
        std::fs::write(&p, "date,value\n2010-06-01,9.5\n2011-06-01,9.1\n").unwrap();
        let s = IndicatorSeries::from_csv(IndicatorName::Unemployment, &p).unwrap();
        assert_eq!(s.observations.len(), 2);
        assert_eq!(s.observations[0], (date(2010, 6, 1), 9.5));
    }
}
