//! Per-ticker return features and the two-era feature views built from them.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{scale_unit_variance, ColumnStats, Matrix};

/// Minimum observations for the moment features.
pub const MIN_OBSERVATIONS: usize = 3;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReturnSeries {
    pub ticker: String,
    /// Log returns in time order.
    pub returns: Vec<f64>,
    pub volumes: Option<Vec<f64>>,
}

impl ReturnSeries {
    pub fn new(ticker: impl Into<String>, returns: Vec<f64>) -> Self {
        ReturnSeries { ticker: ticker.into(), returns, volumes: None }
    }

    pub fn with_volumes(mut self, volumes: Vec<f64>) -> Self {
        self.volumes = Some(volumes);
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FeatureKind {
    Mean,
    Volatility,
    Skewness,
    Kurtosis,
    Beta,
    Volume,
}

impl FeatureKind {
    pub const ALL: [FeatureKind; 6] = [
        FeatureKind::Mean,
        FeatureKind::Volatility,
        FeatureKind::Skewness,
        FeatureKind::Kurtosis,
        FeatureKind::Beta,
        FeatureKind::Volume,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FeatureKind::Mean => "mean",
            FeatureKind::Volatility => "volatility",
            FeatureKind::Skewness => "skewness",
            FeatureKind::Kurtosis => "kurtosis",
            FeatureKind::Beta => "beta",
            FeatureKind::Volume => "volume",
        }
    }
}

impl fmt::Display for FeatureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for FeatureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        FeatureKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s) || (s.eq_ignore_ascii_case("std") && *k == FeatureKind::Volatility))
            .ok_or_else(|| Error::InvalidParameter(alloc::format!("unknown feature {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureRow {
    pub ticker: String,
    pub kinds: Vec<FeatureKind>,
    pub values: Vec<f64>,
}

impl FeatureRow {
    pub fn get(&self, kind: FeatureKind) -> Option<f64> {
        self.kinds.iter().position(|&k| k == kind).map(|i| self.values[i])
    }
}

/// `ln(p[t] / p[t-1])` for consecutive prices.
pub fn log_returns(prices: &[f64]) -> Result<Vec<f64>> {
    if prices.iter().any(|p| !(p.is_finite() && *p > 0.0)) {
        return Err(Error::InvalidParameter("prices must be finite and positive".into()));
    }
    Ok(prices.windows(2).map(|w| libm::log(w[1] / w[0])).collect())
}

struct Moments {
    mean: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

fn moments(r: &[f64]) -> Moments {
    let n = r.len() as f64;
    let mean = r.iter().sum::<f64>() / n;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &v in r {
        let d = v - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    Moments { mean, m2: m2 / n, m3: m3 / n, m4: m4 / n }
}

/// Population beta of `r` against `index`. Identical inputs give exactly 1.
fn beta(r: &[f64], index: &[f64]) -> Option<f64> {
    let n = r.len() as f64;
    let mr = r.iter().sum::<f64>() / n;
    let mi = index.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut var = 0.0;
    for (&a, &b) in r.iter().zip(index) {
        let di = b - mi;
        cov += (a - mr) * di;
        var += di * di;
    }
    (var > 0.0).then(|| cov / var)
}

/// Computes the requested features for one ticker.
///
/// Moments are population moments; kurtosis is raw (`m4 / m2²`, not excess).
/// Fails when a requested feature is undefined for this series.
pub fn compute_features(series: &ReturnSeries, index: &ReturnSeries, kinds: &[FeatureKind]) -> Result<FeatureRow> {
    let r = &series.returns;
    if kinds.is_empty() {
        return Err(Error::Empty("feature list"));
    }
    if r.len() < MIN_OBSERVATIONS {
        return Err(Error::InsufficientData(alloc::format!(
            "{}: {} observations, need {MIN_OBSERVATIONS}",
            series.ticker,
            r.len()
        )));
    }
    if !r.iter().all(|v| v.is_finite()) {
        return Err(Error::NonFinite);
    }
    let mo = moments(r);
    let mut values = Vec::with_capacity(kinds.len());
    for &kind in kinds {
        let v = match kind {
            FeatureKind::Mean => mo.mean,
            FeatureKind::Volatility => libm::sqrt(mo.m2),
            FeatureKind::Skewness | FeatureKind::Kurtosis => {
                if mo.m2 <= 0.0 {
                    return Err(Error::InsufficientData(alloc::format!(
                        "{}: zero return variance, {kind} undefined",
                        series.ticker
                    )));
                }
                if kind == FeatureKind::Skewness {
                    mo.m3 / (mo.m2 * libm::sqrt(mo.m2))
                } else {
                    mo.m4 / (mo.m2 * mo.m2)
                }
            }
            FeatureKind::Beta => {
                if index.returns.len() != r.len() {
                    return Err(Error::mismatch("index length", r.len(), index.returns.len()));
                }
                if !index.returns.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite);
                }
                beta(r, &index.returns).ok_or_else(|| {
                    Error::InsufficientData(alloc::format!("{}: zero index variance, beta undefined", series.ticker))
                })?
            }
            FeatureKind::Volume => {
                let vols = series.volumes.as_ref().ok_or_else(|| {
                    Error::InsufficientData(alloc::format!("{}: no volumes supplied", series.ticker))
                })?;
                if vols.len() != r.len() {
                    return Err(Error::mismatch("volume length", r.len(), vols.len()));
                }
                if !vols.iter().all(|v| v.is_finite()) {
                    return Err(Error::NonFinite);
                }
                vols.iter().sum()
            }
        };
        values.push(v);
    }
    Ok(FeatureRow { ticker: series.ticker.clone(), kinds: kinds.to_vec(), values })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Exclusion {
    pub ticker: String,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureViews {
    /// Row keys, sorted.
    pub tickers: Vec<String>,
    pub kinds: Vec<FeatureKind>,
    /// Pre-era features before scaling.
    pub x_raw: Matrix,
    pub y_raw: Matrix,
    /// Unit-variance columns.
    pub x: Matrix,
    pub y: Matrix,
    pub x_stats: ColumnStats,
    pub y_stats: ColumnStats,
    pub excluded: Vec<Exclusion>,
}

fn by_ticker<'a>(set: &'a [ReturnSeries], era: &str) -> Result<BTreeMap<&'a str, &'a ReturnSeries>> {
    let mut map = BTreeMap::new();
    for s in set {
        if map.insert(s.ticker.as_str(), s).is_some() {
            return Err(Error::InvalidParameter(alloc::format!("duplicate ticker {} in {era} era", s.ticker)));
        }
    }
    Ok(map)
}

/// Pre-era features as `X`, post-era as `Y`, each scaled to unit variance.
///
/// Tickers missing from either era, or whose features are undefined in
/// either era, are excluded and listed with a reason.
pub fn build_feature_views(
    pre: &[ReturnSeries],
    post: &[ReturnSeries],
    index_pre: &ReturnSeries,
    index_post: &ReturnSeries,
    kinds: &[FeatureKind],
) -> Result<FeatureViews> {
    if kinds.is_empty() {
        return Err(Error::Empty("feature list"));
    }
    let pre_map = by_ticker(pre, "pre")?;
    let post_map = by_ticker(post, "post")?;
    let mut excluded = Vec::new();
    for t in pre_map.keys().filter(|t| !post_map.contains_key(*t)) {
        excluded.push(Exclusion { ticker: (*t).into(), reason: "missing from post era".into() });
    }
    for t in post_map.keys().filter(|t| !pre_map.contains_key(*t)) {
        excluded.push(Exclusion { ticker: (*t).into(), reason: "missing from pre era".into() });
    }
    let mut tickers = Vec::new();
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (t, s_pre) in &pre_map {
        let Some(s_post) = post_map.get(t) else { continue };
        let rows = compute_features(s_pre, index_pre, kinds)
            .and_then(|a| compute_features(s_post, index_post, kinds).map(|b| (a, b)));
        match rows {
            Ok((a, b)) => {
                tickers.push(String::from(*t));
                xs.push(a.values);
                ys.push(b.values);
            }
            Err(e) => excluded.push(Exclusion { ticker: (*t).into(), reason: alloc::format!("{e}") }),
        }
    }
    if tickers.is_empty() {
        return Err(Error::Empty("no tickers with features in both eras"));
    }
    excluded.sort_by(|a, b| a.ticker.cmp(&b.ticker));
    let x_raw = Matrix::from_rows(&xs)?;
    let y_raw = Matrix::from_rows(&ys)?;
    let (x, x_stats) = scale_unit_variance(&x_raw)?;
    let (y, y_stats) = scale_unit_variance(&y_raw)?;
    Ok(FeatureViews { tickers, kinds: kinds.to_vec(), x_raw, y_raw, x, y, x_stats, y_stats, excluded })
}
