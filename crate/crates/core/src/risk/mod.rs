//! Post-migration risk annotation: the minimum price ratio inside a window
//! after migration, a deterministic manipulation score, and the three-level
//! rule combining the two.

mod score;

pub use score::{heuristic_manipulation_score, ScoreSignals};

use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;
use thiserror::Error;

/// Seconds covered by a post-migration series.
pub const POST_SERIES_LEN: usize = 3600;

#[derive(Debug, Error, PartialEq)]
pub enum RiskError {
    #[error("empty annotation window")]
    EmptyWindow,
    #[error("series has {len} buckets, window needs {needed}")]
    ShortSeries { len: usize, needed: usize },
    #[error("migration price must be positive")]
    BadMigrationPrice,
    #[error("post series must have {POST_SERIES_LEN} buckets, got {0}")]
    BadLength(usize),
    #[error("non-positive price at second {0}")]
    BadPrice(usize),
    #[error("invalid thresholds: {0}")]
    BadThresholds(String),
}

/// One second of post-migration trading. Volumes are base units.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PostBucket {
    pub price: f64,
    pub buy_volume: f64,
    pub sell_volume: f64,
    pub tx_count: u32,
    pub net_flow: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PostSeries {
    buckets: Vec<PostBucket>,
}

impl PostSeries {
    pub fn new(buckets: Vec<PostBucket>) -> Result<Self, RiskError> {
        if buckets.len() != POST_SERIES_LEN {
            return Err(RiskError::BadLength(buckets.len()));
        }
        if let Some(i) = buckets.iter().position(|b| !(b.price > 0.0) || !b.price.is_finite()) {
            return Err(RiskError::BadPrice(i));
        }
        Ok(PostSeries { buckets })
    }

    /// Flat series at `price` with no trading.
    pub fn flat(price: f64) -> Self {
        PostSeries::new(vec![PostBucket { price, ..PostBucket::default() }; POST_SERIES_LEN])
            .expect("flat series with positive price")
    }

    pub fn from_prices(prices: &[f64]) -> Result<Self, RiskError> {
        PostSeries::new(prices.iter().map(|&price| PostBucket { price, ..PostBucket::default() }).collect())
    }

    pub fn buckets(&self) -> &[PostBucket] {
        &self.buckets
    }

    pub fn prices(&self) -> Vec<f64> {
        self.buckets.iter().map(|b| b.price).collect()
    }

    pub fn scaled(&self, factor: f64) -> PostSeries {
        PostSeries { buckets: self.buckets.iter().map(|b| PostBucket { price: b.price * factor, ..*b }).collect() }
    }
}

/// Lowest price in the first `window_minutes` over the migration price,
/// capped at 1.
pub fn min_price_ratio(series: &PostSeries, migration_price: f64, window_minutes: u32) -> Result<f64, RiskError> {
    if !(migration_price > 0.0) {
        return Err(RiskError::BadMigrationPrice);
    }
    let needed = window_minutes as usize * 60;
    if needed == 0 {
        return Err(RiskError::EmptyWindow);
    }
    if series.buckets.len() < needed {
        return Err(RiskError::ShortSeries { len: series.buckets.len(), needed });
    }
    let low = series.buckets[..needed].iter().map(|b| b.price).fold(f64::INFINITY, f64::min);
    Ok((low / migration_price).min(1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RiskLevel {
    Low,
    Medium,
    High,
}

impl RiskLevel {
    pub const ALL: [RiskLevel; 3] = [RiskLevel::High, RiskLevel::Medium, RiskLevel::Low];

    pub fn as_str(&self) -> &'static str {
        match self {
            RiskLevel::Low => "low",
            RiskLevel::Medium => "medium",
            RiskLevel::High => "high",
        }
    }
}

impl fmt::Display for RiskLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RiskLevel {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "low" => Ok(RiskLevel::Low),
            "medium" => Ok(RiskLevel::Medium),
            "high" => Ok(RiskLevel::High),
            other => Err(format!("unknown risk level `{other}`")),
        }
    }
}

/// Annotation rule cut-offs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Thresholds {
    /// high if ratio is below this
    pub collapse_ratio: f64,
    /// high if score is at least this
    pub manipulated_score: f64,
    /// low needs ratio at least this
    pub stable_ratio: f64,
    /// low needs score below this
    pub clean_score: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds { collapse_ratio: 0.3, manipulated_score: 0.7, stable_ratio: 0.7, clean_score: 0.3 }
    }
}

impl FromStr for Thresholds {
    type Err = RiskError;

    /// `collapse_ratio,manipulated_score,stable_ratio,clean_score`
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<f64> = s
            .split(',')
            .map(|p| p.trim().parse::<f64>())
            .collect::<Result<_, _>>()
            .map_err(|e| RiskError::BadThresholds(e.to_string()))?;
        let [collapse_ratio, manipulated_score, stable_ratio, clean_score] = parts[..] else {
            return Err(RiskError::BadThresholds(format!("expected 4 values, got {}", parts.len())));
        };
        Ok(Thresholds { collapse_ratio, manipulated_score, stable_ratio, clean_score })
    }
}

pub fn label(min_price_ratio: f64, pred_score: f64, t: &Thresholds) -> RiskLevel {
    if min_price_ratio < t.collapse_ratio || pred_score >= t.manipulated_score {
        RiskLevel::High
    } else if min_price_ratio >= t.stable_ratio && pred_score < t.clean_score {
        RiskLevel::Low
    } else {
        RiskLevel::Medium
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RiskLabel {
    pub mint: String,
    pub min_price_ratio: f64,
    pub pred_score: f64,
    pub risk_level: RiskLevel,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnnotateConfig {
    pub window_minutes: u32,
    pub thresholds: Thresholds,
}

impl Default for AnnotateConfig {
    fn default() -> Self {
        AnnotateConfig { window_minutes: 20, thresholds: Thresholds::default() }
    }
}

/// Inputs for one mint. `external_score` (e.g. from a trained detector)
/// replaces the heuristic score when present.
#[derive(Debug, Clone)]
pub struct AnnotationInput {
    pub mint: String,
    pub migration_price: f64,
    pub series: Option<PostSeries>,
    pub external_score: Option<f64>,
}

pub fn annotate(input: &AnnotationInput, series: &PostSeries, cfg: &AnnotateConfig) -> Result<RiskLabel, RiskError> {
    let ratio = min_price_ratio(series, input.migration_price, cfg.window_minutes)?;
    let score = match input.external_score {
        Some(s) => s.clamp(0.0, 1.0),
        None => heuristic_manipulation_score(series),
    };
    Ok(RiskLabel {
        mint: input.mint.clone(),
        min_price_ratio: ratio,
        pred_score: score,
        risk_level: label(ratio, score, &cfg.thresholds),
    })
}

/// Lower edges of the ratio histogram; the final bin holds ratio == 1.
pub const RATIO_BIN_EDGES: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];
pub const RATIO_BIN_LABELS: [&str; 6] = ["[0.0,0.2)", "[0.2,0.4)", "[0.4,0.6)", "[0.6,0.8)", "[0.8,1.0)", "[1.0,1.0]"];

pub fn ratio_bin(ratio: f64) -> usize {
    RATIO_BIN_EDGES.iter().filter(|e| ratio >= **e).count()
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnnotationReport {
    pub labels: Vec<RiskLabel>,
    pub ratio_histogram: [usize; 6],
    pub skipped: Vec<String>,
}

impl AnnotationReport {
    pub fn level_count(&self, level: RiskLevel) -> usize {
        self.labels.iter().filter(|l| l.risk_level == level).count()
    }

    pub fn level_share(&self, level: RiskLevel) -> f64 {
        if self.labels.is_empty() {
            0.0
        } else {
            self.level_count(level) as f64 / self.labels.len() as f64
        }
    }
}

/// Label every mint; mints without a usable series are skipped with a
/// warning.
pub fn annotate_corpus(inputs: &[AnnotationInput], cfg: &AnnotateConfig) -> AnnotationReport {
    use rayon::prelude::*;
    let results: Vec<Result<RiskLabel, (String, String)>> = inputs
        .par_iter()
        .map(|input| match &input.series {
            None => Err((input.mint.clone(), "missing post-migration series".to_string())),
            Some(s) => annotate(input, s, cfg).map_err(|e| (input.mint.clone(), e.to_string())),
        })
        .collect();
    let mut report = AnnotationReport::default();
    for r in results {
        match r {
            Ok(label) => {
                report.ratio_histogram[ratio_bin(label.min_price_ratio)] += 1;
                report.labels.push(label);
            }
            Err((mint, reason)) => {
                log::warn!("skipping {mint}: {reason}");
                report.skipped.push(mint);
            }
        }
    }
    report
}
