use super::{read_records, write_records, CsvRecord, IoError, Result};
use crate::bundle::BundleTrace;
use crate::features::{FeatureRow, TimeSeries, COLUMNS};
use crate::parser::{EventKind, ParsedEvent};
use crate::risk::{PostBucket, PostSeries, RiskLabel, RiskLevel};
use crate::sim::Profile;
use serde::{Deserialize, Serialize};
use std::path::Path;

macro_rules! csv_record {
    ($ty:ty, [$($col:literal),* $(,)?]) => {
        impl CsvRecord for $ty {
            const HEADER: &'static [&'static str] = &[$($col),*];
        }
    };
}

/// One row of `token_launch.csv`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LaunchRecord {
    pub mint: String,
    pub name: String,
    pub symbol: String,
    pub uri: String,
    pub creator: String,
    pub create_ts: i64,
    pub migrate_ts: i64,
    pub amm_address: String,
}
csv_record!(LaunchRecord, ["mint", "name", "symbol", "uri", "creator", "create_ts", "migrate_ts", "amm_address"]);

/// Pool state at migration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MigrationRecord {
    pub mint: String,
    pub migrate_ts: i64,
    pub token_reserve: u64,
    pub base_reserve: u64,
    pub migration_price: f64,
}
csv_record!(MigrationRecord, ["mint", "migrate_ts", "token_reserve", "base_reserve", "migration_price"]);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestRow {
    pub mint: String,
    pub profile: Profile,
    pub true_level: RiskLevel,
}
csv_record!(ManifestRow, ["mint", "profile", "true_level"]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolPriceRow {
    pub ts: i64,
    pub usd: f64,
}
csv_record!(SolPriceRow, ["ts", "usd"]);

csv_record!(BundleTrace, ["account", "identifier_kind", "identifier"]);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BundleRow {
    pub bundle_id: usize,
    pub account: String,
}
csv_record!(BundleRow, ["bundle_id", "account"]);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthBundleRow {
    pub mint: String,
    pub bundle: usize,
    pub account: String,
}
csv_record!(TruthBundleRow, ["mint", "bundle", "account"]);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthEventRow {
    pub tx_id: String,
    pub actor: String,
    pub kind: EventKind,
}
csv_record!(TruthEventRow, ["tx_id", "actor", "kind"]);

csv_record!(
    ParsedEvent,
    [
        "tx_id",
        "kind",
        "actor",
        "counterparty",
        "token_amount",
        "base_amount",
        "net_token_delta",
        "timestamp",
        "diagnostic"
    ]
);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BreakdownRow {
    pub kind: String,
    pub count: usize,
    pub percentage: String,
}
csv_record!(BreakdownRow, ["kind", "count", "percentage"]);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureManifestRow {
    pub name: String,
    pub group: u8,
    #[serde(rename = "type")]
    pub kind: String,
    pub unit: String,
}
csv_record!(FeatureManifestRow, ["name", "group", "type", "unit"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeriesRow {
    pub bucket: usize,
    pub start_ts: i64,
    pub open_price: f64,
    pub end_price: f64,
    pub avg_price: f64,
    pub buy_volume: f64,
    pub sell_volume: f64,
}
csv_record!(TimeSeriesRow, ["bucket", "start_ts", "open_price", "end_price", "avg_price", "buy_volume", "sell_volume"]);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PostRow {
    pub second: usize,
    pub price: f64,
    pub buy_volume: f64,
    pub sell_volume: f64,
    pub tx_count: u32,
    pub net_flow: f64,
}
csv_record!(PostRow, ["second", "price", "buy_volume", "sell_volume", "tx_count", "net_flow"]);

csv_record!(RiskLabel, ["mint", "min_price_ratio", "pred_score", "risk_level"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramRow {
    pub range: String,
    pub count: usize,
    pub percentage: f64,
}
csv_record!(HistogramRow, ["range", "count", "percentage"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevelRow {
    pub risk_level: RiskLevel,
    pub count: usize,
    pub share: f64,
}
csv_record!(LevelRow, ["risk_level", "count", "share"]);

/// Detector output consumed by the backtest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScoreRow {
    pub mint: String,
    pub normal_probability: f64,
}
csv_record!(ScoreRow, ["mint", "normal_probability"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BundleStatsRow {
    pub mint: String,
    /// `in_tx`, `funder`, `jito` or `all`.
    pub heuristic: String,
    pub bundle_num: usize,
    pub bundle_holder_ratio: Option<f64>,
    pub bundle_holding_pct: Option<f64>,
}
csv_record!(BundleStatsRow, ["mint", "heuristic", "bundle_num", "bundle_holder_ratio", "bundle_holding_pct"]);

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountRow {
    pub name: String,
    pub count: usize,
}
csv_record!(CountRow, ["name", "count"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestRow {
    pub strategy: String,
    pub k: usize,
    pub mean_loss: f64,
    pub precision: f64,
}
csv_record!(BacktestRow, ["strategy", "k", "mean_loss", "precision"]);

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionRow {
    pub panel: String,
    pub risk_level: RiskLevel,
    /// `ok`, or `absent` when the class has no values for the panel.
    pub status: String,
    pub n: usize,
    pub q1: Option<f64>,
    pub median: Option<f64>,
    pub q3: Option<f64>,
}
csv_record!(DistributionRow, ["panel", "risk_level", "status", "n", "q1", "median", "q3"]);

pub fn feature_manifest_rows() -> Vec<FeatureManifestRow> {
    COLUMNS
        .iter()
        .map(|c| FeatureManifestRow {
            name: c.name.to_string(),
            group: c.group.number(),
            kind: c.kind.to_string(),
            unit: c.unit.to_string(),
        })
        .collect()
}

fn feature_header() -> Vec<String> {
    std::iter::once("mint".to_string())
        .chain(COLUMNS.iter().map(|c| c.name.to_string()))
        .chain(std::iter::once("incomplete".to_string()))
        .collect()
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_features(path: &Path, rows: &[FeatureRow]) -> Result<()> {
    let body: Vec<Vec<String>> = rows
        .iter()
        .map(|r| {
            std::iter::once(r.mint.clone())
                .chain(r.values.iter().map(|v| fmt_opt(*v)))
                .chain(std::iter::once(u8::from(r.incomplete).to_string()))
                .collect()
        })
        .collect();
    super::write_table(path, &feature_header(), &body)
}

pub fn read_features(path: &Path) -> Result<Vec<FeatureRow>> {
    let (header, rows) = super::read_table(path)?;
    if header != feature_header() {
        return Err(IoError::schema(path, 2, "feature header does not match the schema"));
    }
    rows.into_iter()
        .map(|(line, fields)| {
            let bad = |msg: String| IoError::schema(path, line, msg);
            let n = COLUMNS.len();
            let values = fields[1..=n]
                .iter()
                .zip(COLUMNS)
                .map(|(f, c)| {
                    if f.is_empty() {
                        Ok(None)
                    } else {
                        f.parse::<f64>().map(Some).map_err(|_| bad(format!("{}: not a number: `{f}`", c.name)))
                    }
                })
                .collect::<Result<Vec<_>>>()?;
            let incomplete = match fields[n + 1].as_str() {
                "0" => false,
                "1" => true,
                other => return Err(bad(format!("incomplete: expected 0 or 1, got `{other}`"))),
            };
            Ok(FeatureRow { mint: fields[0].clone(), values, incomplete })
        })
        .collect()
}

pub fn write_timeseries(path: &Path, ts: &TimeSeries) -> Result<()> {
    let rows: Vec<TimeSeriesRow> = ts
        .buckets
        .iter()
        .enumerate()
        .map(|(i, b)| TimeSeriesRow {
            bucket: i,
            start_ts: ts.start_ts + i as i64 * ts.bucket_seconds,
            open_price: b.open_price,
            end_price: b.end_price,
            avg_price: b.avg_price,
            buy_volume: b.buy_volume,
            sell_volume: b.sell_volume,
        })
        .collect();
    write_records(path, &rows)
}

pub fn write_post(path: &Path, series: &PostSeries) -> Result<()> {
    let rows: Vec<PostRow> = series
        .buckets()
        .iter()
        .enumerate()
        .map(|(second, b)| PostRow {
            second,
            price: b.price,
            buy_volume: b.buy_volume,
            sell_volume: b.sell_volume,
            tx_count: b.tx_count,
            net_flow: b.net_flow,
        })
        .collect();
    write_records(path, &rows)
}

pub fn read_post(path: &Path) -> Result<PostSeries> {
    let rows: Vec<PostRow> = read_records(path)?;
    for (i, r) in rows.iter().enumerate() {
        if r.second != i {
            return Err(IoError::schema(path, i as u64 + 3, format!("expected second {i}, got {}", r.second)));
        }
    }
    let buckets = rows
        .iter()
        .map(|r| PostBucket {
            price: r.price,
            buy_volume: r.buy_volume,
            sell_volume: r.sell_volume,
            tx_count: r.tx_count,
            net_flow: r.net_flow,
        })
        .collect();
    PostSeries::new(buckets).map_err(|e| IoError::schema(path, rows.len() as u64 + 2, e.to_string()))
}
