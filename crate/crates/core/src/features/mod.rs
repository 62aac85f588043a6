//! Per-launch features computed from pre-migration events only.

mod schema;
mod series;

pub use schema::{column_index, ColumnSpec, FeatureGroup, COLUMNS, SCHEMA_VERSION};
pub use series::{build_timeseries, Bucket, TimeSeries};

use crate::bundle::{membership, Bundle, BundleTrace, IdentifierKind};
use crate::parser::{classify_tx, EventKind, ParsedEvent};
use chrono::{DateTime, Datelike, Timelike};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("launch {0} has no pre-migration events")]
    NoEvents(String),
    #[error("launch {mint}: migration at {migrate_ts} does not follow creation at {create_ts}")]
    BadTimeSpan { mint: String, create_ts: i64, migrate_ts: i64 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LaunchInfo {
    pub mint: String,
    pub creator: String,
    pub create_ts: i64,
    pub migrate_ts: i64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FeatureConfig {
    pub sniper_window_s: i64,
    pub bucket_seconds: i64,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { sniper_window_s: 5, bucket_seconds: 10 }
    }
}

/// USD price observations of the base asset, sorted by time.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SolPriceFeed {
    points: Vec<(i64, f64)>,
}

impl SolPriceFeed {
    pub fn new(mut points: Vec<(i64, f64)>) -> Self {
        points.sort_by_key(|p| p.0);
        SolPriceFeed { points }
    }

    pub fn points(&self) -> &[(i64, f64)] {
        &self.points
    }

    /// Last observation at or before `ts`.
    pub fn at(&self, ts: i64) -> Option<f64> {
        let idx = self.points.partition_point(|p| p.0 <= ts);
        (idx > 0).then(|| self.points[idx - 1].1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Contextual {
    pub sol_price: Option<f64>,
    pub migrate_weekday: u32,
    pub migrate_hour: u32,
    pub migrate_month: u32,
}

/// Calendar fields are UTC; weekday counts from Monday = 0.
pub fn contextual_features(migrate_ts: i64, feed: &SolPriceFeed) -> Contextual {
    let dt = DateTime::from_timestamp(migrate_ts, 0).unwrap_or_default();
    let sol_price = feed.at(migrate_ts);
    if sol_price.is_none() {
        log::warn!("no base-asset price at or before {migrate_ts}");
    }
    Contextual {
        sol_price,
        migrate_weekday: dt.weekday().num_days_from_monday(),
        migrate_hour: dt.hour(),
        migrate_month: dt.month(),
    }
}

/// Token balance per account after applying every event in order.
pub fn replay_holdings(events: &[ParsedEvent]) -> BTreeMap<String, i64> {
    let mut bal: BTreeMap<String, i64> = BTreeMap::new();
    for e in events {
        *bal.entry(e.actor.clone()).or_default() += e.net_token_delta;
        if let (EventKind::Transfer, Some(to)) = (e.kind, &e.counterparty) {
            *bal.entry(to.clone()).or_default() += e.token_amount as i64;
        }
    }
    bal
}

/// Gini coefficient of non-negative amounts (zero entries included).
pub fn gini(values: &[f64]) -> f64 {
    let n = values.len();
    let total: f64 = values.iter().sum();
    if n == 0 || total <= 0.0 {
        return 0.0;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.total_cmp(b));
    let weighted: f64 = sorted.iter().enumerate().map(|(i, x)| (2.0 * (i as f64 + 1.0) - n as f64 - 1.0) * x).sum();
    weighted / (n as f64 * total)
}

fn top_share(sorted_desc: &[u64], n: usize, circulating: u64) -> f64 {
    if circulating == 0 {
        return 0.0;
    }
    sorted_desc.iter().take(n).sum::<u64>() as f64 / circulating as f64
}

/// Distinct buyers in order of their first purchase.
fn buyers_in_order(events: &[ParsedEvent]) -> Vec<&str> {
    let mut seen = BTreeSet::new();
    events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Buy | EventKind::CreateAndBuy))
        .filter(|e| seen.insert(e.actor.as_str()))
        .map(|e| e.actor.as_str())
        .collect()
}

/// Positive balances keyed by holder.
fn positive(holdings: &BTreeMap<String, i64>) -> BTreeMap<&str, u64> {
    holdings.iter().filter(|(_, v)| **v > 0).map(|(k, v)| (k.as_str(), *v as u64)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Holding {
    pub dev_hold_pct: f64,
    pub sniper_hold_pct: f64,
    pub sniper_num: usize,
    pub top1_hold_pct: f64,
    pub top5_hold_pct: f64,
    pub top10_hold_pct: f64,
    pub top20_hold_pct: f64,
    pub early_top5_hold_pct: f64,
    pub early_top10_hold_pct: f64,
    pub early_top20_hold_pct: f64,
    pub gini_holdings: f64,
    pub median_holder_pct: f64,
}

/// Concentration of the holdings at migration. The denominator is the
/// circulating supply (everything sold off the curve).
pub fn holding_features(events: &[ParsedEvent], dev: &str, create_ts: i64, sniper_window_s: i64) -> Holding {
    let holdings = replay_holdings(events);
    let pos = positive(&holdings);
    let circ: u64 = pos.values().sum();
    let share = |amount: u64| if circ == 0 { 0.0 } else { amount as f64 / circ as f64 };

    let mut sorted: Vec<u64> = pos.values().copied().collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));

    let mut first_buy: BTreeMap<&str, i64> = BTreeMap::new();
    for e in events.iter().filter(|e| matches!(e.kind, EventKind::Buy | EventKind::CreateAndBuy)) {
        first_buy.entry(e.actor.as_str()).or_insert(e.timestamp);
    }
    let snipers: Vec<&str> =
        first_buy.iter().filter(|(a, t)| **a != dev && **t - create_ts <= sniper_window_s).map(|(a, _)| *a).collect();
    let held = |a: &str| pos.get(a).copied().unwrap_or(0);

    let order = buyers_in_order(events);
    let early = |n: usize| share(order.iter().take(n).map(|a| held(a)).sum());
    let median = if sorted.is_empty() {
        0.0
    } else {
        let mut asc = sorted.clone();
        asc.reverse();
        let m = asc.len();
        let mid = if m % 2 == 1 { asc[m / 2] as f64 } else { (asc[m / 2 - 1] + asc[m / 2]) as f64 / 2.0 };
        if circ == 0 {
            0.0
        } else {
            mid / circ as f64
        }
    };

    Holding {
        dev_hold_pct: share(held(dev)),
        sniper_hold_pct: share(snipers.iter().map(|a| held(a)).sum()),
        sniper_num: snipers.len(),
        top1_hold_pct: top_share(&sorted, 1, circ),
        top5_hold_pct: top_share(&sorted, 5, circ),
        top10_hold_pct: top_share(&sorted, 10, circ),
        top20_hold_pct: top_share(&sorted, 20, circ),
        early_top5_hold_pct: early(5),
        early_top10_hold_pct: early(10),
        early_top20_hold_pct: early(20),
        gini_holdings: gini(&sorted.iter().map(|v| *v as f64).collect::<Vec<_>>()),
        median_holder_pct: median,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Activity {
    pub tx_num: usize,
    pub time_span: i64,
    pub trader_num: usize,
    pub holder_num: usize,
    pub buy_num: usize,
    pub sell_num: usize,
    pub wash_num: usize,
    pub transfer_num: usize,
    pub mint_num: usize,
    pub unknown_num: usize,
    pub avg_buy_volume: f64,
    pub avg_sell_volume: f64,
    pub buy_base_volume: f64,
    pub sell_base_volume: f64,
    pub unique_funder_num: usize,
}

impl Activity {
    pub fn wash_share(&self) -> f64 {
        if self.tx_num == 0 {
            0.0
        } else {
            self.wash_num as f64 / self.tx_num as f64
        }
    }

    pub fn sell_buy_ratio(&self) -> f64 {
        if self.buy_num == 0 {
            0.0
        } else {
            self.sell_num as f64 / self.buy_num as f64
        }
    }

    pub fn buys_per_minute(&self) -> f64 {
        if self.time_span <= 0 {
            0.0
        } else {
            self.buy_num as f64 * 60.0 / self.time_span as f64
        }
    }
}

/// Transaction counts are per transaction class (see
/// [`classify_tx`]), so `tx_num` is the sum of the class counts. Volumes are
/// per event.
pub fn activity_features(
    events: &[ParsedEvent],
    create_ts: i64,
    migrate_ts: i64,
    traces: &[BundleTrace],
    mint: &str,
) -> Result<Activity, FeatureError> {
    if events.is_empty() {
        return Err(FeatureError::NoEvents(mint.to_string()));
    }
    if migrate_ts <= create_ts {
        return Err(FeatureError::BadTimeSpan { mint: mint.to_string(), create_ts, migrate_ts });
    }
    let mut by_tx: Vec<(&str, Vec<ParsedEvent>)> = Vec::new();
    let mut idx: HashMap<&str, usize> = HashMap::new();
    for e in events {
        let i = *idx.entry(e.tx_id.as_str()).or_insert_with(|| {
            by_tx.push((e.tx_id.as_str(), Vec::new()));
            by_tx.len() - 1
        });
        by_tx[i].1.push(e.clone());
    }
    let mut a = Activity { tx_num: by_tx.len(), time_span: migrate_ts - create_ts, ..Activity::default() };
    for (_, evs) in &by_tx {
        match classify_tx(evs) {
            EventKind::Buy => a.buy_num += 1,
            EventKind::Sell => a.sell_num += 1,
            EventKind::Wash => a.wash_num += 1,
            EventKind::Transfer => a.transfer_num += 1,
            EventKind::Create | EventKind::CreateAndBuy => a.mint_num += 1,
            EventKind::Unknown => a.unknown_num += 1,
        }
    }

    let buys: Vec<&ParsedEvent> = events.iter().filter(|e| e.kind == EventKind::Buy).collect();
    let sells: Vec<&ParsedEvent> = events.iter().filter(|e| e.kind == EventKind::Sell).collect();
    let mean = |v: &[&ParsedEvent]| {
        if v.is_empty() {
            0.0
        } else {
            v.iter().map(|e| e.token_amount as f64).sum::<f64>() / v.len() as f64
        }
    };
    a.avg_buy_volume = mean(&buys);
    a.avg_sell_volume = mean(&sells);
    a.buy_base_volume = events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Buy | EventKind::CreateAndBuy))
        .map(|e| e.base_amount as f64)
        .sum();
    a.sell_base_volume = sells.iter().map(|e| e.base_amount as f64).sum();

    let traders: BTreeSet<&str> = events
        .iter()
        .filter(|e| matches!(e.kind, EventKind::Buy | EventKind::CreateAndBuy | EventKind::Sell))
        .map(|e| e.actor.as_str())
        .collect();
    a.trader_num = traders.len();
    a.holder_num = positive(&replay_holdings(events)).len();
    a.unique_funder_num = traces
        .iter()
        .filter(|t| t.identifier_kind == IdentifierKind::Funder && traders.contains(t.account.as_str()))
        .map(|t| t.identifier.as_str())
        .collect::<BTreeSet<_>>()
        .len();
    Ok(a)
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BundleGroup {
    pub bundle_hold_pct: f64,
    pub bundle_num: usize,
    pub bundle_account_num: usize,
    pub max_bundle_size: usize,
    pub bundle_holder_ratio: f64,
    pub bundle_top1_hold_pct: f64,
    pub bundle_top10_hold_pct: f64,
    pub bundle_early_top10_hold_pct: f64,
    pub bundle_early_top20_hold_pct: f64,
    pub bundle_gini_holdings: f64,
}

/// Concentration with every bundle collapsed into one holder. Accounts not
/// in any bundle stay singletons.
pub fn bundle_features(events: &[ParsedEvent], bundles: &[Bundle]) -> BundleGroup {
    let holdings = replay_holdings(events);
    let pos = positive(&holdings);
    let circ: u64 = pos.values().sum();
    let member = membership(bundles);
    let entity = |a: &str| -> String {
        match member.get(a) {
            Some(id) => format!("\u{0}bundle:{id}"),
            None => a.to_string(),
        }
    };

    let mut entity_bal: BTreeMap<String, u64> = BTreeMap::new();
    for (a, v) in &pos {
        *entity_bal.entry(entity(a)).or_default() += v;
    }
    let mut sorted: Vec<u64> = entity_bal.values().copied().collect();
    sorted.sort_unstable_by(|a, b| b.cmp(a));

    let traders: BTreeSet<&str> = events.iter().filter(|e| e.kind.is_trade()).map(|e| e.actor.as_str()).collect();
    let active: Vec<&Bundle> =
        bundles.iter().filter(|b| b.accounts.iter().any(|a| traders.contains(a.as_str()))).collect();

    let bundled_bal: u64 = pos.iter().filter(|(a, _)| member.contains_key(*a)).map(|(_, v)| v).sum();
    let bundled_holders = pos.keys().filter(|a| member.contains_key(*a)).count();

    let mut seen = BTreeSet::new();
    let early_entities: Vec<String> =
        buyers_in_order(events).into_iter().map(entity).filter(|e| seen.insert(e.clone())).collect();
    let early = |n: usize| {
        if circ == 0 {
            0.0
        } else {
            early_entities.iter().take(n).map(|e| entity_bal.get(e).copied().unwrap_or(0)).sum::<u64>() as f64
                / circ as f64
        }
    };

    BundleGroup {
        bundle_hold_pct: if circ == 0 { 0.0 } else { bundled_bal as f64 / circ as f64 },
        bundle_num: active.len(),
        bundle_account_num: active
            .iter()
            .map(|b| b.accounts.iter().filter(|a| traders.contains(a.as_str())).count())
            .sum(),
        max_bundle_size: active.iter().map(|b| b.accounts.len()).max().unwrap_or(0),
        bundle_holder_ratio: if pos.is_empty() { 0.0 } else { bundled_holders as f64 / pos.len() as f64 },
        bundle_top1_hold_pct: top_share(&sorted, 1, circ),
        bundle_top10_hold_pct: top_share(&sorted, 10, circ),
        bundle_early_top10_hold_pct: early(10),
        bundle_early_top20_hold_pct: early(20),
        bundle_gini_holdings: gini(&sorted.iter().map(|v| *v as f64).collect::<Vec<_>>()),
    }
}

/// One feature-table row in [`COLUMNS`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureRow {
    pub mint: String,
    pub values: Vec<Option<f64>>,
    pub incomplete: bool,
}

impl FeatureRow {
    pub fn get(&self, name: &str) -> Option<f64> {
        column_index(name).and_then(|i| self.values.get(i).copied().flatten())
    }
}

pub fn assemble(
    mint: &str,
    ctx: &Contextual,
    hold: &Holding,
    act: &Activity,
    bundle: &BundleGroup,
    ts: &TimeSeries,
) -> FeatureRow {
    let weekend = u32::from(ctx.migrate_weekday >= 5);
    let values: Vec<Option<f64>> = COLUMNS
        .iter()
        .map(|c| match c.name {
            "sol_price" => ctx.sol_price,
            "migrate_weekday" => Some(ctx.migrate_weekday as f64),
            "migrate_hour" => Some(ctx.migrate_hour as f64),
            "migrate_month" => Some(ctx.migrate_month as f64),
            "migrate_is_weekend" => Some(weekend as f64),
            "dev_hold_pct" => Some(hold.dev_hold_pct),
            "sniper_hold_pct" => Some(hold.sniper_hold_pct),
            "sniper_num" => Some(hold.sniper_num as f64),
            "top1_hold_pct" => Some(hold.top1_hold_pct),
            "top5_hold_pct" => Some(hold.top5_hold_pct),
            "top10_hold_pct" => Some(hold.top10_hold_pct),
            "top20_hold_pct" => Some(hold.top20_hold_pct),
            "early_top5_hold_pct" => Some(hold.early_top5_hold_pct),
            "early_top10_hold_pct" => Some(hold.early_top10_hold_pct),
            "early_top20_hold_pct" => Some(hold.early_top20_hold_pct),
            "gini_holdings" => Some(hold.gini_holdings),
            "median_holder_pct" => Some(hold.median_holder_pct),
            "tx_num" => Some(act.tx_num as f64),
            "time_span" => Some(act.time_span as f64),
            "trader_num" => Some(act.trader_num as f64),
            "holder_num" => Some(act.holder_num as f64),
            "buy_num" => Some(act.buy_num as f64),
            "sell_num" => Some(act.sell_num as f64),
            "wash_num" => Some(act.wash_num as f64),
            "transfer_num" => Some(act.transfer_num as f64),
            "mint_num" => Some(act.mint_num as f64),
            "unknown_num" => Some(act.unknown_num as f64),
            "avg_buy_volume" => Some(act.avg_buy_volume),
            "avg_sell_volume" => Some(act.avg_sell_volume),
            "buy_base_volume" => Some(act.buy_base_volume),
            "sell_base_volume" => Some(act.sell_base_volume),
            "unique_funder_num" => Some(act.unique_funder_num as f64),
            "wash_share" => Some(act.wash_share()),
            "sell_buy_ratio" => Some(act.sell_buy_ratio()),
            "buys_per_minute" => Some(act.buys_per_minute()),
            "bundle_hold_pct" => Some(bundle.bundle_hold_pct),
            "bundle_num" => Some(bundle.bundle_num as f64),
            "bundle_account_num" => Some(bundle.bundle_account_num as f64),
            "max_bundle_size" => Some(bundle.max_bundle_size as f64),
            "bundle_holder_ratio" => Some(bundle.bundle_holder_ratio),
            "bundle_top1_hold_pct" => Some(bundle.bundle_top1_hold_pct),
            "bundle_top10_hold_pct" => Some(bundle.bundle_top10_hold_pct),
            "bundle_early_top10_hold_pct" => Some(bundle.bundle_early_top10_hold_pct),
            "bundle_early_top20_hold_pct" => Some(bundle.bundle_early_top20_hold_pct),
            "bundle_gini_holdings" => Some(bundle.bundle_gini_holdings),
            "ts_bucket_num" => Some(ts.buckets.len() as f64),
            "ts_price_change" => ts.price_change(),
            "ts_first_minute_buy_share" => ts.first_minute_buy_share(),
            other => unreachable!("column {other} has no source"),
        })
        .collect();
    let incomplete = values.iter().any(Option::is_none);
    FeatureRow { mint: mint.to_string(), values, incomplete }
}

/// Full feature row plus pre-migration series for one launch. Events after
/// `migrate_ts` are ignored.
pub fn compute_launch(
    info: &LaunchInfo,
    events: &[ParsedEvent],
    bundles: &[Bundle],
    traces: &[BundleTrace],
    feed: &SolPriceFeed,
    cfg: &FeatureConfig,
) -> Result<(FeatureRow, TimeSeries), FeatureError> {
    let pre: Vec<ParsedEvent> = events.iter().filter(|e| e.timestamp <= info.migrate_ts).cloned().collect();
    let act = activity_features(&pre, info.create_ts, info.migrate_ts, traces, &info.mint)?;
    let ctx = contextual_features(info.migrate_ts, feed);
    let hold = holding_features(&pre, &info.creator, info.create_ts, cfg.sniper_window_s);
    let bundle = bundle_features(&pre, bundles);
    let ts = build_timeseries(&pre, info.create_ts, info.migrate_ts, cfg.bucket_seconds);
    Ok((assemble(&info.mint, &ctx, &hold, &act, &bundle, &ts), ts))
}
