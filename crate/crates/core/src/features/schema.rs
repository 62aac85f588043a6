/// Version stamped into every feature table and manifest.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FeatureGroup {
    Contextual,
    Holding,
    Activity,
    Bundle,
    TimeSeries,
}

impl FeatureGroup {
    /// Group number used in the manifest (1-5).
    pub fn number(&self) -> u8 {
        match self {
            FeatureGroup::Contextual => 1,
            FeatureGroup::Holding => 2,
            FeatureGroup::Activity => 3,
            FeatureGroup::Bundle => 4,
            FeatureGroup::TimeSeries => 5,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        [
            FeatureGroup::Contextual,
            FeatureGroup::Holding,
            FeatureGroup::Activity,
            FeatureGroup::Bundle,
            FeatureGroup::TimeSeries,
        ]
        .into_iter()
        .find(|g| g.number() == n)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ColumnSpec {
    pub name: &'static str,
    pub group: FeatureGroup,
    /// `int` or `float`
    pub kind: &'static str,
    pub unit: &'static str,
}

const fn col(name: &'static str, group: FeatureGroup, kind: &'static str, unit: &'static str) -> ColumnSpec {
    ColumnSpec { name, group, kind, unit }
}

use FeatureGroup::*;

/// Column order of the feature table (after the leading `mint` column).
pub const COLUMNS: &[ColumnSpec] = &[
    col("sol_price", Contextual, "float", "usd"),
    col("migrate_weekday", Contextual, "int", "weekday_mon0"),
    col("migrate_hour", Contextual, "int", "hour_utc"),
    col("migrate_month", Contextual, "int", "month"),
    col("migrate_is_weekend", Contextual, "int", "bool"),
    col("dev_hold_pct", Holding, "float", "fraction"),
    col("sniper_hold_pct", Holding, "float", "fraction"),
    col("sniper_num", Holding, "int", "count"),
    col("top1_hold_pct", Holding, "float", "fraction"),
    col("top5_hold_pct", Holding, "float", "fraction"),
    col("top10_hold_pct", Holding, "float", "fraction"),
    col("top20_hold_pct", Holding, "float", "fraction"),
    col("early_top5_hold_pct", Holding, "float", "fraction"),
    col("early_top10_hold_pct", Holding, "float", "fraction"),
    col("early_top20_hold_pct", Holding, "float", "fraction"),
    col("gini_holdings", Holding, "float", "fraction"),
    col("median_holder_pct", Holding, "float", "fraction"),
    col("tx_num", Activity, "int", "count"),
    col("time_span", Activity, "int", "seconds"),
    col("trader_num", Activity, "int", "count"),
    col("holder_num", Activity, "int", "count"),
    col("buy_num", Activity, "int", "count"),
    col("sell_num", Activity, "int", "count"),
    col("wash_num", Activity, "int", "count"),
    col("transfer_num", Activity, "int", "count"),
    col("mint_num", Activity, "int", "count"),
    col("unknown_num", Activity, "int", "count"),
    col("avg_buy_volume", Activity, "float", "tokens"),
    col("avg_sell_volume", Activity, "float", "tokens"),
    col("buy_base_volume", Activity, "float", "base_units"),
    col("sell_base_volume", Activity, "float", "base_units"),
    col("unique_funder_num", Activity, "int", "count"),
    col("wash_share", Activity, "float", "fraction"),
    col("sell_buy_ratio", Activity, "float", "ratio"),
    col("buys_per_minute", Activity, "float", "per_minute"),
    col("bundle_hold_pct", Bundle, "float", "fraction"),
    col("bundle_num", Bundle, "int", "count"),
    col("bundle_account_num", Bundle, "int", "count"),
    col("max_bundle_size", Bundle, "int", "count"),
    col("bundle_holder_ratio", Bundle, "float", "fraction"),
    col("bundle_top1_hold_pct", Bundle, "float", "fraction"),
    col("bundle_top10_hold_pct", Bundle, "float", "fraction"),
    col("bundle_early_top10_hold_pct", Bundle, "float", "fraction"),
    col("bundle_early_top20_hold_pct", Bundle, "float", "fraction"),
    col("bundle_gini_holdings", Bundle, "float", "fraction"),
    col("ts_bucket_num", TimeSeries, "int", "count"),
    col("ts_price_change", TimeSeries, "float", "ratio"),
    col("ts_first_minute_buy_share", TimeSeries, "float", "fraction"),
];

pub fn column_index(name: &str) -> Option<usize> {
    COLUMNS.iter().position(|c| c.name == name)
}
