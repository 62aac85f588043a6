use crate::features::FeatureRow;
use crate::io::DistributionRow;
use crate::risk::RiskLevel;
use std::collections::{BTreeMap, BTreeSet};

/// Feature columns summarised per risk level.
pub const PANELS: [&str; 8] = [
    "time_span",
    "holder_num",
    "buy_num",
    "avg_buy_volume",
    "early_top10_hold_pct",
    "early_top20_hold_pct",
    "top10_hold_pct",
    "bundle_top10_hold_pct",
];

/// Linear-interpolation quantile of sorted data.
pub fn quantile(sorted: &[f64], q: f64) -> Option<f64> {
    if sorted.is_empty() {
        return None;
    }
    let pos = q.clamp(0.0, 1.0) * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    Some(sorted[lo] + (sorted[hi] - sorted[lo]) * (pos - lo as f64))
}

pub fn median(values: &[f64]) -> Option<f64> {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    quantile(&v, 0.5)
}

/// Quartiles of every panel for each risk level present in `labels`.
pub fn report_distributions(rows: &[FeatureRow], labels: &BTreeMap<String, RiskLevel>) -> Vec<DistributionRow> {
    let levels: BTreeSet<RiskLevel> = labels.values().copied().collect();
    let mut out = Vec::new();
    for panel in PANELS {
        for level in RiskLevel::ALL.iter().filter(|l| levels.contains(l)) {
            let mut values: Vec<f64> = rows
                .iter()
                .filter(|r| labels.get(&r.mint) == Some(level))
                .filter_map(|r| r.get(panel))
                .filter(|v| v.is_finite())
                .collect();
            values.sort_by(f64::total_cmp);
            out.push(DistributionRow {
                panel: panel.to_string(),
                risk_level: *level,
                status: if values.is_empty() { "absent" } else { "ok" }.to_string(),
                n: values.len(),
                q1: quantile(&values, 0.25),
                median: quantile(&values, 0.5),
                q3: quantile(&values, 0.75),
            });
        }
    }
    out
}
