use crate::features::FeatureRow;
use crate::risk::RiskLevel;
use std::collections::BTreeMap;

/// Launches shorter than this (seconds) are screened out.
pub const MIN_TIME_SPAN_S: f64 = 60.0;
/// Launches with fewer holders are screened out.
pub const MIN_HOLDERS: f64 = 100.0;

#[derive(Debug, Clone, PartialEq)]
pub struct TaskRow {
    pub features: FeatureRow,
    /// 1 for high risk, 0 otherwise.
    pub label: u8,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaskReport {
    pub total: usize,
    pub unlabeled: usize,
    pub dropped_short: usize,
    pub dropped_few_holders: usize,
    pub kept: usize,
    pub positive: usize,
    pub negative: usize,
}

impl TaskReport {
    pub fn rows(&self) -> Vec<(&'static str, usize)> {
        vec![
            ("total", self.total),
            ("unlabeled", self.unlabeled),
            ("dropped_short", self.dropped_short),
            ("dropped_few_holders", self.dropped_few_holders),
            ("kept", self.kept),
            ("high", self.positive),
            ("normal", self.negative),
        ]
    }
}

pub fn task_label(level: RiskLevel) -> u8 {
    u8::from(level == RiskLevel::High)
}

/// Screen the labelled feature table. A launch failing both rules counts as
/// short; missing values fail the rule they feed.
pub fn filter_task(rows: &[FeatureRow], labels: &BTreeMap<String, RiskLevel>) -> (Vec<TaskRow>, TaskReport) {
    let mut report = TaskReport { total: rows.len(), ..Default::default() };
    let mut kept = Vec::new();
    for row in rows {
        let Some(level) = labels.get(&row.mint) else {
            report.unlabeled += 1;
            continue;
        };
        if !row.get("time_span").is_some_and(|v| v >= MIN_TIME_SPAN_S) {
            report.dropped_short += 1;
            continue;
        }
        if !row.get("holder_num").is_some_and(|v| v >= MIN_HOLDERS) {
            report.dropped_few_holders += 1;
            continue;
        }
        let label = task_label(*level);
        if label == 1 {
            report.positive += 1;
        } else {
            report.negative += 1;
        }
        kept.push(TaskRow { features: row.clone(), label });
    }
    report.kept = kept.len();
    (kept, report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::{column_index, COLUMNS};

    fn row(mint: &str, span: f64, holders: f64) -> FeatureRow {
        let mut values = vec![Some(0.0); COLUMNS.len()];
        values[column_index("time_span").unwrap()] = Some(span);
        values[column_index("holder_num").unwrap()] = Some(holders);
        FeatureRow { mint: mint.into(), values, incomplete: false }
    }

    #[test]
    fn screening_rules() {
        let rows = vec![
            row("short", 30.0, 500.0),
            row("edge", 60.0, 100.0),
            row("few", 600.0, 99.0),
            row("med", 600.0, 300.0),
        ];
        let labels: BTreeMap<String, RiskLevel> = [
            ("short", RiskLevel::High),
            ("edge", RiskLevel::High),
            ("few", RiskLevel::Low),
            ("med", RiskLevel::Medium),
        ]
        .into_iter()
        .map(|(m, l)| (m.to_string(), l))
        .collect();
        let (kept, report) = filter_task(&rows, &labels);
        let got: Vec<(&str, u8)> = kept.iter().map(|r| (r.features.mint.as_str(), r.label)).collect();
        assert_eq!(got, vec![("edge", 1), ("med", 0)]);
        assert_eq!(report.dropped_short, 1);
        assert_eq!(report.dropped_few_holders, 1);
        assert_eq!((report.kept, report.positive, report.negative), (2, 1, 1));
    }

    #[test]
    fn unlabelled_and_missing() {
        let mut r = row("m", 100.0, 200.0);
        r.values[column_index("holder_num").unwrap()] = None;
        let labels = BTreeMap::from([("m".to_string(), RiskLevel::Low)]);
        let (kept, report) = filter_task(&[r, row("x", 100.0, 200.0)], &labels);
        assert!(kept.is_empty());
        assert_eq!((report.unlabeled, report.dropped_few_holders), (1, 1));
    }
}
