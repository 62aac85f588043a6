//! File-to-file pipeline stages: parse, cluster, features, annotate, then
//! the task table, distribution report and selection backtest. Every stage
//! reads its inputs from disk so any of them can be rerun alone.

mod backtest;
mod report;
mod task;

pub use backtest::*;
pub use report::*;
pub use task::*;

use crate::bundle::{bundle_stats, cluster, extract_in_tx_traces, Bundle, BundleTrace, CexList, IdentifierKind};
use crate::features::{
    compute_launch, replay_holdings, FeatureConfig, FeatureError, FeatureRow, LaunchInfo, SolPriceFeed, COLUMNS,
};
use crate::io::{
    feature_manifest_rows, read_features, read_jsonl, read_post, read_records, write_features, write_records,
    write_table, write_timeseries, BacktestRow, BreakdownRow, BundleRow, BundleStatsRow, CorpusLayout, CountRow,
    HistogramRow, IoError, LaunchRecord, LevelRow, ManifestRow, MigrationRecord, OutputLayout, ScoreRow, SolPriceRow,
};
use crate::parser::{parse_corpus, BreakdownReport, ParsedEvent, ParserConfig, RawTransaction};
use crate::risk::{
    annotate_corpus, AnnotateConfig, AnnotationInput, AnnotationReport, RiskLabel, RiskLevel, RATIO_BIN_LABELS,
};
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Io(#[from] IoError),
    #[error(transparent)]
    Backtest(#[from] BacktestError),
    #[error("{0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, PipelineError>;

#[derive(Debug, Clone, Default)]
pub struct PipelineConfig {
    pub parser: ParserConfig,
    pub features: FeatureConfig,
    pub annotate: AnnotateConfig,
    /// Exchange wallets; defaults to the corpus `cex.txt` merged with the
    /// built-in list.
    pub cex: Option<CexList>,
}

fn launches(corpus: &CorpusLayout) -> Result<Vec<LaunchRecord>> {
    let records: Vec<LaunchRecord> = read_records(&corpus.token_launch())?;
    let mut seen = BTreeSet::new();
    for r in &records {
        if !seen.insert(r.mint.as_str()) {
            return Err(PipelineError::Input(format!("duplicate mint {} in token_launch.csv", r.mint)));
        }
    }
    Ok(records)
}

pub fn load_cex(corpus: &CorpusLayout, cfg: &PipelineConfig) -> Result<CexList> {
    if let Some(c) = &cfg.cex {
        return Ok(c.clone());
    }
    let mut cex = CexList::builtin();
    let path = corpus.cex_list();
    if path.exists() {
        let text = std::fs::read_to_string(&path).map_err(|e| IoError::io(&path, e))?;
        cex.extend(CexList::parse(&text));
    }
    Ok(cex)
}

/// Parse every stream into `events/<mint>.csv` and write the corpus-wide
/// transaction breakdown.
pub fn parse_stage(corpus: &CorpusLayout, out: &OutputLayout, cfg: &PipelineConfig) -> Result<BreakdownReport> {
    let records = launches(corpus)?;
    let reports = records
        .par_iter()
        .map(|r| -> Result<BreakdownReport> {
            let txs: Vec<RawTransaction> = read_jsonl(&corpus.transactions(&r.mint))?;
            let parsed = parse_corpus(txs, &cfg.parser);
            write_records(&out.events(&r.mint), &parsed.events)?;
            Ok(parsed.report)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut total = BreakdownReport::default();
    for r in &reports {
        total.merge(r);
    }
    let mut rows: Vec<BreakdownRow> = total
        .rows()
        .into_iter()
        .map(|(k, c, p)| BreakdownRow { kind: k.as_str().to_string(), count: c, percentage: format!("{p:.2}") })
        .collect();
    rows.push(BreakdownRow { kind: "total".into(), count: total.total, percentage: "100.00".into() });
    write_records(&out.breakdown(), &rows)?;
    Ok(total)
}

fn load_events(out: &OutputLayout, mint: &str) -> Result<Vec<ParsedEvent>> {
    Ok(read_records(&out.events(mint))?)
}

fn holdings_u64(events: &[ParsedEvent]) -> (BTreeMap<String, u64>, u64) {
    let h: BTreeMap<String, u64> =
        replay_holdings(events).into_iter().filter(|(_, v)| *v > 0).map(|(k, v)| (k, v as u64)).collect();
    let circulating = h.values().sum();
    (h, circulating)
}

/// All traces of one launch: recorded funder/Jito traces plus in-transaction
/// traces read off the parsed events.
fn launch_traces(corpus: &CorpusLayout, mint: &str, events: &[ParsedEvent]) -> Result<Vec<BundleTrace>> {
    let mut traces: Vec<BundleTrace> = read_records(&corpus.traces(mint))?;
    traces.extend(extract_in_tx_traces(events));
    Ok(traces)
}

/// Cluster bundled accounts into `bundles/<mint>.csv` plus per-heuristic
/// share statistics.
pub fn cluster_stage(corpus: &CorpusLayout, out: &OutputLayout, cfg: &PipelineConfig) -> Result<Vec<BundleStatsRow>> {
    let records = launches(corpus)?;
    let cex = load_cex(corpus, cfg)?;
    let per_mint = records
        .par_iter()
        .map(|r| -> Result<Vec<BundleStatsRow>> {
            let events = load_events(out, &r.mint)?;
            let traces = launch_traces(corpus, &r.mint, &events)?;
            let bundles = cluster(&traces, &cex);
            let rows: Vec<BundleRow> = bundles
                .iter()
                .flat_map(|b| b.accounts.iter().map(|a| BundleRow { bundle_id: b.bundle_id, account: a.clone() }))
                .collect();
            write_records(&out.bundles(&r.mint), &rows)?;
            let (holdings, circulating) = holdings_u64(&events);
            let mut stats = Vec::new();
            let kinds = [Some(IdentifierKind::InTx), Some(IdentifierKind::Funder), Some(IdentifierKind::Jito), None];
            for kind in kinds {
                let subset: Vec<BundleTrace> =
                    traces.iter().filter(|t| kind.is_none_or(|k| t.identifier_kind == k)).cloned().collect();
                let b = if kind.is_none() { bundles.clone() } else { cluster(&subset, &cex) };
                let s = bundle_stats(&b, &holdings, circulating);
                stats.push(BundleStatsRow {
                    mint: r.mint.clone(),
                    heuristic: kind.map(|k| k.as_str()).unwrap_or("all").to_string(),
                    bundle_num: b.len(),
                    bundle_holder_ratio: s.bundle_holder_ratio,
                    bundle_holding_pct: s.bundle_holding_pct,
                });
            }
            Ok(stats)
        })
        .collect::<Result<Vec<_>>>()?;
    let stats: Vec<BundleStatsRow> = per_mint.into_iter().flatten().collect();
    write_records(&out.bundle_stats(), &stats)?;
    Ok(stats)
}

pub fn load_bundles(out: &OutputLayout, mint: &str) -> Result<Vec<Bundle>> {
    let rows: Vec<BundleRow> = read_records(&out.bundles(mint))?;
    let mut map: BTreeMap<usize, BTreeSet<String>> = BTreeMap::new();
    for r in rows {
        map.entry(r.bundle_id).or_default().insert(r.account);
    }
    Ok(map.into_iter().map(|(bundle_id, accounts)| Bundle { bundle_id, accounts, evidence: BTreeSet::new() }).collect())
}

pub fn load_feed(corpus: &CorpusLayout) -> Result<SolPriceFeed> {
    let path = corpus.sol_price();
    if !path.exists() {
        log::warn!("{} missing; sol_price will be empty", path.display());
        return Ok(SolPriceFeed::default());
    }
    let rows: Vec<SolPriceRow> = read_records(&path)?;
    Ok(SolPriceFeed::new(rows.into_iter().map(|r| (r.ts, r.usd)).collect()))
}

/// One feature row and time series per launch with events. Launches that
/// cannot be featurised are logged and skipped.
pub fn features_stage(corpus: &CorpusLayout, out: &OutputLayout, cfg: &PipelineConfig) -> Result<Vec<FeatureRow>> {
    let records = launches(corpus)?;
    let feed = load_feed(corpus)?;
    let rows = records
        .par_iter()
        .map(|r| -> Result<Option<FeatureRow>> {
            let events = load_events(out, &r.mint)?;
            let traces = launch_traces(corpus, &r.mint, &events)?;
            let bundles = load_bundles(out, &r.mint)?;
            let info = LaunchInfo {
                mint: r.mint.clone(),
                creator: r.creator.clone(),
                create_ts: r.create_ts,
                migrate_ts: r.migrate_ts,
            };
            match compute_launch(&info, &events, &bundles, &traces, &feed, &cfg.features) {
                Ok((row, ts)) => {
                    write_timeseries(&out.timeseries(&r.mint), &ts)?;
                    Ok(Some(row))
                }
                Err(e @ (FeatureError::NoEvents(_) | FeatureError::BadTimeSpan { .. })) => {
                    log::warn!("{}: skipped: {e}", r.mint);
                    Ok(None)
                }
            }
        })
        .collect::<Result<Vec<_>>>()?;
    let rows: Vec<FeatureRow> = rows.into_iter().flatten().collect();
    write_features(&out.features(), &rows)?;
    write_records(&out.features_manifest(), &feature_manifest_rows())?;
    Ok(rows)
}

fn read_score_map(path: &Path) -> Result<BTreeMap<String, f64>> {
    let rows: Vec<ScoreRow> = read_records(path)?;
    Ok(rows.into_iter().map(|r| (r.mint, r.normal_probability)).collect())
}

/// Label every migrated launch. `manipulation_scores` (same `mint,score`
/// layout as the detector output, read as manipulation probability)
/// replaces the heuristic score for the mints it covers.
pub fn annotate_stage(
    corpus: &CorpusLayout,
    out: &OutputLayout,
    cfg: &PipelineConfig,
    manipulation_scores: Option<&Path>,
) -> Result<AnnotationReport> {
    let migrations: Vec<MigrationRecord> = read_records(&corpus.migrations())?;
    let external = manipulation_scores.map(read_score_map).transpose()?.unwrap_or_default();
    let inputs = migrations
        .par_iter()
        .map(|m| -> Result<AnnotationInput> {
            let path = corpus.post(&m.mint);
            let series = if path.exists() { Some(read_post(&path)?) } else { None };
            Ok(AnnotationInput {
                mint: m.mint.clone(),
                migration_price: m.migration_price,
                series,
                external_score: external.get(&m.mint).copied(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let report = annotate_corpus(&inputs, &cfg.annotate);
    write_records(&out.labels(), &report.labels)?;
    let n = report.labels.len().max(1) as f64;
    let hist: Vec<HistogramRow> = RATIO_BIN_LABELS
        .iter()
        .zip(report.ratio_histogram)
        .map(|(range, count)| HistogramRow { range: range.to_string(), count, percentage: 100.0 * count as f64 / n })
        .collect();
    write_records(&out.ratio_histogram(), &hist)?;
    let levels: Vec<LevelRow> = RiskLevel::ALL
        .iter()
        .map(|l| LevelRow { risk_level: *l, count: report.level_count(*l), share: report.level_share(*l) })
        .collect();
    write_records(&out.label_distribution(), &levels)?;
    Ok(report)
}

pub fn load_labels(out: &OutputLayout) -> Result<BTreeMap<String, RiskLevel>> {
    let labels: Vec<RiskLabel> = read_records(&out.labels())?;
    Ok(labels.into_iter().map(|l| (l.mint, l.risk_level)).collect())
}

/// Screen labelled features into `task.csv` (mint, label, features).
pub fn task_stage(out: &OutputLayout) -> Result<TaskReport> {
    let rows = read_features(&out.features())?;
    let labels = load_labels(out)?;
    let (kept, report) = filter_task(&rows, &labels);
    let header: Vec<String> =
        ["mint", "label"].into_iter().map(String::from).chain(COLUMNS.iter().map(|c| c.name.to_string())).collect();
    let body: Vec<Vec<String>> = kept
        .iter()
        .map(|t| {
            [t.features.mint.clone(), t.label.to_string()]
                .into_iter()
                .chain(t.features.values.iter().map(|v| v.map(|x| x.to_string()).unwrap_or_default()))
                .collect()
        })
        .collect();
    write_table(&out.task(), &header, &body)?;
    let counts: Vec<CountRow> =
        report.rows().into_iter().map(|(name, count)| CountRow { name: name.to_string(), count }).collect();
    write_records(&out.task_counts(), &counts)?;
    Ok(report)
}

pub fn report_stage(out: &OutputLayout) -> Result<Vec<crate::io::DistributionRow>> {
    let rows = read_features(&out.features())?;
    let labels = load_labels(out)?;
    let dist = report_distributions(&rows, &labels);
    write_records(&out.distributions(), &dist)?;
    Ok(dist)
}

/// Post-migration candidates with their levels: ground truth from the
/// corpus manifest when present, annotator labels otherwise.
pub fn load_candidates(corpus: &CorpusLayout, out: &OutputLayout) -> Result<Vec<Candidate>> {
    let migrations: Vec<MigrationRecord> = read_records(&corpus.migrations())?;
    let levels: BTreeMap<String, RiskLevel> = if corpus.manifest().exists() {
        let rows: Vec<ManifestRow> = read_records(&corpus.manifest())?;
        rows.into_iter().map(|r| (r.mint, r.true_level)).collect()
    } else if out.labels().exists() {
        load_labels(out)?
    } else {
        BTreeMap::new()
    };
    migrations
        .into_iter()
        .filter(|m| corpus.post(&m.mint).exists())
        .map(|m| {
            Ok(Candidate {
                series: read_post(&corpus.post(&m.mint))?,
                level: levels.get(&m.mint).copied(),
                mint: m.mint,
                migration_price: m.migration_price,
            })
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct BacktestConfig {
    pub ks: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        BacktestConfig { ks: vec![10, 20], samples: 100, seed: 0 }
    }
}

/// Compare detector scores (if given) with oracle and random selection.
pub fn backtest_stage(
    corpus: &CorpusLayout,
    out: &OutputLayout,
    scores: Option<&Path>,
    cfg: &BacktestConfig,
) -> Result<Vec<BacktestRow>> {
    let candidates = load_candidates(corpus, out)?;
    let mut strategies: Vec<(String, BTreeMap<String, f64>)> = Vec::new();
    if let Some(p) = scores {
        strategies.push(("scores".into(), read_score_map(p)?));
    }
    strategies.push(("oracle".into(), oracle_scores(&candidates)));
    strategies.push(("random".into(), random_scores(&candidates, cfg.seed)));
    let mut rows = Vec::new();
    for (name, s) in &strategies {
        for &k in &cfg.ks {
            let r = backtest_selection(&candidates, s, k, cfg.samples, cfg.seed)?;
            rows.push(BacktestRow { strategy: name.clone(), k, mean_loss: r.loss_pct, precision: r.precision });
        }
    }
    write_records(&out.backtest(), &rows)?;
    Ok(rows)
}

#[derive(Debug, Clone)]
pub struct PipelineSummary {
    pub launches: usize,
    pub breakdown: BreakdownReport,
    pub feature_rows: usize,
    pub labels: AnnotationReport,
    pub task: TaskReport,
}

/// parse → cluster → features → annotate → task → report.
pub fn run_pipeline(corpus_dir: &Path, out_dir: &Path, cfg: &PipelineConfig) -> Result<PipelineSummary> {
    let corpus = CorpusLayout::new(corpus_dir);
    let out = OutputLayout::new(out_dir);
    let breakdown = parse_stage(&corpus, &out, cfg)?;
    cluster_stage(&corpus, &out, cfg)?;
    let rows = features_stage(&corpus, &out, cfg)?;
    let labels = annotate_stage(&corpus, &out, cfg, None)?;
    let task = task_stage(&out)?;
    report_stage(&out)?;
    Ok(PipelineSummary { launches: launches(&corpus)?.len(), breakdown, feature_rows: rows.len(), labels, task })
}
