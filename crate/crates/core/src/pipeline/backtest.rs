use crate::risk::{PostSeries, RiskLevel, POST_SERIES_LEN};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum BacktestError {
    #[error("cannot select {k} of {available} mints")]
    NotEnoughMints { k: usize, available: usize },
    #[error("k must be positive")]
    ZeroK,
    #[error("samples must be positive")]
    ZeroSamples,
    #[error("{0}: migration price must be positive")]
    BadMigrationPrice(String),
}

/// Mint that can be bought at migration and sold within the hour.
#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub mint: String,
    pub migration_price: f64,
    pub series: PostSeries,
    pub level: Option<RiskLevel>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub k: usize,
    pub selected: Vec<String>,
    /// Share of selected mints that are not high risk (over labelled ones).
    pub precision: f64,
    /// Mean percentage loss per unit of capital.
    pub loss_pct: f64,
}

fn fnv1a(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325, |h, b| (h ^ b as u64).wrapping_mul(0x0100_0000_01b3))
}

/// Mean loss over `samples` uniform sell times in (0, 3600] seconds. The
/// draws depend only on `seed` and the mint, so every strategy that picks
/// the mint sees the same exits.
pub fn mint_loss(c: &Candidate, samples: usize, seed: u64) -> Result<f64, BacktestError> {
    if !(c.migration_price > 0.0) || !c.migration_price.is_finite() {
        return Err(BacktestError::BadMigrationPrice(c.mint.clone()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(&c.mint));
    let buckets = c.series.buckets();
    let total: f64 = (0..samples)
        .map(|_| {
            let t = rng.random_range(1..=POST_SERIES_LEN);
            (1.0 - buckets[t - 1].price / c.migration_price) * 100.0
        })
        .sum();
    Ok(total / samples as f64)
}

/// Candidates sorted by normal probability, highest first; ties by mint.
/// Mints without a score are left out.
pub fn rank<'a>(candidates: &'a [Candidate], scores: &BTreeMap<String, f64>) -> Vec<&'a Candidate> {
    let mut ranked: Vec<(&Candidate, f64)> =
        candidates.iter().filter_map(|c| scores.get(&c.mint).map(|s| (c, *s))).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.mint.cmp(&b.0.mint)));
    ranked.into_iter().map(|(c, _)| c).collect()
}

pub fn backtest_selection(
    candidates: &[Candidate],
    scores: &BTreeMap<String, f64>,
    k: usize,
    samples: usize,
    seed: u64,
) -> Result<SelectionResult, BacktestError> {
    if k == 0 {
        return Err(BacktestError::ZeroK);
    }
    if samples == 0 {
        return Err(BacktestError::ZeroSamples);
    }
    let ranked = rank(candidates, scores);
    if k > ranked.len() {
        return Err(BacktestError::NotEnoughMints { k, available: ranked.len() });
    }
    let chosen = &ranked[..k];
    let losses = chosen.iter().map(|c| mint_loss(c, samples, seed)).collect::<Result<Vec<_>, _>>()?;
    let labelled: Vec<RiskLevel> = chosen.iter().filter_map(|c| c.level).collect();
    let precision = if labelled.is_empty() {
        0.0
    } else {
        labelled.iter().filter(|l| **l != RiskLevel::High).count() as f64 / labelled.len() as f64
    };
    Ok(SelectionResult {
        k,
        selected: chosen.iter().map(|c| c.mint.clone()).collect(),
        precision,
        loss_pct: losses.iter().sum::<f64>() / k as f64,
    })
}

/// Uniform random scores, one per candidate.
pub fn random_scores(candidates: &[Candidate], seed: u64) -> BTreeMap<String, f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    candidates.iter().map(|c| (c.mint.clone(), rng.random::<f64>())).collect()
}

/// Perfect-knowledge scores: 1 for non-high-risk mints, 0 otherwise.
pub fn oracle_scores(candidates: &[Candidate]) -> BTreeMap<String, f64> {
    candidates
        .iter()
        .filter_map(|c| c.level.map(|l| (c.mint.clone(), if l == RiskLevel::High { 0.0 } else { 1.0 })))
        .collect()
}
