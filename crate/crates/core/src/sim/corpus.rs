use super::{simulate_launch, Profile, ScenarioConfig, SimError, SimulatedLaunch, EPOCH_TS};
use crate::bundle::CexList;
use crate::io::{
    self, write_atomic, write_jsonl, write_post, write_records, CorpusLayout, IoError, LaunchRecord, ManifestRow,
    MigrationRecord, SolPriceRow, TruthBundleRow, TruthEventRow,
};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::fmt;
use std::path::Path;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Io(#[from] IoError),
}

/// Share of launches per profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileMix {
    pub high: f64,
    pub medium: f64,
    pub low: f64,
    pub manipulated: f64,
}

impl Default for ProfileMix {
    /// Skewed towards high risk like the labelled mainnet population.
    fn default() -> Self {
        ProfileMix { high: 0.74, medium: 0.11, low: 0.05, manipulated: 0.10 }
    }
}

impl ProfileMix {
    pub fn new(high: f64, medium: f64, low: f64, manipulated: f64) -> Result<Self, SimError> {
        let mix = ProfileMix { high, medium, low, manipulated };
        mix.validate()?;
        Ok(mix)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let w = self.weights();
        if w.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return Err(SimError::InvalidConfig("mix weights must be non-negative".into()));
        }
        let sum: f64 = w.iter().sum();
        if (sum - 1.0).abs() > 1e-9 {
            return Err(SimError::InvalidConfig(format!("mix weights sum to {sum}, not 1")));
        }
        Ok(())
    }

    /// Weights in [`Profile::ALL`] order.
    pub fn weights(&self) -> [f64; 4] {
        [self.high, self.medium, self.low, self.manipulated]
    }

    /// Launch counts per profile ([`Profile::ALL`] order) by largest
    /// remainder; ties go to the earlier profile.
    pub fn allocate(&self, n: usize) -> [usize; 4] {
        let w = self.weights();
        let exact: Vec<f64> = w.iter().map(|v| v * n as f64).collect();
        // guard against 0.15 * 100 = 15.000000000000002 style noise
        let mut counts: [usize; 4] = std::array::from_fn(|i| (exact[i] + 1e-9).floor() as usize);
        let mut left = n.saturating_sub(counts.iter().sum());
        let mut order: Vec<usize> = (0..4).collect();
        order.sort_by(|&a, &b| {
            let fa = exact[a] - counts[a] as f64;
            let fb = exact[b] - counts[b] as f64;
            fb.total_cmp(&fa).then(a.cmp(&b))
        });
        for i in order.into_iter().cycle() {
            if left == 0 {
                break;
            }
            counts[i] += 1;
            left -= 1;
        }
        counts
    }

    pub fn count(&self, n: usize, profile: Profile) -> usize {
        let i = Profile::ALL.iter().position(|p| *p == profile).expect("listed profile");
        self.allocate(n)[i]
    }
}

impl fmt::Display for ProfileMix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "high={},medium={},low={},manipulated={}", self.high, self.medium, self.low, self.manipulated)
    }
}

/// `high=0.8,medium=0.15,low=0.05`; omitted profiles get zero.
impl FromStr for ProfileMix {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut mix = ProfileMix { high: 0.0, medium: 0.0, low: 0.0, manipulated: 0.0 };
        for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (k, v) = part.split_once('=').ok_or_else(|| format!("expected profile=share, got `{part}`"))?;
            let v: f64 = v.trim().parse().map_err(|_| format!("bad share `{v}`"))?;
            match k.trim().parse::<Profile>()? {
                Profile::High => mix.high = v,
                Profile::Medium => mix.medium = v,
                Profile::Low => mix.low = v,
                Profile::Manipulated => mix.manipulated = v,
            }
        }
        mix.validate().map_err(|e| e.to_string())?;
        Ok(mix)
    }
}

/// Scenario per launch: allocated profiles in seeded order, each with its
/// own derived seed.
pub fn corpus_plan(n: usize, mix: &ProfileMix, seed: u64) -> Result<Vec<ScenarioConfig>, SimError> {
    if n == 0 {
        return Err(SimError::InvalidConfig("corpus needs at least one launch".into()));
    }
    mix.validate()?;
    let counts = mix.allocate(n);
    let mut profiles: Vec<Profile> =
        Profile::ALL.iter().zip(counts).flat_map(|(p, c)| std::iter::repeat_n(*p, c)).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    profiles.shuffle(&mut rng);
    Ok(profiles.into_iter().map(|p| ScenarioConfig::preset(p, rng.random())).collect())
}

/// Simulate every scenario in parallel; output order follows the input.
pub fn generate(plan: &[ScenarioConfig]) -> Result<Vec<SimulatedLaunch>, SimError> {
    plan.par_iter().map(simulate_launch).collect()
}

pub fn generate_corpus(n: usize, mix: &ProfileMix, seed: u64) -> Result<Vec<SimulatedLaunch>, SimError> {
    generate(&corpus_plan(n, mix, seed)?)
}

/// Hourly SOL/USD random walk covering `[start_ts, end_ts]`.
pub fn sol_price_feed(seed: u64, start_ts: i64, end_ts: i64) -> Vec<SolPriceRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed_50f1);
    let mut usd: f64 = 220.0;
    let first = start_ts - start_ts.rem_euclid(3600);
    (first..=end_ts + 3600)
        .step_by(3600)
        .map(|ts| {
            usd *= 1.0 + rng.random_range(-0.01..=0.01);
            SolPriceRow { ts, usd: (usd * 100.0).round() / 100.0 }
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusSummary {
    pub launches: usize,
    pub transactions: usize,
    pub per_profile: [usize; 4],
}

/// Write launches in the corpus layout read by the pipeline.
pub fn write_corpus(dir: &Path, launches: &[SimulatedLaunch], seed: u64) -> Result<CorpusSummary, IoError> {
    let layout = CorpusLayout::new(dir);
    let mut manifest = Vec::new();
    let mut records: Vec<LaunchRecord> = Vec::new();
    let mut migrations: Vec<MigrationRecord> = Vec::new();
    let mut truth_bundles = Vec::new();
    let mut per_profile = [0usize; 4];
    for l in launches {
        let mint = &l.launch.mint;
        manifest.push(ManifestRow { mint: mint.clone(), profile: l.truth.profile, true_level: l.truth.level });
        records.push(l.launch.clone());
        migrations.push(l.migration.clone());
        per_profile[Profile::ALL.iter().position(|p| *p == l.truth.profile).expect("listed profile")] += 1;
        for (i, b) in l.truth.bundles.iter().enumerate() {
            truth_bundles.extend(b.iter().map(|a| TruthBundleRow {
                mint: mint.clone(),
                bundle: i,
                account: a.clone(),
            }));
        }
    }
    launches.par_iter().try_for_each(|l| -> Result<(), IoError> {
        let mint = &l.launch.mint;
        write_jsonl(&layout.transactions(mint), &l.transactions)?;
        write_records(&layout.traces(mint), &l.traces)?;
        write_post(&layout.post(mint), &l.post)?;
        let truth: Vec<TruthEventRow> = l
            .truth
            .events
            .iter()
            .map(|e| TruthEventRow { tx_id: e.tx_id.clone(), actor: e.actor.clone(), kind: e.kind })
            .collect();
        write_records(&layout.truth_events(mint), &truth)
    })?;
    let start = records.iter().map(|r| r.create_ts).min().unwrap_or(EPOCH_TS);
    let end = records.iter().map(|r| r.migrate_ts).max().unwrap_or(EPOCH_TS);
    write_records(&layout.sol_price(), &sol_price_feed(seed, start, end))?;
    write_records(&layout.manifest(), &manifest)?;
    write_records(&layout.token_launch(), &records)?;
    write_records(&layout.migrations(), &migrations)?;
    write_records(&layout.truth_bundles(), &truth_bundles)?;
    let cex: Vec<String> = CexList::builtin().addresses.into_iter().collect();
    write_atomic(&layout.cex_list(), (cex.join("\n") + "\n").as_bytes())?;
    if let Some(l) = launches.first() {
        write_atomic(&layout.curve_config(), l.curve.to_kv().as_bytes())?;
    }
    Ok(CorpusSummary {
        launches: launches.len(),
        transactions: launches.iter().map(|l| l.transactions.len()).sum(),
        per_profile,
    })
}

/// Plan, simulate and write `n` launches under `dir`.
pub fn simulate_corpus(dir: &Path, n: usize, mix: &ProfileMix, seed: u64) -> Result<CorpusSummary, CorpusError> {
    let plan = corpus_plan(n, mix, seed)?;
    let launches = generate(&plan)?;
    let summary = write_corpus(dir, &launches, seed)?;
    let scenario_lines: Vec<&ScenarioConfig> = plan.iter().collect();
    io::write_jsonl(&dir.join("scenarios.jsonl"), &scenario_lines)?;
    Ok(summary)
}
