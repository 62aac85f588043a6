use crate::market::CurveConfig;
use crate::risk::RiskLevel;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

pub const LAMPORTS_PER_SOL: u64 = 1_000_000_000;

const fn sol(x: f64) -> u64 {
    (x * LAMPORTS_PER_SOL as f64) as u64
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    High,
    Medium,
    Low,
    Manipulated,
}

impl Profile {
    pub const ALL: [Profile; 4] = [Profile::High, Profile::Medium, Profile::Low, Profile::Manipulated];

    pub fn as_str(&self) -> &'static str {
        match self {
            Profile::High => "high",
            Profile::Medium => "medium",
            Profile::Low => "low",
            Profile::Manipulated => "manipulated",
        }
    }

    /// Level the annotator is expected to assign.
    pub fn true_level(&self) -> RiskLevel {
        match self {
            Profile::High | Profile::Manipulated => RiskLevel::High,
            Profile::Medium => RiskLevel::Medium,
            Profile::Low => RiskLevel::Low,
        }
    }
}

impl fmt::Display for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Profile::ALL.iter().find(|p| p.as_str() == s).copied().ok_or_else(|| format!("unknown profile `{s}`"))
    }
}

/// Inclusive uniform range in base units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Budget {
    pub min: u64,
    pub max: u64,
}

impl Budget {
    pub const fn sol(min: f64, max: f64) -> Self {
        Budget { min: sol(min), max: sol(max) }
    }
}

/// Log-normal size distribution: `median * exp(sigma * z)`, clamped.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SizeDist {
    pub median: u64,
    pub sigma: f64,
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceEmission {
    /// Insider accounts buy in one shared transaction.
    pub in_tx: bool,
    pub funder: bool,
    pub jito: bool,
}

impl Default for TraceEmission {
    fn default() -> Self {
        TraceEmission { in_tx: true, funder: true, jito: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Developer {
    pub prebuy_prob: f64,
    pub budget: Budget,
    /// Developer shares the funder of the first insider bundle.
    pub joins_bundle: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Insiders {
    pub snipers: usize,
    pub sniper_budget: Budget,
    pub bundles: usize,
    /// Accounts per bundle (how finely each insider splits holdings).
    pub split_factor: usize,
    /// Total budget of one bundle, spread over its accounts.
    pub bundle_budget: Budget,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Organic {
    /// Upper bound on distinct organic buyers before the sale gives up.
    pub buyers: usize,
    pub buy_size: SizeDist,
    /// Mean seconds between curve-phase actions.
    pub mean_gap_s: f64,
    pub sell_prob: f64,
    pub transfer_prob: f64,
    /// Share of organic accounts funded from an exchange wallet.
    pub cex_funded: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WashTraders {
    pub accounts: usize,
    /// Probability that a curve-phase action is a wash trade.
    pub rate: f64,
    pub size: SizeDist,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PostFlow {
    /// Mean organic trades per second.
    pub trade_rate: f64,
    pub buy_prob: f64,
    pub size: SizeDist,
}

/// Insiders sell `1/chunks` of their allotment each time organic buyers have
/// added `trigger_base` since the previous sell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnwindSchedule {
    /// Price ratio the allotment is sized to reach on an otherwise idle pool.
    pub target_ratio: (f64, f64),
    pub chunks: usize,
    pub trigger_base: u64,
}

/// Sells into buyers until the price reaches the lower band, then buys
/// into capitulation until the upper band, for the whole hour.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManipulatorBot {
    pub lower_band: (f64, f64),
    pub upper_band: (f64, f64),
    /// Per-second trade as a fraction of the pool reserve on the traded side.
    pub step_fraction: (f64, f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub seed: u64,
    pub profile: Profile,
    pub curve: CurveConfigSpec,
    pub fee: u64,
    pub developer: Developer,
    pub insiders: Insiders,
    pub organic: Organic,
    pub wash: WashTraders,
    pub post_flow: PostFlow,
    pub unwind: Option<UnwindSchedule>,
    pub manipulator: Option<ManipulatorBot>,
    pub emit: TraceEmission,
}

/// Serializable mirror of [`CurveConfig`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveConfigSpec {
    pub p0: u64,
    pub ratio: f64,
    pub tiers: usize,
    pub tier_allocation: u64,
    pub total_supply: u64,
    pub migrate_fraction: f64,
}

impl From<&CurveConfig> for CurveConfigSpec {
    fn from(c: &CurveConfig) -> Self {
        CurveConfigSpec {
            p0: c.p0 as u64,
            ratio: c.ratio,
            tiers: c.tiers,
            tier_allocation: c.tier_allocation as u64,
            total_supply: c.total_supply as u64,
            migrate_fraction: c.migrate_fraction,
        }
    }
}

impl From<&CurveConfigSpec> for CurveConfig {
    fn from(c: &CurveConfigSpec) -> Self {
        CurveConfig {
            p0: c.p0 as u128,
            ratio: c.ratio,
            tiers: c.tiers,
            tier_allocation: c.tier_allocation as u128,
            total_supply: c.total_supply as u128,
            migrate_fraction: c.migrate_fraction,
        }
    }
}

impl ScenarioConfig {
    /// Default scenario for `profile`.
    pub fn preset(profile: Profile, seed: u64) -> Self {
        let organic = Organic {
            buyers: 5_000,
            buy_size: SizeDist { median: sol(0.2), sigma: 0.9, min: sol(0.01), max: sol(5.0) },
            mean_gap_s: 3.0,
            sell_prob: 0.12,
            transfer_prob: 0.049,
            cex_funded: 0.35,
        };
        let post_flow = PostFlow {
            trade_rate: 0.5,
            buy_prob: 0.5,
            size: SizeDist { median: sol(0.05), sigma: 1.0, min: sol(0.001), max: sol(2.0) },
        };
        let mut cfg = ScenarioConfig {
            seed,
            profile,
            curve: CurveConfigSpec::from(&CurveConfig::default()),
            fee: 5_000,
            developer: Developer { prebuy_prob: 0.987, budget: Budget::sol(0.1, 0.8), joins_bundle: false },
            insiders: Insiders {
                snipers: 1,
                sniper_budget: Budget::sol(0.1, 0.5),
                bundles: 0,
                split_factor: 4,
                bundle_budget: Budget::sol(1.0, 2.0),
            },
            organic,
            wash: WashTraders {
                accounts: 6,
                rate: 0.214,
                size: SizeDist { median: sol(0.3), sigma: 0.7, min: sol(0.02), max: sol(3.0) },
            },
            post_flow,
            unwind: None,
            manipulator: None,
            emit: TraceEmission::default(),
        };
        match profile {
            Profile::Low => {
                cfg.post_flow.buy_prob = 0.52;
            }
            Profile::High => {
                cfg.developer = Developer { prebuy_prob: 0.987, budget: Budget::sol(1.5, 3.0), joins_bundle: true };
                cfg.insiders = Insiders {
                    snipers: 4,
                    sniper_budget: Budget::sol(0.5, 2.0),
                    bundles: 3,
                    split_factor: 5,
                    bundle_budget: Budget::sol(6.0, 10.0),
                };
                cfg.organic.mean_gap_s = 2.0;
                cfg.organic.buy_size.median = sol(0.25);
                cfg.unwind = Some(UnwindSchedule { target_ratio: (0.08, 0.18), chunks: 25, trigger_base: sol(0.3) });
            }
            Profile::Medium => {
                cfg.developer.budget = Budget::sol(0.5, 2.0);
                cfg.insiders = Insiders {
                    snipers: 2,
                    sniper_budget: Budget::sol(0.3, 1.0),
                    bundles: 2,
                    split_factor: 4,
                    bundle_budget: Budget::sol(4.0, 7.0),
                };
                cfg.organic.mean_gap_s = 2.5;
                cfg.unwind = Some(UnwindSchedule { target_ratio: (0.45, 0.6), chunks: 20, trigger_base: sol(0.3) });
            }
            Profile::Manipulated => {
                cfg.developer.budget = Budget::sol(0.5, 2.0);
                cfg.insiders = Insiders {
                    snipers: 2,
                    sniper_budget: Budget::sol(0.3, 1.0),
                    bundles: 2,
                    split_factor: 4,
                    bundle_budget: Budget::sol(5.0, 8.0),
                };
                cfg.organic.mean_gap_s = 2.5;
                cfg.manipulator = Some(ManipulatorBot {
                    lower_band: (0.82, 0.88),
                    upper_band: (1.05, 1.12),
                    step_fraction: (0.0015, 0.003),
                });
            }
        }
        cfg
    }

    pub fn curve_config(&self) -> CurveConfig {
        CurveConfig::from(&self.curve)
    }
}
