use super::{BondingCurve, MarketError};
use std::fmt::Write as _;
use std::str::FromStr;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CurveConfigError {
    #[error("line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: invalid value for `{key}`: {value}")]
    BadValue { line: usize, key: String, value: String },
    #[error(transparent)]
    Market(#[from] MarketError),
}

/// Launchpad curve parameters. Tier prices follow `p0 * ratio^i`, rounded to
/// whole base units.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveConfig {
    pub p0: u128,
    pub ratio: f64,
    pub tiers: usize,
    pub tier_allocation: u128,
    pub total_supply: u128,
    pub migrate_fraction: f64,
}

impl Default for CurveConfig {
    fn default() -> Self {
        CurveConfig {
            p0: 28,
            ratio: 1.12,
            tiers: 25,
            tier_allocation: 40_000_000,
            total_supply: 1_000_000_000,
            migrate_fraction: 0.8,
        }
    }
}

impl CurveConfig {
    pub fn tier_prices(&self) -> Vec<u128> {
        (0..self.tiers).map(|i| (self.p0 as f64 * self.ratio.powi(i as i32)).round() as u128).collect()
    }

    pub fn build_curve(&self) -> Result<BondingCurve, MarketError> {
        if !(self.migrate_fraction > 0.0 && self.migrate_fraction <= 1.0) {
            return Err(MarketError::InvalidConfig("migrate_fraction must be in (0, 1]".into()));
        }
        if self.tier_allocation.saturating_mul(self.tiers as u128) > self.total_supply {
            return Err(MarketError::InvalidConfig("curve supply exceeds total supply".into()));
        }
        BondingCurve::new(self.tier_prices(), self.tier_allocation)
    }

    /// Tokens that must be sold before migration.
    pub fn migration_threshold(&self) -> Result<u128, MarketError> {
        Ok(self.build_curve()?.migration_threshold(self.migrate_fraction))
    }

    pub fn to_kv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "p0 = {}", self.p0);
        let _ = writeln!(out, "ratio = {}", self.ratio);
        let _ = writeln!(out, "tiers = {}", self.tiers);
        let _ = writeln!(out, "tier_allocation = {}", self.tier_allocation);
        let _ = writeln!(out, "total_supply = {}", self.total_supply);
        let _ = writeln!(out, "migrate_fraction = {}", self.migrate_fraction);
        out
    }
}

fn parse_value<T: FromStr>(line: usize, key: &str, value: &str) -> Result<T, CurveConfigError> {
    // integers may be written in scientific notation (1e9)
    value.parse::<T>().or_else(|_| {
        value
            .parse::<f64>()
            .ok()
            .filter(|v| v.fract() == 0.0 && *v >= 0.0)
            .and_then(|v| format!("{v:.0}").parse::<T>().ok())
            .ok_or_else(|| CurveConfigError::BadValue { line, key: key.to_string(), value: value.to_string() })
    })
}

impl FromStr for CurveConfig {
    type Err = CurveConfigError;

    /// Flat `key = value` file; `#` starts a comment; missing keys keep their
    /// defaults.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut cfg = CurveConfig::default();
        for (idx, raw) in s.lines().enumerate() {
            let line = idx + 1;
            let text = raw.split('#').next().unwrap_or("").trim();
            if text.is_empty() {
                continue;
            }
            let (key, value) =
                text.split_once('=').map(|(k, v)| (k.trim(), v.trim())).ok_or(CurveConfigError::Syntax { line })?;
            match key {
                "p0" => cfg.p0 = parse_value(line, key, value)?,
                "ratio" => cfg.ratio = parse_value(line, key, value)?,
                "tiers" => cfg.tiers = parse_value(line, key, value)?,
                "tier_allocation" => cfg.tier_allocation = parse_value(line, key, value)?,
                "total_supply" => cfg.total_supply = parse_value(line, key, value)?,
                "migrate_fraction" => cfg.migrate_fraction = parse_value(line, key, value)?,
                other => return Err(CurveConfigError::UnknownKey { line, key: other.to_string() }),
            }
        }
        cfg.build_curve()?;
        Ok(cfg)
    }
}
