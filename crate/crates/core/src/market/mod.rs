//! Launchpad market primitives: the stepwise bonding curve used during the
//! launchpad sale and the constant-product pool that takes over after
//! migration.
//!
//! All token and base-asset amounts are integers in minimal units. Prices are
//! exact rationals (base units per token unit).

mod amm;
mod config;
mod curve;

pub use amm::{AmmPool, SwapSide};
pub use config::{CurveConfig, CurveConfigError};
pub use curve::{BondingCurve, CurveBuy};

use num_rational::Ratio;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

/// Base units per token unit, kept exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Price(Ratio<u128>);

impl Price {
    pub fn new(base: u128, tokens: u128) -> Self {
        assert!(tokens > 0, "price with zero token denominator");
        Price(Ratio::new(base, tokens))
    }

    pub fn from_integer(base_per_token: u128) -> Self {
        Price(Ratio::from_integer(base_per_token))
    }

    pub fn ratio(&self) -> Ratio<u128> {
        self.0
    }

    pub fn to_f64(&self) -> f64 {
        *self.0.numer() as f64 / *self.0.denom() as f64
    }
}

impl fmt::Display for Price {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    Buy,
    Sell,
}

/// One fill against the curve or the pool.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Trade {
    pub side: Side,
    pub token_amount: u128,
    pub base_amount: u128,
    pub unit_price: Price,
}

impl Trade {
    pub(crate) fn new(side: Side, token_amount: u128, base_amount: u128) -> Self {
        debug_assert!(token_amount > 0 && base_amount > 0);
        Trade { side, token_amount, base_amount, unit_price: Price::new(base_amount, token_amount) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MarketError {
    #[error("curve is sold out")]
    SoldOut,
    #[error("amount must be positive")]
    InvalidAmount,
    #[error("cannot sell {requested} tokens, only {available} sold on the curve")]
    InsufficientInventory { requested: u128, available: u128 },
    #[error("trade output rounds to zero")]
    DustTrade,
    #[error("invalid market configuration: {0}")]
    InvalidConfig(String),
}
