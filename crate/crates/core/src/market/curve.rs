use super::{MarketError, Price, Side, Trade};

/// Stepwise bonding curve. Each tier holds `tier_allocation` tokens at a
/// fixed integer price; tiers are consumed in order and refunded LIFO.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BondingCurve {
    tier_prices: Vec<u128>,
    tier_allocation: u128,
    sold: u128,
}

/// Result of a purchase: the fill and whatever part of the budget could not
/// be spent.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveBuy {
    pub trade: Trade,
    pub leftover: u128,
}

impl BondingCurve {
    pub fn new(tier_prices: Vec<u128>, tier_allocation: u128) -> Result<Self, MarketError> {
        if tier_prices.is_empty() {
            return Err(MarketError::InvalidConfig("curve needs at least one tier".into()));
        }
        if tier_allocation == 0 {
            return Err(MarketError::InvalidConfig("tier allocation must be positive".into()));
        }
        if tier_prices[0] == 0 {
            return Err(MarketError::InvalidConfig("tier prices must be positive".into()));
        }
        if tier_prices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(MarketError::InvalidConfig("tier prices must be strictly increasing".into()));
        }
        Ok(BondingCurve { tier_prices, tier_allocation, sold: 0 })
    }

    /// Same curve with `sold` tokens already consumed.
    pub fn with_sold(mut self, sold: u128) -> Result<Self, MarketError> {
        if sold > self.total_curve_supply() {
            return Err(MarketError::InvalidConfig(format!(
                "sold {sold} exceeds curve supply {}",
                self.total_curve_supply()
            )));
        }
        self.sold = sold;
        Ok(self)
    }

    pub fn tier_prices(&self) -> &[u128] {
        &self.tier_prices
    }

    pub fn tier_allocation(&self) -> u128 {
        self.tier_allocation
    }

    pub fn sold(&self) -> u128 {
        self.sold
    }

    pub fn total_curve_supply(&self) -> u128 {
        self.tier_allocation * self.tier_prices.len() as u128
    }

    pub fn remaining(&self) -> u128 {
        self.total_curve_supply() - self.sold
    }

    pub fn is_sold_out(&self) -> bool {
        self.sold >= self.total_curve_supply()
    }

    /// Posted price of the next token.
    pub fn price(&self) -> Result<u128, MarketError> {
        if self.is_sold_out() {
            return Err(MarketError::SoldOut);
        }
        Ok(self.tier_prices[(self.sold / self.tier_allocation) as usize])
    }

    /// Base cost of the tokens between cumulative positions `from..to`.
    pub fn cost_between(&self, from: u128, to: u128) -> u128 {
        debug_assert!(from <= to && to <= self.total_curve_supply());
        let mut cost = 0;
        let mut pos = from;
        while pos < to {
            let tier = pos / self.tier_allocation;
            let tier_end = ((tier + 1) * self.tier_allocation).min(to);
            cost += (tier_end - pos) * self.tier_prices[tier as usize];
            pos = tier_end;
        }
        cost
    }

    pub fn buy(&mut self, base_budget: u128) -> Result<CurveBuy, MarketError> {
        self.buy_capped(base_budget, u128::MAX)
    }

    /// Greedy tier walk spending `base_budget`, taking at most `max_tokens`.
    pub fn buy_capped(&mut self, base_budget: u128, max_tokens: u128) -> Result<CurveBuy, MarketError> {
        if base_budget == 0 || max_tokens == 0 {
            return Err(MarketError::InvalidAmount);
        }
        if self.is_sold_out() {
            return Err(MarketError::SoldOut);
        }
        let limit = self.sold.saturating_add(max_tokens).min(self.total_curve_supply());
        let mut budget = base_budget;
        let mut pos = self.sold;
        while pos < limit {
            let tier = pos / self.tier_allocation;
            let price = self.tier_prices[tier as usize];
            let tier_end = ((tier + 1) * self.tier_allocation).min(limit);
            let take = (budget / price).min(tier_end - pos);
            budget -= take * price;
            pos += take;
            if pos < tier_end {
                break;
            }
        }
        let tokens = pos - self.sold;
        if tokens == 0 {
            return Err(MarketError::DustTrade);
        }
        let spent = base_budget - budget;
        self.sold = pos;
        Ok(CurveBuy { trade: Trade::new(Side::Buy, tokens, spent), leftover: budget })
    }

    /// Returns `token_amount` tokens to the curve, refunding at the prices of
    /// the most recently consumed tiers.
    pub fn sell(&mut self, token_amount: u128) -> Result<Trade, MarketError> {
        if token_amount == 0 {
            return Err(MarketError::InvalidAmount);
        }
        if token_amount > self.sold {
            return Err(MarketError::InsufficientInventory { requested: token_amount, available: self.sold });
        }
        let refund = self.cost_between(self.sold - token_amount, self.sold);
        self.sold -= token_amount;
        Ok(Trade::new(Side::Sell, token_amount, refund))
    }

    /// Migration fires once `migrate_fraction` of the curve supply is sold.
    pub fn check_migration(&self, migrate_fraction: f64) -> bool {
        self.sold >= self.migration_threshold(migrate_fraction)
    }

    pub fn migration_threshold(&self, migrate_fraction: f64) -> u128 {
        let exact = self.total_curve_supply() as f64 * migrate_fraction;
        let nearest = exact.round();
        if (exact - nearest).abs() < 1e-6 {
            nearest as u128
        } else {
            exact.ceil() as u128
        }
    }

    pub fn spot(&self) -> Result<Price, MarketError> {
        self.price().map(Price::from_integer)
    }
}
