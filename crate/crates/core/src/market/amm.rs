use super::{MarketError, Price, Side, Trade};

/// Direction of a pool swap from the trader's point of view.
pub type SwapSide = Side;

/// Constant-product pool holding `token_reserve` (x) and `base_reserve` (y).
///
/// Outputs are rounded down so the product never decreases; `k` tracks the
/// product after the latest swap and grows by at most one rounding quantum
/// per swap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AmmPool {
    token_reserve: u128,
    base_reserve: u128,
    k: u128,
}

impl AmmPool {
    pub fn new(token_reserve: u128, base_reserve: u128) -> Result<Self, MarketError> {
        if token_reserve == 0 || base_reserve == 0 {
            return Err(MarketError::InvalidConfig("pool reserves must be positive".into()));
        }
        let k = token_reserve
            .checked_mul(base_reserve)
            .ok_or_else(|| MarketError::InvalidConfig("reserve product overflows".into()))?;
        Ok(AmmPool { token_reserve, base_reserve, k })
    }

    pub fn token_reserve(&self) -> u128 {
        self.token_reserve
    }

    pub fn base_reserve(&self) -> u128 {
        self.base_reserve
    }

    pub fn k(&self) -> u128 {
        self.k
    }

    pub fn spot_price(&self) -> Price {
        Price::new(self.base_reserve, self.token_reserve)
    }

    /// `Sell` pushes tokens in and takes base out; `Buy` pushes base in and
    /// takes tokens out.
    pub fn swap(&mut self, side: SwapSide, amount_in: u128) -> Result<Trade, MarketError> {
        if amount_in == 0 {
            return Err(MarketError::InvalidAmount);
        }
        let (reserve_in, reserve_out) = match side {
            Side::Sell => (self.token_reserve, self.base_reserve),
            Side::Buy => (self.base_reserve, self.token_reserve),
        };
        let new_in = reserve_in.checked_add(amount_in).ok_or(MarketError::InvalidAmount)?;
        let new_out = self.k.div_ceil(new_in);
        let amount_out = reserve_out - new_out;
        if amount_out == 0 {
            return Err(MarketError::DustTrade);
        }
        let trade = match side {
            Side::Sell => {
                self.token_reserve = new_in;
                self.base_reserve = new_out;
                Trade::new(Side::Sell, amount_in, amount_out)
            }
            Side::Buy => {
                self.base_reserve = new_in;
                self.token_reserve = new_out;
                Trade::new(Side::Buy, amount_out, amount_in)
            }
        };
        self.k = self.token_reserve * self.base_reserve;
        Ok(trade)
    }

    /// Tokens a buyer would receive for `base_in`, without mutating the pool.
    pub fn quote(&self, side: SwapSide, amount_in: u128) -> Result<Trade, MarketError> {
        let mut probe = *self;
        probe.swap(side, amount_in)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sell_forced_by_invariant() {
        let mut pool = AmmPool::new(100, 100).unwrap();
        let t = pool.swap(Side::Sell, 100).unwrap();
        assert_eq!(t.base_amount, 50);
        assert_eq!((pool.token_reserve(), pool.base_reserve()), (200, 50));
    }

    #[test]
    fn buy_symmetric() {
        let mut pool = AmmPool::new(100, 100).unwrap();
        let t = pool.swap(Side::Buy, 100).unwrap();
        assert_eq!(t.token_amount, 50);
        assert_eq!((pool.token_reserve(), pool.base_reserve()), (50, 200));
    }

    #[test]
    fn split_sells_return_less() {
        // one sell of 100: 100*100/(200) -> 50 out.
        // two sells of 50: ceil(10000/150)=67 -> 33 out, k=150*67=10050;
        // ceil(10050/200)=51 -> 16 out.
        let mut single = AmmPool::new(100, 100).unwrap();
        let one = single.swap(Side::Sell, 100).unwrap().base_amount;
        let mut split = AmmPool::new(100, 100).unwrap();
        let a = split.swap(Side::Sell, 50).unwrap().base_amount;
        let b = split.swap(Side::Sell, 50).unwrap().base_amount;
        assert_eq!((one, a, b), (50, 33, 16));
        assert!(a + b < one);
    }

    #[test]
    fn spot_prices() {
        assert_eq!(AmmPool::new(100, 100).unwrap().spot_price().to_f64(), 1.0);
        assert_eq!(AmmPool::new(200, 100).unwrap().spot_price().to_f64(), 0.5);
        let mut pool = AmmPool::new(100, 100).unwrap();
        let before = pool.spot_price();
        pool.swap(Side::Buy, 10).unwrap();
        assert!(pool.spot_price() > before);
        let mid = pool.spot_price();
        pool.swap(Side::Sell, 10).unwrap();
        assert!(pool.spot_price() < mid);
    }

    #[test]
    fn dust_and_zero() {
        let mut pool = AmmPool::new(1_000_000, 10).unwrap();
        assert_eq!(pool.swap(Side::Sell, 1), Err(MarketError::DustTrade));
        assert_eq!(pool.swap(Side::Buy, 0), Err(MarketError::InvalidAmount));
        assert_eq!(pool, AmmPool::new(1_000_000, 10).unwrap());
    }

    #[test]
    fn rejects_empty_reserves() {
        assert!(AmmPool::new(0, 1).is_err());
        assert!(AmmPool::new(1, 0).is_err());
    }
}
