use super::{sample_range, sample_size, ManipulatorAction, ScenarioConfig, SimError};
use crate::market::{AmmPool, Side};
use crate::risk::{PostBucket, PostSeries, POST_SERIES_LEN};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

pub(super) struct PostOutcome {
    pub series: PostSeries,
    pub actions: Vec<ManipulatorAction>,
}

#[derive(Default)]
struct Second {
    bucket: PostBucket,
    organic_buy: f64,
    organic_sell: f64,
}

fn swap(pool: &mut AmmPool, side: Side, amount: u128, sec: &mut Second) -> Option<(u128, u128)> {
    if amount == 0 {
        return None;
    }
    let trade = pool.swap(side, amount).ok()?;
    let base = trade.base_amount as f64;
    match side {
        Side::Buy => sec.bucket.buy_volume += base,
        Side::Sell => sec.bucket.sell_volume += base,
    }
    sec.bucket.tx_count += 1;
    Some((trade.token_amount, trade.base_amount))
}

fn tokens_for_base(pool: &AmmPool, base: f64) -> u128 {
    (base / pool.spot_price().to_f64()).max(0.0) as u128
}

/// One hour of pool trading at one-second resolution.
pub(super) fn simulate_post(
    rng: &mut ChaCha8Rng,
    cfg: &ScenarioConfig,
    mut pool: AmmPool,
    insider_tokens: u128,
    bot_inventory: u128,
) -> Result<PostOutcome, SimError> {
    let p_mig = pool.spot_price().to_f64();
    let x0 = pool.token_reserve() as f64;
    let flow = &cfg.post_flow;
    let arrivals = if flow.trade_rate > 0.0 {
        Some(Poisson::new(flow.trade_rate).map_err(|e| SimError::InvalidConfig(e.to_string()))?)
    } else {
        None
    };

    let mut unwind = cfg.unwind.as_ref().map(|u| {
        let target = sample_range(rng, u.target_ratio);
        let needed = x0 * (1.0 / target.sqrt() - 1.0);
        let allotment = needed.min(insider_tokens as f64 * 0.95).max(0.0) as u128;
        (allotment, allotment / u.chunks as u128, u.trigger_base as f64, 0.0f64)
    });

    struct Bot {
        lower: f64,
        upper: f64,
        step: f64,
        selling: bool,
        inventory: u128,
    }
    let mut bot = cfg.manipulator.as_ref().map(|m| Bot {
        lower: sample_range(rng, m.lower_band) * p_mig,
        upper: sample_range(rng, m.upper_band) * p_mig,
        step: sample_range(rng, m.step_fraction),
        selling: rng.random_bool(0.5),
        inventory: bot_inventory,
    });

    let mut buckets = Vec::with_capacity(POST_SERIES_LEN);
    let mut actions = Vec::new();
    for second in 0..POST_SERIES_LEN {
        let mut sec = Second::default();
        let n = arrivals.as_ref().map(|d| d.sample(rng) as u64).unwrap_or(0);
        for _ in 0..n {
            let size = sample_size(rng, &flow.size);
            if rng.random_bool(flow.buy_prob) {
                if let Some((_, base)) = swap(&mut pool, Side::Buy, size as u128, &mut sec) {
                    sec.organic_buy += base as f64;
                }
            } else {
                let tokens = tokens_for_base(&pool, size as f64);
                if let Some((_, base)) = swap(&mut pool, Side::Sell, tokens, &mut sec) {
                    sec.organic_sell += base as f64;
                }
            }
        }

        if let Some((remaining, chunk, trigger, since)) = unwind.as_mut() {
            *since += sec.organic_buy;
            while *remaining > 0 && *since >= *trigger {
                *since -= *trigger;
                let amount = (*chunk).min(*remaining).max(1);
                *remaining -= amount;
                swap(&mut pool, Side::Sell, amount, &mut sec);
            }
        }

        if let Some(b) = bot.as_mut() {
            let spot = pool.spot_price().to_f64();
            if b.selling && spot <= b.lower {
                b.selling = false;
            } else if !b.selling && spot >= b.upper {
                b.selling = true;
            }
            if b.selling {
                // sell into the buyers of this second plus a steady step
                let base = b.step * pool.base_reserve() as f64 + sec.organic_buy;
                let tokens = tokens_for_base(&pool, base).min(b.inventory);
                if let Some((tok, base)) = swap(&mut pool, Side::Sell, tokens, &mut sec) {
                    b.inventory -= tok;
                    actions.push(ManipulatorAction { second, side: Side::Sell, token_amount: tok, base_amount: base });
                }
            } else {
                // absorb the capitulating sellers
                let base = (b.step * pool.base_reserve() as f64 + sec.organic_sell) as u128;
                if let Some((tok, base)) = swap(&mut pool, Side::Buy, base, &mut sec) {
                    b.inventory += tok;
                    actions.push(ManipulatorAction { second, side: Side::Buy, token_amount: tok, base_amount: base });
                }
            }
        }

        sec.bucket.price = pool.spot_price().to_f64();
        sec.bucket.net_flow = sec.bucket.buy_volume - sec.bucket.sell_volume;
        buckets.push(sec.bucket);
    }
    Ok(PostOutcome { series: PostSeries::new(buckets)?, actions })
}
