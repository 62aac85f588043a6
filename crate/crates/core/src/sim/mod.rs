//! Deterministic launch lifecycle generator: creation, curve sale,
//! migration and one hour of pool trading, with the ground truth the
//! pipeline is checked against.

mod config;
mod corpus;
mod post;

pub use config::*;
pub use corpus::*;

use crate::bundle::{BundleTrace, CexList, IdentifierKind};
use crate::io::{LaunchRecord, MigrationRecord};
use crate::market::{AmmPool, BondingCurve, CurveConfig, MarketError, Side};
use crate::parser::{Asset, BalanceDelta, EventKind, RawTransaction, TransferLeg};
use crate::risk::{PostSeries, RiskError, RiskLevel};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp, StandardNormal};
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// 2024-12-01T00:00:00Z; simulated launches start within 90 days of it.
pub const EPOCH_TS: i64 = 1_733_011_200;
const START_SPREAD_S: u64 = 90 * 86_400;
const ORGANIC_JITO_SHARE: f64 = 0.3;

#[derive(Debug, Error, PartialEq)]
pub enum SimError {
    #[error("invalid scenario: {0}")]
    InvalidConfig(String),
    #[error("sale stalled at {sold} of {threshold} tokens after every buyer spent their budget")]
    NonMigrating { sold: u128, threshold: u128 },
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Risk(#[from] RiskError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthEvent {
    pub tx_id: String,
    pub actor: String,
    pub kind: EventKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ManipulatorAction {
    pub second: usize,
    pub side: Side,
    pub token_amount: u128,
    pub base_amount: u128,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GroundTruth {
    pub profile: Profile,
    pub level: RiskLevel,
    /// One entry per emitted event, in stream order.
    pub events: Vec<TruthEvent>,
    /// Accounts controlled by one entity (two or more accounts each).
    pub bundles: Vec<BTreeSet<String>>,
    /// Developer, snipers and bundled accounts.
    pub insiders: BTreeSet<String>,
    pub insider_tokens_at_migration: u128,
    pub manipulator_actions: Vec<ManipulatorAction>,
    pub fee_per_tx: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulatedLaunch {
    pub launch: LaunchRecord,
    pub migration: MigrationRecord,
    /// Curve-phase stream, creation first.
    pub transactions: Vec<RawTransaction>,
    pub migration_tx: RawTransaction,
    /// Funder and Jito traces (in-transaction traces come from the parser).
    pub traces: Vec<BundleTrace>,
    pub post: PostSeries,
    pub truth: GroundTruth,
    pub curve: CurveConfig,
    pub curve_account: String,
}

const BASE58: &[u8] = b"123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";

pub(crate) fn address(rng: &mut impl Rng, len: usize) -> String {
    (0..len).map(|_| *BASE58.choose(rng).expect("non-empty alphabet") as char).collect()
}

pub(crate) fn sample_size(rng: &mut impl Rng, d: &SizeDist) -> u64 {
    let z: f64 = StandardNormal.sample(rng);
    let v = d.median as f64 * (d.sigma * z).exp();
    (v.round() as u64).clamp(d.min, d.max)
}

fn sample_budget(rng: &mut impl Rng, b: &Budget) -> u64 {
    if b.max <= b.min {
        b.min
    } else {
        rng.random_range(b.min..=b.max)
    }
}

pub(crate) fn sample_range(rng: &mut impl Rng, r: (f64, f64)) -> f64 {
    if r.1 <= r.0 {
        r.0
    } else {
        rng.random_range(r.0..=r.1)
    }
}

fn validate(cfg: &ScenarioConfig) -> Result<(), SimError> {
    let bad = |m: &str| Err(SimError::InvalidConfig(m.to_string()));
    let probs = [
        cfg.developer.prebuy_prob,
        cfg.organic.sell_prob,
        cfg.organic.transfer_prob,
        cfg.organic.cex_funded,
        cfg.wash.rate,
        cfg.post_flow.buy_prob,
    ];
    if probs.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return bad("probabilities must lie in [0, 1]");
    }
    if cfg.wash.rate + cfg.organic.sell_prob + cfg.organic.transfer_prob >= 1.0 {
        return bad("wash, sell and transfer rates leave no room for buys");
    }
    if cfg.wash.rate > 0.0 && cfg.wash.accounts == 0 {
        return bad("wash rate set without wash accounts");
    }
    if !(cfg.organic.mean_gap_s > 0.0) || !(cfg.post_flow.trade_rate >= 0.0) {
        return bad("rates must be positive");
    }
    if cfg.insiders.bundles > 0 && cfg.insiders.split_factor == 0 {
        return bad("bundles need at least one account");
    }
    if let Some(u) = &cfg.unwind {
        if u.chunks == 0 || u.trigger_base == 0 || !(u.target_ratio.0 > 0.0 && u.target_ratio.1 <= 1.0) {
            return bad("unwind schedule needs chunks, a trigger and a target in (0, 1]");
        }
    }
    if let Some(m) = &cfg.manipulator {
        if !(m.lower_band.1 < m.upper_band.0) || !(m.step_fraction.0 > 0.0) {
            return bad("manipulator bands must be ordered and steps positive");
        }
    }
    if cfg.curve.total_supply > i64::MAX as u64 {
        return bad("total supply exceeds the delta range");
    }
    Ok(())
}

/// Curve-phase state shared by the agents.
struct Sale {
    rng: ChaCha8Rng,
    curve: BondingCurve,
    threshold: u128,
    dust: u128,
    fee: u64,
    total_supply: u128,
    vault: String,
    txs: Vec<RawTransaction>,
    truth: Vec<TruthEvent>,
    holdings: BTreeMap<String, u128>,
    vault_base: u128,
    traces: Vec<BundleTrace>,
}

impl Sale {
    fn migrated(&self) -> bool {
        self.curve.sold() >= self.threshold
    }

    fn fresh(&mut self) -> String {
        address(&mut self.rng, 44)
    }

    fn tx(&mut self, t: i64, signer: &str, deltas: Vec<BalanceDelta>, legs: Vec<TransferLeg>, mint: bool) -> String {
        let tx_id = address(&mut self.rng, 64);
        self.txs.push(RawTransaction {
            tx_id: tx_id.clone(),
            slot_time: t,
            signer: signer.to_string(),
            deltas,
            involves_mint_instruction: mint,
            pool_accounts: BTreeSet::from([self.vault.clone()]),
            legs,
        });
        tx_id
    }

    fn leg(from: &str, to: &str, asset: Asset, amount: u128) -> TransferLeg {
        TransferLeg { from: from.to_string(), to: to.to_string(), asset, amount: amount as u64 }
    }

    /// Curve buy capped at the migration threshold. A buy that would leave
    /// a sub-dust remainder is trimmed to leave exactly one dust quantum, so
    /// the sale always ends on the threshold.
    fn curve_buy(&mut self, budget: u64) -> Option<(u128, u128)> {
        let remaining = self.threshold.saturating_sub(self.curve.sold());
        if remaining == 0 {
            return None;
        }
        let snapshot = self.curve.clone();
        let attempt = |curve: &mut BondingCurve, cap: u128| {
            curve.buy_capped(budget as u128, cap).ok().map(|b| (b.trade.token_amount, b.trade.base_amount))
        };
        let mut fill = attempt(&mut self.curve, remaining);
        if let Some((tokens, _)) = fill {
            let left = remaining - tokens;
            if left > 0 && left < self.dust {
                self.curve = snapshot.clone();
                fill = if remaining >= 2 * self.dust { attempt(&mut self.curve, remaining - self.dust) } else { None };
            }
        }
        match fill {
            Some((tokens, spent)) if tokens >= self.dust => Some((tokens, spent)),
            _ => {
                self.curve = snapshot;
                None
            }
        }
    }

    /// One transaction in which every `(account, budget)` buys from the
    /// curve; `signer` pays the fee. Returns false when nothing filled.
    fn buy_tx(&mut self, t: i64, signer: &str, orders: &[(String, u64)]) -> bool {
        let mut fills = Vec::new();
        for (acct, budget) in orders {
            if let Some((tokens, spent)) = self.curve_buy(*budget) {
                fills.push((acct.clone(), tokens, spent));
            }
        }
        if fills.is_empty() {
            return false;
        }
        let mut deltas = Vec::new();
        let mut legs = Vec::new();
        let (mut tok_sum, mut base_sum) = (0u128, 0u128);
        let mut signer_seen = false;
        for (acct, tokens, spent) in &fills {
            let fee = if acct == signer && !signer_seen {
                signer_seen = true;
                self.fee as i64
            } else {
                0
            };
            deltas.push(BalanceDelta {
                account: acct.clone(),
                sol_delta: -(*spent as i64) - fee,
                token_delta: *tokens as i64,
            });
            legs.push(Self::leg(acct, &self.vault, Asset::Sol, *spent));
            legs.push(Self::leg(&self.vault, acct, Asset::Token, *tokens));
            tok_sum += tokens;
            base_sum += spent;
            *self.holdings.entry(acct.clone()).or_default() += tokens;
        }
        if !signer_seen {
            deltas
                .insert(0, BalanceDelta { account: signer.to_string(), sol_delta: -(self.fee as i64), token_delta: 0 });
        }
        deltas.push(BalanceDelta {
            account: self.vault.clone(),
            sol_delta: base_sum as i64,
            token_delta: -(tok_sum as i64),
        });
        self.vault_base += base_sum;
        let tx_id = self.tx(t, signer, deltas, legs, false);
        for (acct, _, _) in fills {
            self.truth.push(TruthEvent { tx_id: tx_id.clone(), actor: acct, kind: EventKind::Buy });
        }
        true
    }

    fn sell_tx(&mut self, t: i64, acct: &str, tokens: u128) -> bool {
        if tokens < self.dust || self.holdings.get(acct).copied().unwrap_or(0) < tokens {
            return false;
        }
        let Ok(trade) = self.curve.sell(tokens) else { return false };
        let refund = trade.base_amount;
        let deltas = vec![
            BalanceDelta {
                account: acct.to_string(),
                sol_delta: refund as i64 - self.fee as i64,
                token_delta: -(tokens as i64),
            },
            BalanceDelta { account: self.vault.clone(), sol_delta: -(refund as i64), token_delta: tokens as i64 },
        ];
        let legs =
            vec![Self::leg(acct, &self.vault, Asset::Token, tokens), Self::leg(&self.vault, acct, Asset::Sol, refund)];
        self.vault_base -= refund;
        *self.holdings.get_mut(acct).expect("checked above") -= tokens;
        let tx_id = self.tx(t, acct, deltas, legs, false);
        self.truth.push(TruthEvent { tx_id, actor: acct.to_string(), kind: EventKind::Sell });
        true
    }

    /// Buy and immediately sell the same tokens in one transaction.
    fn wash_tx(&mut self, t: i64, acct: &str, budget: u64) -> bool {
        let Some((tokens, spent)) = self.curve_buy(budget) else { return false };
        let refund = self.curve.sell(tokens).expect("just bought").base_amount;
        debug_assert_eq!(refund, spent);
        let deltas = vec![
            BalanceDelta {
                account: acct.to_string(),
                sol_delta: spent as i64 - refund as i64 - self.fee as i64,
                token_delta: 0,
            },
            BalanceDelta { account: self.vault.clone(), sol_delta: refund as i64 - spent as i64, token_delta: 0 },
        ];
        let legs = vec![
            Self::leg(acct, &self.vault, Asset::Sol, spent),
            Self::leg(&self.vault, acct, Asset::Token, tokens),
            Self::leg(acct, &self.vault, Asset::Token, tokens),
            Self::leg(&self.vault, acct, Asset::Sol, refund),
        ];
        let tx_id = self.tx(t, acct, deltas, legs, false);
        self.truth.push(TruthEvent { tx_id, actor: acct.to_string(), kind: EventKind::Wash });
        true
    }

    fn transfer_tx(&mut self, t: i64, from: &str, to: &str, tokens: u128) -> bool {
        if tokens < self.dust || self.holdings.get(from).copied().unwrap_or(0) < tokens {
            return false;
        }
        let deltas = vec![
            BalanceDelta { account: from.to_string(), sol_delta: -(self.fee as i64), token_delta: -(tokens as i64) },
            BalanceDelta { account: to.to_string(), sol_delta: 0, token_delta: tokens as i64 },
        ];
        let legs = vec![Self::leg(from, to, Asset::Token, tokens)];
        *self.holdings.get_mut(from).expect("checked above") -= tokens;
        *self.holdings.entry(to.to_string()).or_default() += tokens;
        let tx_id = self.tx(t, from, deltas, legs, false);
        self.truth.push(TruthEvent { tx_id, actor: from.to_string(), kind: EventKind::Transfer });
        true
    }

    fn trace(&mut self, account: &str, kind: IdentifierKind, id: &str) {
        self.traces.push(BundleTrace::new(account, kind, id));
    }
}

enum Early {
    Sniper(String, u64),
    Bundle(usize),
}

/// Run one launch end to end. The same config always yields the same output.
pub fn simulate_launch(cfg: &ScenarioConfig) -> Result<SimulatedLaunch, SimError> {
    validate(cfg)?;
    let curve_cfg = cfg.curve_config();
    let curve = curve_cfg.build_curve()?;
    let threshold = curve.migration_threshold(curve_cfg.migrate_fraction);
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mint = address(&mut rng, 44);
    let vault = address(&mut rng, 44);
    let amm = address(&mut rng, 44);
    let dev = address(&mut rng, 44);
    let authority = address(&mut rng, 44);
    let create_ts = EPOCH_TS + rng.random_range(0..START_SPREAD_S) as i64;
    let cex: Vec<String> = CexList::builtin().addresses.into_iter().collect();

    let mut sale = Sale {
        rng,
        curve,
        threshold,
        dust: (curve_cfg.total_supply / 1_000_000).max(1),
        fee: cfg.fee,
        total_supply: curve_cfg.total_supply,
        vault: vault.clone(),
        txs: Vec::new(),
        truth: Vec::new(),
        holdings: BTreeMap::new(),
        vault_base: 0,
        traces: Vec::new(),
    };
    let emit = cfg.emit;
    let mut insiders = BTreeSet::from([dev.clone()]);

    // stage 1: creation, usually with a developer pre-buy
    let mut create_deltas = Vec::new();
    let mut create_legs = Vec::new();
    let mut dev_tokens = 0u128;
    let mut dev_spent = 0u128;
    if sale.rng.random_bool(cfg.developer.prebuy_prob) {
        let budget = sample_budget(&mut sale.rng, &cfg.developer.budget);
        if let Some((tokens, spent)) = sale.curve_buy(budget) {
            dev_tokens = tokens;
            dev_spent = spent;
        }
    }
    create_deltas.push(BalanceDelta {
        account: dev.clone(),
        sol_delta: -(dev_spent as i64) - cfg.fee as i64,
        token_delta: dev_tokens as i64,
    });
    create_deltas.push(BalanceDelta {
        account: vault.clone(),
        sol_delta: dev_spent as i64,
        token_delta: (sale.total_supply - dev_tokens) as i64,
    });
    if dev_tokens > 0 {
        create_legs.push(Sale::leg(&dev, &vault, Asset::Sol, dev_spent));
        create_legs.push(Sale::leg(&vault, &dev, Asset::Token, dev_tokens));
        sale.holdings.insert(dev.clone(), dev_tokens);
    }
    sale.vault_base += dev_spent;
    let create_id = sale.tx(create_ts, &dev, create_deltas, create_legs, true);
    sale.truth.push(TruthEvent {
        tx_id: create_id,
        actor: dev.clone(),
        kind: if dev_tokens > 0 { EventKind::CreateAndBuy } else { EventKind::Create },
    });

    // insider wallets and their traces
    let mut bundles: Vec<Vec<(String, u64)>> = Vec::new();
    for b in 0..cfg.insiders.bundles {
        let funder = sale.fresh();
        let jito = sale.fresh();
        let total = sample_budget(&mut sale.rng, &cfg.insiders.bundle_budget);
        let weights: Vec<f64> = (0..cfg.insiders.split_factor).map(|_| sale.rng.random_range(0.5..1.5)).collect();
        let wsum: f64 = weights.iter().sum();
        let mut orders = Vec::new();
        for w in weights {
            let acct = sale.fresh();
            if emit.funder {
                sale.trace(&acct, IdentifierKind::Funder, &funder);
            }
            if emit.jito {
                sale.trace(&acct, IdentifierKind::Jito, &jito);
            }
            insiders.insert(acct.clone());
            orders.push((acct, (total as f64 * w / wsum) as u64));
        }
        if b == 0 && cfg.developer.joins_bundle && emit.funder {
            sale.trace(&dev, IdentifierKind::Funder, &funder);
        }
        bundles.push(orders);
    }
    if !(cfg.developer.joins_bundle && cfg.insiders.bundles > 0) && emit.funder {
        let funder = sale.fresh();
        sale.trace(&dev, IdentifierKind::Funder, &funder);
    }

    let mut truth_bundles: Vec<BTreeSet<String>> =
        bundles.iter().map(|orders| orders.iter().map(|(a, _)| a.clone()).collect()).collect();
    if cfg.developer.joins_bundle {
        if let Some(first) = truth_bundles.first_mut() {
            first.insert(dev.clone());
        }
    }
    truth_bundles.retain(|b| b.len() >= 2);

    // stage 2a: snipers and bundles in the first seconds, seeded order
    let mut early: Vec<(i64, u64, Early)> = Vec::new();
    for _ in 0..cfg.insiders.snipers {
        let acct = sale.fresh();
        if emit.funder {
            let f = sale.fresh();
            sale.trace(&acct, IdentifierKind::Funder, &f);
        }
        insiders.insert(acct.clone());
        let budget = sample_budget(&mut sale.rng, &cfg.insiders.sniper_budget);
        early.push((create_ts + sale.rng.random_range(0..=2), sale.rng.random(), Early::Sniper(acct, budget)));
    }
    for b in 0..bundles.len() {
        early.push((create_ts + sale.rng.random_range(0..=1), sale.rng.random(), Early::Bundle(b)));
    }
    early.sort_by_key(|(t, prio, _)| (*t, *prio));
    for (t, _, action) in early {
        match action {
            Early::Sniper(acct, budget) => {
                sale.buy_tx(t, &acct.clone(), &[(acct, budget)]);
            }
            Early::Bundle(b) => {
                let orders = bundles[b].clone();
                if emit.in_tx {
                    let signer = orders[0].0.clone();
                    sale.buy_tx(t, &signer, &orders);
                } else {
                    for order in orders {
                        sale.buy_tx(t, &order.0.clone(), &[order]);
                    }
                }
            }
        }
    }

    // stage 2b: organic agents until the migration threshold
    let wash_accounts: Vec<String> = (0..cfg.wash.accounts).map(|_| sale.fresh()).collect();
    if emit.funder {
        for w in &wash_accounts {
            let f = sale.fresh();
            sale.trace(w, IdentifierKind::Funder, &f);
        }
    }
    let gap = Exp::new(1.0 / cfg.organic.mean_gap_s).map_err(|e| SimError::InvalidConfig(e.to_string()))?;
    let mut organic_left = cfg.organic.buyers;
    let mut holders: Vec<String> = Vec::new();
    let mut t = create_ts + 3;
    let o = &cfg.organic;
    while !sale.migrated() {
        t += gap.sample(&mut sale.rng).floor() as i64;
        let u: f64 = sale.rng.random();
        if u < cfg.wash.rate {
            let acct = wash_accounts.choose(&mut sale.rng).expect("validated").clone();
            let budget = sample_size(&mut sale.rng, &cfg.wash.size);
            sale.wash_tx(t, &acct, budget);
        } else if u < cfg.wash.rate + o.transfer_prob {
            if let Some(from) = holders.choose(&mut sale.rng).cloned() {
                let bal = sale.holdings[&from];
                let amount = (bal as f64 * sale.rng.random_range(0.1..0.6)) as u128;
                let to = sale.fresh();
                if sale.transfer_tx(t, &from, &to, amount) {
                    holders.push(to);
                }
            }
        } else if u < cfg.wash.rate + o.transfer_prob + o.sell_prob {
            if !holders.is_empty() {
                let i = sale.rng.random_range(0..holders.len());
                let acct = holders[i].clone();
                let bal = sale.holdings[&acct];
                let amount = if sale.rng.random_bool(0.4) {
                    bal
                } else {
                    (bal as f64 * sale.rng.random_range(0.2..0.8)) as u128
                };
                if sale.sell_tx(t, &acct, amount) && sale.holdings[&acct] == 0 {
                    holders.swap_remove(i);
                }
            }
        } else {
            if organic_left == 0 {
                return Err(SimError::NonMigrating { sold: sale.curve.sold(), threshold });
            }
            organic_left -= 1;
            let acct = sale.fresh();
            if emit.funder {
                if sale.rng.random_bool(o.cex_funded) {
                    let f = cex.choose(&mut sale.rng).expect("builtin list").clone();
                    sale.trace(&acct, IdentifierKind::Funder, &f);
                } else {
                    let f = sale.fresh();
                    sale.trace(&acct, IdentifierKind::Funder, &f);
                }
            }
            if emit.jito && sale.rng.random_bool(ORGANIC_JITO_SHARE) {
                let j = sale.fresh();
                sale.trace(&acct, IdentifierKind::Jito, &j);
            }
            let budget = sample_size(&mut sale.rng, &o.buy_size);
            if sale.buy_tx(t, &acct, &[(acct.clone(), budget)]) {
                holders.push(acct);
            }
        }
    }
    let migrate_ts = t + 1;

    // stage 3: migration
    let pool_tokens = sale.total_supply - sale.curve.sold();
    let pool_base = sale.vault_base;
    let migration_tx = RawTransaction {
        tx_id: address(&mut sale.rng, 64),
        slot_time: migrate_ts,
        signer: authority.clone(),
        deltas: vec![
            BalanceDelta { account: authority.clone(), sol_delta: -(cfg.fee as i64), token_delta: 0 },
            BalanceDelta { account: vault.clone(), sol_delta: -(pool_base as i64), token_delta: -(pool_tokens as i64) },
            BalanceDelta { account: amm.clone(), sol_delta: pool_base as i64, token_delta: pool_tokens as i64 },
        ],
        involves_mint_instruction: false,
        pool_accounts: BTreeSet::from([vault.clone(), amm.clone()]),
        legs: vec![Sale::leg(&vault, &amm, Asset::Token, pool_tokens), Sale::leg(&vault, &amm, Asset::Sol, pool_base)],
    };
    let pool = AmmPool::new(pool_tokens, pool_base)?;
    let migration_price = pool.spot_price().to_f64();

    let insider_tokens: u128 = insiders.iter().map(|a| sale.holdings.get(a).copied().unwrap_or(0)).sum();
    let bot_inventory: u128 =
        bundles.first().map(|b| b.iter().map(|(a, _)| sale.holdings.get(a).copied().unwrap_or(0)).sum()).unwrap_or(0);

    // stage 4: one hour on the pool
    let outcome = post::simulate_post(&mut sale.rng, cfg, pool, insider_tokens, bot_inventory)?;

    let mut symbol = String::new();
    for _ in 0..sale.rng.random_range(3..=5) {
        symbol.push(sale.rng.random_range(b'A'..=b'Z') as char);
    }
    let uri = format!("ipfs://{}", address(&mut sale.rng, 46));
    let launch = LaunchRecord {
        mint: mint.clone(),
        name: format!("{symbol} coin"),
        symbol,
        uri,
        creator: dev.clone(),
        create_ts,
        migrate_ts,
        amm_address: amm,
    };
    let migration = MigrationRecord {
        mint,
        migrate_ts,
        token_reserve: pool_tokens as u64,
        base_reserve: pool_base as u64,
        migration_price,
    };
    Ok(SimulatedLaunch {
        launch,
        migration,
        transactions: sale.txs,
        migration_tx,
        traces: sale.traces,
        post: outcome.series,
        truth: GroundTruth {
            profile: cfg.profile,
            level: cfg.profile.true_level(),
            events: sale.truth,
            bundles: truth_bundles,
            insiders,
            insider_tokens_at_migration: insider_tokens,
            manipulator_actions: outcome.actions,
            fee_per_tx: cfg.fee,
        },
        curve: curve_cfg,
        curve_account: vault,
    })
}

#[cfg(test)]
mod tests;
