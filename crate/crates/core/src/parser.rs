//! Balance-change transaction classifier.
//!
//! Every transaction is reduced to the net token/base deltas of the accounts
//! it touches. User accounts are anything not listed in `pool_accounts`
//! (curve vaults and AMM reserves). Wash trades keep net token deltas near
//! zero, so they are recognised from the per-leg `legs` transfers instead.

use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BalanceDelta {
    pub account: String,
    #[serde(default)]
    pub sol_delta: i64,
    #[serde(default)]
    pub token_delta: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Asset {
    Sol,
    Token,
}

/// One gross transfer inside a transaction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TransferLeg {
    pub from: String,
    pub to: String,
    pub asset: Asset,
    pub amount: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawTransaction {
    pub tx_id: String,
    pub slot_time: i64,
    pub signer: String,
    pub deltas: Vec<BalanceDelta>,
    #[serde(default)]
    pub involves_mint_instruction: bool,
    #[serde(default)]
    pub pool_accounts: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub legs: Vec<TransferLeg>,
}

impl RawTransaction {
    /// Base units that left the listed accounts (validator fees).
    pub fn fee_paid(&self) -> i64 {
        -self.deltas.iter().map(|d| d.sol_delta).sum::<i64>()
    }

    pub fn token_sum(&self) -> i64 {
        self.deltas.iter().map(|d| d.token_delta).sum()
    }

    pub fn is_pool(&self, account: &str) -> bool {
        self.pool_accounts.contains(account)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    Create,
    CreateAndBuy,
    Buy,
    Sell,
    Wash,
    Transfer,
    Unknown,
}

impl EventKind {
    pub const ALL: [EventKind; 7] = [
        EventKind::Create,
        EventKind::CreateAndBuy,
        EventKind::Buy,
        EventKind::Sell,
        EventKind::Wash,
        EventKind::Transfer,
        EventKind::Unknown,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            EventKind::Create => "create",
            EventKind::CreateAndBuy => "create_and_buy",
            EventKind::Buy => "buy",
            EventKind::Sell => "sell",
            EventKind::Wash => "wash",
            EventKind::Transfer => "transfer",
            EventKind::Unknown => "unknown",
        }
    }

    pub fn is_mint(&self) -> bool {
        matches!(self, EventKind::Create | EventKind::CreateAndBuy)
    }

    /// Whether the event is a swap against the curve or pool.
    pub fn is_trade(&self) -> bool {
        matches!(self, EventKind::CreateAndBuy | EventKind::Buy | EventKind::Sell | EventKind::Wash)
    }
}

impl fmt::Display for EventKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EventKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        EventKind::ALL.iter().find(|k| k.as_str() == s).copied().ok_or_else(|| format!("unknown event kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParsedEvent {
    pub tx_id: String,
    pub kind: EventKind,
    pub actor: String,
    /// Receiving account of a transfer.
    pub counterparty: Option<String>,
    /// Gross tokens moved (bought leg for washes).
    pub token_amount: u64,
    /// Gross base moved, fee excluded.
    pub base_amount: u64,
    /// Net token change of `actor`.
    pub net_token_delta: i64,
    pub timestamp: i64,
    pub diagnostic: Option<String>,
}

impl ParsedEvent {
    /// Base units per token, when the event is a priced trade.
    pub fn price(&self) -> Option<f64> {
        (self.kind.is_trade() && self.token_amount > 0 && self.base_amount > 0)
            .then(|| self.base_amount as f64 / self.token_amount as f64)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParserConfig {
    /// Token deltas with magnitude below this are treated as rounding noise.
    pub dust_tokens: u64,
}

impl ParserConfig {
    pub fn for_supply(total_supply: u64) -> Self {
        ParserConfig { dust_tokens: total_supply / 1_000_000 }
    }
}

impl Default for ParserConfig {
    fn default() -> Self {
        ParserConfig::for_supply(1_000_000_000)
    }
}

struct Ctx<'a> {
    tx: &'a RawTransaction,
    fee: i64,
}

impl Ctx<'_> {
    fn event(&self, kind: EventKind, actor: &str) -> ParsedEvent {
        ParsedEvent {
            tx_id: self.tx.tx_id.clone(),
            kind,
            actor: actor.to_string(),
            counterparty: None,
            token_amount: 0,
            base_amount: 0,
            net_token_delta: 0,
            timestamp: self.tx.slot_time,
            diagnostic: None,
        }
    }

    fn unknown(&self, reason: impl Into<String>) -> Vec<ParsedEvent> {
        let mut ev = self.event(EventKind::Unknown, &self.tx.signer);
        ev.diagnostic = Some(reason.into());
        vec![ev]
    }

    /// sol delta of `d` with the fee handed back to the signer.
    fn sol_ex_fee(&self, d: &BalanceDelta) -> i64 {
        if d.account == self.tx.signer {
            d.sol_delta + self.fee
        } else {
            d.sol_delta
        }
    }

    fn gross(&self, account: &str, asset: Asset, to_pool: bool) -> u64 {
        self.tx
            .legs
            .iter()
            .filter(|l| l.asset == asset)
            .filter(|l| {
                if to_pool {
                    l.from == account && self.tx.is_pool(&l.to)
                } else {
                    l.to == account && self.tx.is_pool(&l.from)
                }
            })
            .map(|l| l.amount)
            .sum()
    }
}

/// Net per-account deltas; duplicated accounts are merged.
fn net_deltas(tx: &RawTransaction) -> Vec<BalanceDelta> {
    let mut order: Vec<String> = Vec::new();
    let mut acc: BTreeMap<String, (i64, i64)> = BTreeMap::new();
    for d in &tx.deltas {
        let e = acc.entry(d.account.clone()).or_insert_with(|| {
            order.push(d.account.clone());
            (0, 0)
        });
        e.0 += d.sol_delta;
        e.1 += d.token_delta;
    }
    order
        .into_iter()
        .map(|a| {
            let (sol, tok) = acc[&a];
            BalanceDelta { account: a, sol_delta: sol, token_delta: tok }
        })
        .collect()
}

/// Classify one transaction into one or more events. Never returns an
/// empty list: unclassifiable shapes yield a single `Unknown` event.
pub fn parse_transaction(tx: &RawTransaction, cfg: &ParserConfig) -> Vec<ParsedEvent> {
    let ctx = Ctx { tx, fee: tx.fee_paid() };
    if ctx.fee < 0 {
        return ctx.unknown(format!("base asset created out of nothing ({})", -ctx.fee));
    }
    let dust = cfg.dust_tokens as i64;
    let deltas = net_deltas(tx);
    let users: Vec<&BalanceDelta> = deltas.iter().filter(|d| !tx.is_pool(&d.account)).collect();
    let active = |d: &&&BalanceDelta| d.token_delta.abs() >= dust.max(1);

    if tx.involves_mint_instruction {
        let buyers: Vec<&&BalanceDelta> = users.iter().filter(active).filter(|d| d.token_delta > 0).collect();
        if buyers.is_empty() {
            return vec![ctx.event(EventKind::Create, &tx.signer)];
        }
        return buyers
            .into_iter()
            .map(|d| {
                let mut ev = ctx.event(EventKind::CreateAndBuy, &d.account);
                ev.token_amount = d.token_delta as u64;
                ev.base_amount = (-ctx.sol_ex_fee(d)).max(0) as u64;
                ev.net_token_delta = d.token_delta;
                ev
            })
            .collect();
    }

    if tx.token_sum() != 0 {
        return ctx.unknown(format!("token deltas sum to {} without a mint", tx.token_sum()));
    }

    let pool_token: i64 = deltas.iter().filter(|d| tx.is_pool(&d.account)).map(|d| d.token_delta).sum();
    let mut events = Vec::new();
    let mut washers = BTreeSet::new();

    for d in &users {
        let bought = ctx.gross(&d.account, Asset::Token, false);
        let sold = ctx.gross(&d.account, Asset::Token, true);
        if bought > 0 && sold > 0 {
            washers.insert(d.account.as_str());
            let mut ev = ctx.event(EventKind::Wash, &d.account);
            ev.token_amount = bought;
            ev.base_amount = ctx.gross(&d.account, Asset::Sol, true);
            ev.net_token_delta = d.token_delta;
            events.push(ev);
        }
    }

    let movers: Vec<&&BalanceDelta> =
        users.iter().filter(active).filter(|d| !washers.contains(d.account.as_str())).collect();

    if pool_token.abs() >= dust.max(1) {
        for d in movers {
            let base = ctx.sol_ex_fee(d);
            let kind = match (d.token_delta > 0, base) {
                (true, b) if b < 0 => EventKind::Buy,
                (false, b) if b > 0 => EventKind::Sell,
                _ => {
                    return ctx.unknown(format!(
                        "account {} moved {} tokens against the pool without opposing base flow",
                        d.account, d.token_delta
                    ))
                }
            };
            let mut ev = ctx.event(kind, &d.account);
            ev.token_amount = d.token_delta.unsigned_abs();
            ev.base_amount = base.unsigned_abs();
            ev.net_token_delta = d.token_delta;
            events.push(ev);
        }
    } else if !movers.is_empty() {
        let senders: Vec<_> = movers.iter().filter(|d| d.token_delta < 0).collect();
        let receivers: Vec<_> = movers.iter().filter(|d| d.token_delta > 0).collect();
        if senders.len() != 1 || receivers.is_empty() {
            return ctx.unknown(format!(
                "{} senders and {} receivers in a user-to-user transfer",
                senders.len(),
                receivers.len()
            ));
        }
        let sender = &senders[0].account;
        for r in receivers {
            let mut ev = ctx.event(EventKind::Transfer, sender);
            ev.counterparty = Some(r.account.clone());
            ev.token_amount = r.token_delta as u64;
            ev.net_token_delta = -r.token_delta;
            events.push(ev);
        }
    }

    if events.is_empty() {
        return ctx.unknown("no token movement above the dust threshold");
    }
    events
}

/// Transaction-level class used for counting: mint > wash > buy > sell >
/// transfer > unknown.
pub fn classify_tx(events: &[ParsedEvent]) -> EventKind {
    const PRECEDENCE: [EventKind; 7] = [
        EventKind::CreateAndBuy,
        EventKind::Create,
        EventKind::Wash,
        EventKind::Buy,
        EventKind::Sell,
        EventKind::Transfer,
        EventKind::Unknown,
    ];
    PRECEDENCE.into_iter().find(|k| events.iter().any(|e| e.kind == *k)).unwrap_or(EventKind::Unknown)
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BreakdownReport {
    pub counts: BTreeMap<EventKind, usize>,
    pub total: usize,
    pub reordered: usize,
}

impl BreakdownReport {
    pub fn count(&self, kind: EventKind) -> usize {
        self.counts.get(&kind).copied().unwrap_or(0)
    }

    pub fn percentage(&self, kind: EventKind) -> f64 {
        if self.total == 0 {
            0.0
        } else {
            100.0 * self.count(kind) as f64 / self.total as f64
        }
    }

    /// Share of mint transactions that also bought in the same transaction.
    pub fn prebuy_rate(&self) -> Option<f64> {
        let mint = self.count(EventKind::Create) + self.count(EventKind::CreateAndBuy);
        (mint > 0).then(|| self.count(EventKind::CreateAndBuy) as f64 / mint as f64)
    }

    pub fn merge(&mut self, other: &BreakdownReport) {
        for (k, v) in &other.counts {
            *self.counts.entry(*k).or_default() += v;
        }
        self.total += other.total;
        self.reordered += other.reordered;
    }

    /// `(kind, count, percentage)` rows in taxonomy order.
    pub fn rows(&self) -> Vec<(EventKind, usize, f64)> {
        EventKind::ALL.iter().map(|k| (*k, self.count(*k), self.percentage(*k))).collect()
    }
}

#[derive(Debug, Clone, Default)]
pub struct CorpusParse {
    pub events: Vec<ParsedEvent>,
    pub report: BreakdownReport,
}

/// Parse one token's transaction stream. Out-of-order timestamps are fixed
/// with a stable sort and counted in `report.reordered`.
pub fn parse_corpus<I>(txs: I, cfg: &ParserConfig) -> CorpusParse
where
    I: IntoIterator<Item = RawTransaction>,
{
    let mut txs: Vec<RawTransaction> = txs.into_iter().collect();
    let reordered = txs.windows(2).filter(|w| w[1].slot_time < w[0].slot_time).count();
    if reordered > 0 {
        log::warn!("{reordered} transactions out of time order; re-sorting");
        txs.sort_by_key(|t| t.slot_time);
    }
    let mut out = CorpusParse::default();
    out.report.reordered = reordered;
    for tx in &txs {
        let events = parse_transaction(tx, cfg);
        *out.report.counts.entry(classify_tx(&events)).or_default() += 1;
        out.report.total += 1;
        out.events.extend(events);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn delta(account: &str, sol: i64, tok: i64) -> BalanceDelta {
        BalanceDelta { account: account.into(), sol_delta: sol, token_delta: tok }
    }

    fn tx(id: &str, t: i64, signer: &str, deltas: Vec<BalanceDelta>) -> RawTransaction {
        RawTransaction {
            tx_id: id.into(),
            slot_time: t,
            signer: signer.into(),
            deltas,
            involves_mint_instruction: false,
            pool_accounts: ["POOL".to_string()].into_iter().collect(),
            legs: vec![],
        }
    }

    fn leg(from: &str, to: &str, asset: Asset, amount: u64) -> TransferLeg {
        TransferLeg { from: from.into(), to: to.into(), asset, amount }
    }

    fn cfg() -> ParserConfig {
        ParserConfig { dust_tokens: 1 }
    }

    #[test]
    fn canonical_buy() {
        let t = tx("t", 1, "A", vec![delta("A", -10, 100), delta("POOL", 10, -100)]);
        let ev = parse_transaction(&t, &cfg());
        assert_eq!(ev.len(), 1);
        assert_eq!((ev[0].kind, ev[0].actor.as_str()), (EventKind::Buy, "A"));
        assert_eq!((ev[0].token_amount, ev[0].base_amount), (100, 10));
    }

    #[test]
    fn sell_with_fee_attributed_to_signer() {
        let t = tx("t", 1, "A", vec![delta("A", 15, -100), delta("POOL", -20, 100)]);
        let ev = parse_transaction(&t, &cfg());
        assert_eq!(ev[0].kind, EventKind::Sell);
        assert_eq!(ev[0].base_amount, 20);
        assert_eq!(ev[0].net_token_delta, -100);
    }

    #[test]
    fn mint_with_developer_purchase() {
        let mut t = tx("m", 0, "DEV", vec![delta("DEV", -3_000, 97_500_000), delta("POOL", 3_000, 902_500_000)]);
        t.involves_mint_instruction = true;
        let ev = parse_transaction(&t, &ParserConfig::default());
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, EventKind::CreateAndBuy);
        assert_eq!(ev[0].token_amount, 97_500_000);

        let mut plain = tx("m2", 0, "DEV", vec![delta("DEV", -5, 0), delta("POOL", 0, 1_000)]);
        plain.involves_mint_instruction = true;
        assert_eq!(parse_transaction(&plain, &cfg())[0].kind, EventKind::Create);
    }

    #[test]
    fn gross_legs_reveal_wash() {
        let mut t = tx("w", 1, "A", vec![delta("A", -5, 0), delta("POOL", 0, 0)]);
        t.legs = vec![
            leg("A", "POOL", Asset::Sol, 10),
            leg("POOL", "A", Asset::Token, 50),
            leg("A", "POOL", Asset::Token, 50),
            leg("POOL", "A", Asset::Sol, 10),
        ];
        let ev = parse_transaction(&t, &cfg());
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, EventKind::Wash);
        assert_eq!((ev[0].token_amount, ev[0].base_amount, ev[0].net_token_delta), (50, 10, 0));
    }

    #[test]
    fn user_to_user_transfer() {
        let t = tx("x", 1, "A", vec![delta("A", -5, -30), delta("B", 0, 30)]);
        let ev = parse_transaction(&t, &cfg());
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, EventKind::Transfer);
        assert_eq!(ev[0].counterparty.as_deref(), Some("B"));
        assert_eq!(ev[0].net_token_delta, -30);
    }

    #[test]
    fn multi_buyer_transaction_yields_one_buy_each() {
        let t = tx("b", 1, "A", vec![delta("A", -15, 100), delta("B", -20, 200), delta("POOL", 30, -300)]);
        let ev = parse_transaction(&t, &cfg());
        assert_eq!(ev.iter().filter(|e| e.kind == EventKind::Buy).count(), 2);
        assert_eq!(classify_tx(&ev), EventKind::Buy);
    }

    #[test]
    fn unclassifiable_is_reported() {
        // token inflow from the pool with no base paid
        let t = tx("u", 1, "A", vec![delta("A", -5, 100), delta("POOL", 0, -100)]);
        let ev = parse_transaction(&t, &cfg());
        assert_eq!(ev.len(), 1);
        assert_eq!(ev[0].kind, EventKind::Unknown);
        assert!(ev[0].diagnostic.is_some());

        let broken = tx("v", 1, "A", vec![delta("A", -5, 100)]);
        assert_eq!(parse_transaction(&broken, &cfg())[0].kind, EventKind::Unknown);

        let quiet = tx("q", 1, "A", vec![delta("A", -5, 0)]);
        assert_eq!(parse_transaction(&quiet, &cfg())[0].kind, EventKind::Unknown);
    }

    #[test]
    fn dust_is_ignored() {
        let t = tx("d", 1, "A", vec![delta("A", -10, 100), delta("POOL", 10, -100)]);
        let ev = parse_transaction(&t, &ParserConfig { dust_tokens: 1_000 });
        assert_eq!(ev[0].kind, EventKind::Unknown);
    }

    #[test]
    fn corpus_breakdown() {
        let buy = tx("1", 1, "A", vec![delta("A", -10, 100), delta("POOL", 10, -100)]);
        let sell = tx("2", 2, "A", vec![delta("A", 9, -50), delta("POOL", -10, 50)]);
        let xfer = tx("3", 3, "A", vec![delta("A", -1, -30), delta("B", 0, 30)]);
        let mut mint = tx("0", 4, "D", vec![delta("D", -1, 0), delta("POOL", 0, 1000)]);
        mint.involves_mint_instruction = true;
        let out = parse_corpus(vec![buy, sell, xfer, mint], &cfg());
        assert_eq!(out.report.total, 4);
        assert_eq!(out.report.reordered, 0);
        for k in [EventKind::Create, EventKind::Buy, EventKind::Sell, EventKind::Transfer] {
            assert_eq!(out.report.percentage(k), 25.0);
        }
        assert_eq!(out.report.prebuy_rate(), Some(0.0));
    }

    #[test]
    fn out_of_order_is_sorted() {
        let a = tx("a", 5, "A", vec![delta("A", -10, 100), delta("POOL", 10, -100)]);
        let b = tx("b", 2, "B", vec![delta("B", -10, 100), delta("POOL", 10, -100)]);
        let out = parse_corpus(vec![a, b], &cfg());
        assert_eq!(out.report.reordered, 1);
        assert_eq!(out.events[0].tx_id, "b");
    }

    #[test]
    fn empty_corpus() {
        let out = parse_corpus(Vec::new(), &cfg());
        assert_eq!(out.report.total, 0);
        assert!(out.events.is_empty());
        assert_eq!(out.report.percentage(EventKind::Buy), 0.0);
    }
}
