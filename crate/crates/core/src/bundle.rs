//! Same-entity account clustering from bundle traces.
//!
//! Accounts and identifiers form a bipartite graph; accounts that share any
//! identifier end up in the same component. Components with at least two
//! accounts are bundles.

use crate::parser::{EventKind, ParsedEvent};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IdentifierKind {
    InTx,
    Funder,
    Jito,
}

impl IdentifierKind {
    pub const ALL: [IdentifierKind; 3] = [IdentifierKind::InTx, IdentifierKind::Funder, IdentifierKind::Jito];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentifierKind::InTx => "in_tx",
            IdentifierKind::Funder => "funder",
            IdentifierKind::Jito => "jito",
        }
    }
}

impl fmt::Display for IdentifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IdentifierKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IdentifierKind::ALL
            .iter()
            .find(|k| k.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown identifier kind `{s}`"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BundleTrace {
    pub account: String,
    pub identifier_kind: IdentifierKind,
    pub identifier: String,
}

impl BundleTrace {
    pub fn new(account: impl Into<String>, kind: IdentifierKind, identifier: impl Into<String>) -> Self {
        BundleTrace { account: account.into(), identifier_kind: kind, identifier: identifier.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Bundle {
    pub bundle_id: usize,
    pub accounts: BTreeSet<String>,
    pub evidence: BTreeSet<(IdentifierKind, String)>,
}

/// Known exchange hot wallets whose withdrawals say nothing about ownership.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CexList {
    pub addresses: BTreeSet<String>,
}

impl CexList {
    pub fn new<I, S>(addresses: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        CexList { addresses: addresses.into_iter().map(Into::into).collect() }
    }

    /// Built-in list of widely used exchange withdrawal wallets.
    pub fn builtin() -> Self {
        CexList::new([
            "5tzFkiKscXHK5ZXCGbXZxdw7gTjjD1mBwuoFbhUvuAi9", // Binance 2
            "9WzDXwBbmkg8ZTbNMqUxvQRAyrZzDsGYdLVL9zYtAWWM", // Binance hot
            "2AQdpHJ2JpcEgPiATUXjQxA8QmafFegfQwSLWSprPicm", // Coinbase 2
            "H8sMJSCQxfKiFTCfDR3DUMLPwcRbM61LGFJ8N4dK3WjS", // Coinbase 1
            "FWznbcNXWQuHTawe9RxvQ2LdCENssh12dsznf4RiouN5", // Kraken
            "5VCwKtCXgCJ6kit5FybXjvriW3xELsFDhYrPSqtJNmcD", // OKX
            "AC5RDfQFmDS1deWZos921JfqscXdByf8BKHs5ACWjtW2", // Bybit
        ])
    }

    pub fn contains(&self, address: &str) -> bool {
        self.addresses.contains(address)
    }

    /// One address per line, `#` comments allowed.
    pub fn parse(text: &str) -> Self {
        CexList::new(
            text.lines()
                .map(|l| l.split('#').next().unwrap_or("").trim())
                .filter(|l| !l.is_empty())
                .map(str::to_string),
        )
    }

    pub fn extend(&mut self, other: CexList) {
        self.addresses.extend(other.addresses);
    }
}

/// Disjoint-set forest with path compression. The root of every set is its
/// smallest node index, which keeps results independent of union order.
#[derive(Debug, Clone)]
pub struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub fn find(&mut self, mut node: usize) -> usize {
        let mut root = node;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        while self.parent[node] != root {
            let next = self.parent[node];
            self.parent[node] = root;
            node = next;
        }
        root
    }

    pub fn union(&mut self, a: usize, b: usize) -> usize {
        let ra = self.find(a);
        let rb = self.find(b);
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        lo
    }
}

/// Cluster accounts that share identifiers. Funder traces pointing at a
/// known exchange are dropped first. Bundle ids follow the order of each
/// bundle's smallest account address.
pub fn cluster(traces: &[BundleTrace], cex: &CexList) -> Vec<Bundle> {
    let kept: BTreeSet<&BundleTrace> = traces
        .iter()
        .filter(|t| !t.identifier.is_empty())
        .filter(|t| !(t.identifier_kind == IdentifierKind::Funder && cex.contains(&t.identifier)))
        .collect();

    // Sorted node indices: accounts first, then identifiers.
    let accounts: BTreeSet<&str> = kept.iter().map(|t| t.account.as_str()).collect();
    let idents: BTreeSet<(IdentifierKind, &str)> =
        kept.iter().map(|t| (t.identifier_kind, t.identifier.as_str())).collect();
    let account_idx: HashMap<&str, usize> = accounts.iter().enumerate().map(|(i, a)| (*a, i)).collect();
    let ident_idx: HashMap<(IdentifierKind, &str), usize> =
        idents.iter().enumerate().map(|(i, k)| (*k, accounts.len() + i)).collect();

    let mut uf = UnionFind::new(accounts.len() + idents.len());
    for t in &kept {
        uf.union(account_idx[t.account.as_str()], ident_idx[&(t.identifier_kind, t.identifier.as_str())]);
    }

    let mut groups: BTreeMap<usize, Bundle> = BTreeMap::new();
    for (i, a) in accounts.iter().enumerate() {
        let root = uf.find(i);
        groups
            .entry(root)
            .or_insert_with(|| Bundle { bundle_id: 0, accounts: BTreeSet::new(), evidence: BTreeSet::new() })
            .accounts
            .insert(a.to_string());
    }
    for t in &kept {
        let root = uf.find(account_idx[t.account.as_str()]);
        if let Some(b) = groups.get_mut(&root) {
            b.evidence.insert((t.identifier_kind, t.identifier.clone()));
        }
    }

    // Roots are account indices (accounts sort before identifiers and every
    // component contains an account), so BTreeMap order is already the
    // smallest-member order.
    groups
        .into_values()
        .filter(|b| b.accounts.len() >= 2)
        .enumerate()
        .map(|(i, mut b)| {
            b.bundle_id = i;
            b
        })
        .collect()
}

/// Accounts buying together in one transaction share the transaction id.
pub fn extract_in_tx_traces(events: &[ParsedEvent]) -> Vec<BundleTrace> {
    let mut by_tx: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for e in events {
        if matches!(e.kind, EventKind::Buy | EventKind::CreateAndBuy) {
            by_tx.entry(e.tx_id.as_str()).or_default().insert(e.actor.as_str());
        }
    }
    let mut traces = Vec::new();
    // keep transaction order of first appearance
    let mut seen = BTreeSet::new();
    for e in events {
        if !seen.insert(e.tx_id.as_str()) {
            continue;
        }
        if let Some(actors) = by_tx.get(e.tx_id.as_str()) {
            if actors.len() >= 2 {
                traces.extend(actors.iter().map(|a| BundleTrace::new(*a, IdentifierKind::InTx, e.tx_id.clone())));
            }
        }
    }
    traces
}

/// Sort and drop duplicate traces.
pub fn dedup_traces(traces: &mut Vec<BundleTrace>) {
    traces.sort();
    traces.dedup();
}

/// Each bundle as a list of its own traces; clustering these reproduces the
/// partition.
pub fn bundles_as_traces(bundles: &[Bundle]) -> Vec<BundleTrace> {
    bundles
        .iter()
        .flat_map(|b| {
            b.accounts
                .iter()
                .map(move |a| BundleTrace::new(a.clone(), IdentifierKind::InTx, format!("bundle-{}", b.bundle_id)))
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BundleStats {
    pub bundle_holder_ratio: Option<f64>,
    pub bundle_holding_pct: Option<f64>,
}

/// Share of holders that sit in some bundle and share of circulating supply
/// they hold. Undefined (None) with no holders or zero supply.
pub fn bundle_stats(bundles: &[Bundle], holdings: &BTreeMap<String, u64>, circulating: u64) -> BundleStats {
    let holders: Vec<(&String, u64)> = holdings.iter().filter(|(_, v)| **v > 0).map(|(k, v)| (k, *v)).collect();
    if holders.is_empty() {
        return BundleStats { bundle_holder_ratio: None, bundle_holding_pct: None };
    }
    let bundled: BTreeSet<&str> = bundles.iter().flat_map(|b| b.accounts.iter().map(String::as_str)).collect();
    let in_bundle: Vec<u64> = holders.iter().filter(|(a, _)| bundled.contains(a.as_str())).map(|(_, v)| *v).collect();
    BundleStats {
        bundle_holder_ratio: Some(in_bundle.len() as f64 / holders.len() as f64),
        bundle_holding_pct: (circulating > 0).then(|| in_bundle.iter().sum::<u64>() as f64 / circulating as f64),
    }
}

/// Map from account to the bundle that contains it.
pub fn membership(bundles: &[Bundle]) -> HashMap<&str, usize> {
    bundles.iter().flat_map(|b| b.accounts.iter().map(move |a| (a.as_str(), b.bundle_id))).collect()
}
