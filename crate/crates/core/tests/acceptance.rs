//! Acceptance runner. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any fail.

use launchrisk::bundle::{bundles_as_traces, cluster, BundleTrace, CexList, IdentifierKind};
use launchrisk::io::{read_features, read_records, CorpusLayout, ManifestRow, OutputLayout};
use launchrisk::market::{AmmPool, CurveConfig, Side};
use launchrisk::parser::{parse_transaction, EventKind, ParserConfig};
use launchrisk::pipeline::{backtest_selection, load_candidates, load_labels, oracle_scores, random_scores};
use launchrisk::pipeline::{run_pipeline, Candidate, PipelineConfig};
use launchrisk::risk::{heuristic_manipulation_score, label, min_price_ratio, PostSeries, RiskLevel, Thresholds};
use launchrisk::sim::{simulate_corpus, simulate_launch, Profile, ProfileMix, ScenarioConfig, SimulatedLaunch};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::path::PathBuf;
use std::sync::OnceLock;
use std::time::Instant;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

const SEEDS: u64 = 100;

/// Every profile over seeds 0..100.
fn launches() -> &'static Vec<SimulatedLaunch> {
    static CELL: OnceLock<Vec<SimulatedLaunch>> = OnceLock::new();
    CELL.get_or_init(|| {
        let plan: Vec<ScenarioConfig> =
            Profile::ALL.iter().flat_map(|p| (0..SEEDS).map(|s| ScenarioConfig::preset(*p, s))).collect();
        plan.par_iter().map(|c| simulate_launch(c).expect("preset migrates")).collect()
    })
}

struct CorpusRun {
    _dir: tempfile::TempDir,
    corpus: PathBuf,
    out: PathBuf,
    mix: ProfileMix,
}

/// 200 launches with the default mix, through the whole pipeline.
fn corpus_run() -> &'static CorpusRun {
    static CELL: OnceLock<CorpusRun> = OnceLock::new();
    CELL.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let corpus = dir.path().join("corpus");
        let out = dir.path().join("out");
        let mix = ProfileMix::default();
        simulate_corpus(&corpus, 200, &mix, 7).unwrap();
        run_pipeline(&corpus, &out, &PipelineConfig::default()).unwrap();
        CorpusRun { _dir: dir, corpus, out, mix }
    })
}

fn parser_oracle() -> Outcome {
    let cfg = ParserConfig::default();
    let mut txs = 0;
    let mut events = 0;
    let mut ran = std::time::Duration::ZERO;
    for p in Profile::ALL {
        for seed in 0..3 {
            let l = simulate_launch(&ScenarioConfig::preset(p, 1000 + seed)).unwrap();
            let start = Instant::now();
            let got: Vec<(String, String, EventKind)> = l
                .transactions
                .iter()
                .flat_map(|t| parse_transaction(t, &cfg))
                .map(|e| (e.tx_id, e.actor, e.kind))
                .collect();
            ran += start.elapsed();
            let want: Vec<(String, String, EventKind)> =
                l.truth.events.iter().map(|e| (e.tx_id.clone(), e.actor.clone(), e.kind)).collect();
            ensure(got.len() == want.len(), || format!("{p}/{seed}: {} events, truth has {}", got.len(), want.len()))?;
            if let Some((g, w)) = got.iter().zip(&want).find(|(g, w)| g != w) {
                return Err(format!("{p}/{seed}: parsed {g:?}, truth {w:?}"));
            }
            txs += l.transactions.len();
            events += want.len();
        }
    }
    ensure(txs >= 1000, || format!("only {txs} transactions"))?;
    ensure(ran.as_secs_f64() < 10.0, || format!("parsing took {ran:?}"))?;
    Ok(format!("{events}/{events} events over {txs} transactions match, parse time {:.2}s", ran.as_secs_f64()))
}

fn conservation() -> Outcome {
    let mut violations = Vec::new();
    let mut checked = 0;
    for l in launches() {
        let supply = l.curve.total_supply as i64;
        let fee = l.truth.fee_per_tx as i64;
        let mut balances: BTreeMap<&str, i64> = BTreeMap::new();
        for tx in l.transactions.iter().chain([&l.migration_tx]) {
            checked += 1;
            let tokens: i64 = tx.deltas.iter().map(|d| d.token_delta).sum();
            let base: i64 = tx.deltas.iter().map(|d| d.sol_delta).sum();
            let want_tokens = if tx.involves_mint_instruction { supply } else { 0 };
            if tokens != want_tokens {
                violations.push(format!("{}: token sum {tokens}", tx.tx_id));
            }
            if base + fee != 0 {
                violations.push(format!("{}: base sum {base} with fee {fee}", tx.tx_id));
            }
            for d in &tx.deltas {
                let b = balances.entry(d.account.as_str()).or_default();
                *b += d.token_delta;
                if *b < 0 {
                    violations.push(format!("{}: {} holds {b}", tx.tx_id, d.account));
                }
            }
        }
        let held: i64 = balances.values().sum();
        if held != supply {
            violations.push(format!("{}: holdings sum to {held}", l.launch.mint));
        }
        if l.migration.token_reserve as i64 != balances.get(l.launch.amm_address.as_str()).copied().unwrap_or(0) {
            violations.push(format!("{}: amm does not hold the migrated reserve", l.launch.mint));
        }
    }
    ensure(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;
    Ok(format!("0 violations over {} launches ({SEEDS} seeds x 4 profiles), {checked} transactions", launches().len()))
}

fn amm_invariant() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    let mut pool = AmmPool::new(200_000_000_000_000, 85_000_000_000).unwrap();
    let mut done = 0;
    while done < 10_000 {
        let side = if rng.random_bool(0.5) { Side::Buy } else { Side::Sell };
        let (x, y) = (pool.token_reserve(), pool.base_reserve());
        let reserve_in = if side == Side::Buy { y } else { x };
        let amount = (reserve_in as f64 * 10f64.powf(rng.random_range(-6.0..-0.5))) as u128 + 1;
        let k = pool.k();
        let Ok(trade) = pool.swap(side, amount) else { continue };
        let (x1, y1) = (pool.token_reserve(), pool.base_reserve());
        let prod = x1 * y1;
        ensure(k <= prod && prod <= k + x1.max(y1), || format!("swap {done}: k={k} xy={prod}"))?;
        let (reserve_out, new_in) = if side == Side::Buy { (x, y + amount) } else { (y, x + amount) };
        let out = reserve_out - k.div_ceil(new_in);
        let got = if side == Side::Buy { trade.token_amount } else { trade.base_amount };
        ensure(got == out, || format!("swap {done}: output {got}, expected {out}"))?;
        done += 1;
    }
    Ok(format!("{done} swaps, k <= xy <= k + max(x, y) at every step"))
}

/// Base units needed to buy positions [0, sold), one tier at a time.
fn enumerated_cost(prices: &[u128], alloc: u128, sold: u128) -> u128 {
    let mut cost = 0;
    let mut left = sold;
    for p in prices {
        let take = left.min(alloc);
        cost += take * p;
        left -= take;
    }
    cost
}

/// Greedy tier walk from `sold` with `budget`: (tokens, cost).
fn enumerated_buy(prices: &[u128], alloc: u128, sold: u128, budget: u128) -> (u128, u128) {
    let (mut pos, mut left, mut tokens) = (sold, budget, 0);
    for (i, p) in prices.iter().enumerate() {
        let end = (i as u128 + 1) * alloc;
        if pos >= end {
            continue;
        }
        let take = (end - pos).min(left / p);
        tokens += take;
        left -= take * p;
        pos += take;
        if pos < end {
            break;
        }
    }
    (tokens, budget - left)
}

fn curve_accounting() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut trades = 0;
    let mut n = 0;
    let mut rejected = 0;
    while n < 100 {
        let tiers = rng.random_range(1..30);
        let alloc = rng.random_range(1..50_000_000u128);
        let cfg = CurveConfig {
            p0: rng.random_range(1..200),
            ratio: rng.random_range(1.0..1.3),
            tiers,
            tier_allocation: alloc,
            total_supply: alloc * tiers as u128 + rng.random_range(0..1_000_000),
            migrate_fraction: rng.random_range(0.5..=1.0),
        };
        let prices = cfg.tier_prices();
        let Ok(mut curve) = cfg.build_curve() else {
            // rounding can repeat a tier price, which the curve must refuse
            ensure(prices.windows(2).any(|w| w[0] >= w[1]), || format!("valid config refused: {cfg:?}"))?;
            rejected += 1;
            continue;
        };
        let full = enumerated_cost(&prices, alloc, alloc * tiers as u128);
        let mut vault: u128 = 0;
        for _ in 0..rng.random_range(1..40) {
            let sold = curve.sold();
            if rng.random_bool(0.75) || sold == 0 {
                let budget = rng.random_range(1..=full / 4 + 1);
                let (tokens, cost) = enumerated_buy(&prices, alloc, sold, budget);
                match curve.buy(budget) {
                    Ok(b) => {
                        ensure(b.trade.token_amount == tokens && b.trade.base_amount == cost, || {
                            format!(
                                "config {n}: bought {}/{}, oracle {tokens}/{cost}",
                                b.trade.token_amount, b.trade.base_amount
                            )
                        })?;
                        vault += cost;
                    }
                    Err(_) => ensure(tokens == 0, || format!("config {n}: buy refused, oracle fills {tokens}"))?,
                }
            } else {
                let amount = rng.random_range(1..=sold);
                let t = curve.sell(amount).map_err(|e| format!("config {n}: {e}"))?;
                let back = enumerated_cost(&prices, alloc, sold) - enumerated_cost(&prices, alloc, sold - amount);
                ensure(t.base_amount == back, || format!("config {n}: sell paid {}, oracle {back}", t.base_amount))?;
                vault -= back;
            }
            trades += 1;
            let want = enumerated_cost(&prices, alloc, curve.sold());
            ensure(vault == want, || format!("config {n}: collected {vault}, oracle {want}"))?;
        }
        n += 1;
    }
    Ok(format!("100 configs ({rejected} non-increasing draws refused), {trades} trades, collected base equals tier enumeration"))
}

fn bfs_components(traces: &[BundleTrace], cex: &CexList) -> Vec<BTreeSet<String>> {
    let kept: Vec<&BundleTrace> = traces
        .iter()
        .filter(|t| !t.identifier.is_empty())
        .filter(|t| !(t.identifier_kind == IdentifierKind::Funder && cex.contains(&t.identifier)))
        .collect();
    let mut adj: BTreeMap<&str, BTreeSet<&str>> = BTreeMap::new();
    for a in &kept {
        adj.entry(&a.account).or_default();
        for b in &kept {
            if a.identifier_kind == b.identifier_kind && a.identifier == b.identifier {
                adj.entry(&a.account).or_default().insert(&b.account);
            }
        }
    }
    let mut seen: BTreeSet<&str> = BTreeSet::new();
    let mut comps = Vec::new();
    for start in adj.keys() {
        if !seen.insert(start) {
            continue;
        }
        let mut comp = BTreeSet::from([start.to_string()]);
        let mut queue = VecDeque::from([*start]);
        while let Some(a) = queue.pop_front() {
            for b in &adj[a] {
                if seen.insert(b) {
                    comp.insert(b.to_string());
                    queue.push_back(b);
                }
            }
        }
        if comp.len() >= 2 {
            comps.push(comp);
        }
    }
    comps.sort();
    comps
}

fn clustering() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let kinds = [IdentifierKind::InTx, IdentifierKind::Funder, IdentifierKind::Jito];
    let cex = CexList::new(["cex0", "cex1"]);
    let mut bundles = 0;
    for n in 0..1000 {
        let accounts = rng.random_range(1..=20);
        let ids = rng.random_range(1..12);
        let traces: Vec<BundleTrace> = (0..rng.random_range(0..40))
            .map(|_| {
                let kind = kinds[rng.random_range(0..3)];
                let id = match rng.random_range(0..20) {
                    0 => String::new(),
                    1 => format!("cex{}", rng.random_range(0..2)),
                    _ => format!("id{}", rng.random_range(0..ids)),
                };
                BundleTrace::new(format!("acct{:02}", rng.random_range(0..accounts)), kind, id)
            })
            .collect();
        let got = cluster(&traces, &cex);
        let sets: Vec<BTreeSet<String>> = got.iter().map(|b| b.accounts.clone()).collect();
        ensure(sets == bfs_components(&traces, &cex), || format!("instance {n}: differs from BFS"))?;
        ensure(got.iter().enumerate().all(|(i, b)| b.bundle_id == i), || format!("instance {n}: ids out of order"))?;
        let again: Vec<BTreeSet<String>> =
            cluster(&bundles_as_traces(&got), &cex).into_iter().map(|b| b.accounts).collect();
        ensure(again == sets, || format!("instance {n}: not idempotent"))?;
        let mut shuffled = traces.clone();
        shuffled.shuffle(&mut rng);
        ensure(cluster(&shuffled, &cex) == got, || format!("instance {n}: depends on trace order"))?;
        bundles += got.len();
    }
    Ok(format!("1000 instances ({bundles} bundles) match BFS, idempotent, order invariant"))
}

fn annotation_rule() -> Outcome {
    let t = Thresholds::default();
    let mut counts: BTreeMap<RiskLevel, usize> = BTreeMap::new();
    for i in 0..=100 {
        for j in 0..=100 {
            let (r, s) = (i as f64 / 100.0, j as f64 / 100.0);
            let high = r < 0.3 || s >= 0.7;
            let low = r >= 0.7 && s < 0.3;
            let medium = !(r < 0.3 || s >= 0.7) && !(r >= 0.7 && s < 0.3);
            ensure([high, low, medium].iter().filter(|x| **x).count() == 1, || format!("({r}, {s}) not partitioned"))?;
            let want = if high {
                RiskLevel::High
            } else if low {
                RiskLevel::Low
            } else {
                RiskLevel::Medium
            };
            let got = label(r, s, &t);
            ensure(got == want, || format!("({r}, {s}) -> {got}, expected {want}"))?;
            *counts.entry(got).or_default() += 1;
        }
    }
    let examples = [
        ((0.25, 0.1), RiskLevel::High),
        ((0.9, 0.1), RiskLevel::Low),
        ((0.5, 0.5), RiskLevel::Medium),
        ((0.9, 0.8), RiskLevel::High),
    ];
    for ((r, s), want) in examples {
        let got = label(r, s, &t);
        ensure(got == want, || format!("example ({r}, {s}) -> {got}, expected {want}"))?;
    }
    Ok(format!("10201 grid points partitioned {counts:?}, 4 reference examples hold"))
}

fn series_with(base: f64, dips: &[(usize, f64)]) -> PostSeries {
    let mut prices = vec![base; launchrisk::risk::POST_SERIES_LEN];
    for (minute, p) in dips {
        prices[minute * 60..minute * 60 + 60].fill(*p);
    }
    PostSeries::from_prices(&prices).unwrap()
}

fn min_ratio() -> Outcome {
    let r = min_price_ratio(&PostSeries::flat(2.5e-8), 2.5e-8, 20).unwrap();
    ensure(r == 1.0, || format!("flat -> {r}"))?;
    let r = min_price_ratio(&series_with(1.0, &[(5, 0.15)]), 1.0, 20).unwrap();
    ensure(r == 0.15, || format!("dip -> {r}"))?;
    let r = min_price_ratio(&series_with(1.0, &[(10, 0.8), (25, 0.5)]), 1.0, 20).unwrap();
    ensure(r == 0.8, || format!("window boundary -> {r}"))?;

    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for n in 0..1000 {
        let mut p: f64 = 1.0;
        let prices: Vec<f64> = (0..launchrisk::risk::POST_SERIES_LEN)
            .map(|_| {
                p *= (rng.random_range(-0.01..0.01f64)).exp();
                p
            })
            .collect();
        let s = PostSeries::from_prices(&prices).unwrap();
        let mig = rng.random_range(0.5..1.5);
        let small = rng.random_range(1..=60);
        let large = rng.random_range(small..=60);
        let (a, b) = (min_price_ratio(&s, mig, small).unwrap(), min_price_ratio(&s, mig, large).unwrap());
        ensure(b <= a, || format!("series {n}: window {large} gives {b} > window {small} gives {a}"))?;
    }
    Ok("3 examples hold, window monotone over 1000 random series".into())
}

fn auc(pos: &[f64], neg: &[f64]) -> f64 {
    let mut wins = 0.0;
    for p in pos {
        for n in neg {
            wins += if p > n {
                1.0
            } else if p == n {
                0.5
            } else {
                0.0
            };
        }
    }
    wins / (pos.len() * neg.len()) as f64
}

fn label_recovery() -> Outcome {
    let run = corpus_run();
    let manifest: Vec<ManifestRow> = read_records(&CorpusLayout::new(&run.corpus).manifest()).unwrap();
    let labels = load_labels(&OutputLayout::new(&run.out)).map_err(|e| e.to_string())?;
    ensure(labels.len() == manifest.len(), || format!("{} labels for {} launches", labels.len(), manifest.len()))?;
    let share = |lv: RiskLevel, it: &mut dyn Iterator<Item = RiskLevel>| {
        let v: Vec<RiskLevel> = it.collect();
        100.0 * v.iter().filter(|l| **l == lv).count() as f64 / v.len() as f64
    };
    let mut parts = Vec::new();
    for lv in RiskLevel::ALL {
        let truth = share(lv, &mut manifest.iter().map(|m| m.true_level));
        let got = share(lv, &mut labels.values().copied());
        ensure((truth - got).abs() <= 5.0, || format!("{lv}: labelled {got:.1}%, truth {truth:.1}%"))?;
        parts.push(format!("{lv} {got:.1}% vs {truth:.1}%"));
    }

    let score = |p: Profile| -> Vec<f64> {
        launches().iter().filter(|l| l.truth.profile == p).map(|l| heuristic_manipulation_score(&l.post)).collect()
    };
    let manipulated = score(Profile::Manipulated);
    let organic: Vec<f64> = [Profile::High, Profile::Medium, Profile::Low].into_iter().flat_map(score).collect();
    let a = auc(&manipulated, &organic);
    ensure(a >= 0.9, || format!("AUC {a:.3}"))?;
    let lo = manipulated.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = organic.iter().copied().fold(0.0, f64::max);
    Ok(format!(
        "mix {}: {}; AUC {a:.3} over {SEEDS} seeds (manipulated min {lo:.2}, organic max {hi:.2})",
        run.mix,
        parts.join(", ")
    ))
}

fn backtest() -> Outcome {
    let run = corpus_run();
    let cands =
        load_candidates(&CorpusLayout::new(&run.corpus), &OutputLayout::new(&run.out)).map_err(|e| e.to_string())?;
    let oracle = oracle_scores(&cands);
    let mut parts = Vec::new();
    for seed in 0..10u64 {
        let random = random_scores(&cands, seed);
        for k in [10, 20] {
            let o = backtest_selection(&cands, &oracle, k, 100, seed).map_err(|e| e.to_string())?;
            let r = backtest_selection(&cands, &random, k, 100, seed).map_err(|e| e.to_string())?;
            ensure(o.loss_pct < r.loss_pct, || {
                format!("seed {seed} k={k}: oracle {:.2}% vs random {:.2}%", o.loss_pct, r.loss_pct)
            })?;
            if seed == 0 {
                parts.push(format!("k={k} oracle {:.2}% random {:.2}%", o.loss_pct, r.loss_pct));
            }
        }
    }

    let flat: Vec<Candidate> =
        cands.iter().map(|c| Candidate { series: PostSeries::flat(c.migration_price), ..c.clone() }).collect();
    for scores in [oracle_scores(&flat), random_scores(&flat, 3)] {
        for k in [10, 20] {
            let l = backtest_selection(&flat, &scores, k, 100, 3).map_err(|e| e.to_string())?.loss_pct;
            ensure(l == 0.0, || format!("flat corpus k={k}: loss {l}"))?;
        }
    }
    Ok(format!("{}; 10 paired seeds; flat corpus loss 0", parts.join(", ")))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        (v[n / 2 - 1] + v[n / 2]) / 2.0
    }
}

fn feature_directionality() -> Outcome {
    let run = corpus_run();
    let out = OutputLayout::new(&run.out);
    let rows = read_features(&out.features()).map_err(|e| e.to_string())?;
    let labels = load_labels(&out).map_err(|e| e.to_string())?;
    let med = |lv: RiskLevel, name: &str| {
        median(rows.iter().filter(|r| labels.get(&r.mint) == Some(&lv)).filter_map(|r| r.get(name)).collect())
    };
    // (feature, high median expected below low median)
    let checks = [
        ("time_span", true),
        ("holder_num", true),
        ("buy_num", true),
        ("avg_buy_volume", false),
        ("early_top10_hold_pct", false),
    ];
    let mut parts = Vec::new();
    for (name, lower) in checks {
        let (h, l) = (med(RiskLevel::High, name), med(RiskLevel::Low, name));
        let ok = if lower { h < l } else { h > l };
        ensure(ok, || format!("{name}: high median {h}, low median {l}"))?;
        parts.push(format!("{name} {h:.3}{}{l:.3}", if lower { "<" } else { ">" }));
    }
    Ok(parts.join(", "))
}

type Check = (&'static str, fn() -> Outcome);

fn main() {
    let checks: [Check; 10] = [
        ("parser_oracle", parser_oracle),
        ("conservation", conservation),
        ("amm_invariant", amm_invariant),
        ("curve_accounting", curve_accounting),
        ("bundle_clustering", clustering),
        ("annotation_rule", annotation_rule),
        ("min_price_ratio", min_ratio),
        ("label_recovery", label_recovery),
        ("backtest_sanity", backtest),
        ("feature_directionality", feature_directionality),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        let start = Instant::now();
        let result = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match result {
            Ok(detail) => println!("PASS {name}: {detail} [{secs:.1}s]"),
            Err(detail) => {
                failed += 1;
                println!("FAIL {name}: {detail} [{secs:.1}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", checks.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
