use launchrisk::bundle::{bundles_as_traces, cluster, BundleTrace, CexList, IdentifierKind};
use launchrisk::io::{csv_bytes, parse_records, ScoreRow};
use launchrisk::market::{AmmPool, BondingCurve, Side};
use launchrisk::risk::{label, min_price_ratio, PostSeries, RiskLabel, RiskLevel, Thresholds, POST_SERIES_LEN};
use proptest::prelude::*;
use std::collections::BTreeSet;
use std::path::Path;

fn curve_strategy() -> impl Strategy<Value = BondingCurve> {
    (prop::collection::vec(1u128..50, 1..6), 1u128..200).prop_map(|(steps, alloc)| {
        let mut p = 0;
        let prices: Vec<u128> = steps
            .into_iter()
            .map(|s| {
                p += s;
                p
            })
            .collect();
        BondingCurve::new(prices, alloc).unwrap()
    })
}

/// Price of every position, one by one.
fn unit_prices(c: &BondingCurve) -> Vec<u128> {
    c.tier_prices().iter().flat_map(|p| std::iter::repeat_n(*p, c.tier_allocation() as usize)).collect()
}

proptest! {
    #[test]
    fn curve_buys_and_sells_match_enumeration(curve in curve_strategy(), ops in prop::collection::vec((any::<bool>(), 1u128..5_000), 1..30)) {
        let units = unit_prices(&curve);
        let mut c = curve.clone();
        for (is_buy, amount) in ops {
            let before = c.sold() as usize;
            if is_buy {
                match c.buy(amount) {
                    Ok(b) => {
                        let after = c.sold() as usize;
                        let cost: u128 = units[before..after].iter().sum();
                        prop_assert_eq!(b.trade.base_amount, cost);
                        prop_assert_eq!(b.leftover, amount - cost);
                        // greedy: the next unit was not affordable
                        if after < units.len() {
                            prop_assert!(b.leftover < units[after]);
                        }
                    }
                    Err(_) => prop_assert_eq!(c.sold() as usize, before),
                }
            } else {
                let n = (amount as usize).min(before);
                if n > 0 {
                    let t = c.sell(n as u128).unwrap();
                    prop_assert_eq!(t.base_amount, units[before - n..before].iter().sum::<u128>());
                }
            }
            prop_assert!(c.sold() <= c.total_curve_supply());
        }
    }

    #[test]
    fn amm_product_never_decreases(x in 1_000u128..1_000_000_000, y in 1_000u128..1_000_000_000, swaps in prop::collection::vec((any::<bool>(), 1u128..10_000_000), 1..50)) {
        let mut pool = AmmPool::new(x, y).unwrap();
        for (buy, amount) in swaps {
            let k0 = pool.token_reserve() * pool.base_reserve();
            let side = if buy { Side::Buy } else { Side::Sell };
            if pool.swap(side, amount).is_ok() {
                let (x1, y1) = (pool.token_reserve(), pool.base_reserve());
                prop_assert!(x1 * y1 >= k0);
                prop_assert!(x1 * y1 - k0 <= x1.max(y1));
                prop_assert_eq!(pool.k(), x1 * y1);
            } else {
                prop_assert_eq!(pool.token_reserve() * pool.base_reserve(), k0);
            }
        }
    }

    #[test]
    fn clustering_ignores_order_and_is_idempotent(raw in prop::collection::vec((0u8..12, 0u8..3, 0u8..6), 0..40), seed in any::<u64>()) {
        let kinds = [IdentifierKind::InTx, IdentifierKind::Funder, IdentifierKind::Jito];
        let traces: Vec<BundleTrace> = raw.iter()
            .map(|(a, k, i)| BundleTrace::new(format!("acct{a:02}"), kinds[*k as usize], format!("id{i}")))
            .collect();
        let cex = CexList::default();
        let base = cluster(&traces, &cex);
        let mut shuffled = traces.clone();
        let mut s = seed;
        for i in (1..shuffled.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            shuffled.swap(i, (s >> 33) as usize % (i + 1));
        }
        prop_assert_eq!(&cluster(&shuffled, &cex), &base);
        let again = cluster(&bundles_as_traces(&base), &cex);
        let sets = |b: &[launchrisk::bundle::Bundle]| b.iter().map(|x| x.accounts.clone()).collect::<Vec<BTreeSet<String>>>();
        prop_assert_eq!(sets(&again), sets(&base));
    }

    #[test]
    fn label_is_monotone(r in 0.0f64..=1.0, s in 0.0f64..=1.0, dr in 0.0f64..0.5, ds in 0.0f64..0.5) {
        let t = Thresholds::default();
        let rank = |l: RiskLevel| match l { RiskLevel::Low => 0, RiskLevel::Medium => 1, RiskLevel::High => 2 };
        let base = rank(label(r, s, &t));
        // lower ratio or higher score never lowers the risk level
        prop_assert!(rank(label((r - dr).max(0.0), s, &t)) >= base);
        prop_assert!(rank(label(r, (s + ds).min(1.0), &t)) >= base);
    }

    #[test]
    fn ratio_shrinks_with_window(prices in prop::collection::vec(0.01f64..10.0, 60), mig in 0.1f64..10.0) {
        let full: Vec<f64> = (0..POST_SERIES_LEN).map(|i| prices[i % 60] * (1.0 + (i / 60) as f64 * 0.01)).collect();
        let s = PostSeries::from_prices(&full).unwrap();
        let mut last = f64::INFINITY;
        for w in [1, 5, 20, 60] {
            let r = min_price_ratio(&s, mig, w).unwrap();
            prop_assert!(r <= last && r <= 1.0 && r > 0.0);
            last = r;
        }
    }

    #[test]
    fn score_and_label_files_round_trip(rows in prop::collection::vec(("[a-zA-Z0-9]{1,44}", 0.0f64..1.0, 0.0f64..=1.0, 0usize..3), 0..20)) {
        let scores: Vec<ScoreRow> = rows.iter().map(|(m, p, _, _)| ScoreRow { mint: m.clone(), normal_probability: *p }).collect();
        let text = String::from_utf8(csv_bytes(&scores)).unwrap();
        prop_assert_eq!(parse_records::<ScoreRow>(Path::new("s.csv"), &text).unwrap(), scores);
        let labels: Vec<RiskLabel> = rows.iter().map(|(m, p, r, l)| RiskLabel {
            mint: m.clone(), min_price_ratio: *r, pred_score: *p, risk_level: RiskLevel::ALL[*l],
        }).collect();
        let text = String::from_utf8(csv_bytes(&labels)).unwrap();
        prop_assert_eq!(parse_records::<RiskLabel>(Path::new("l.csv"), &text).unwrap(), labels);
    }
}
