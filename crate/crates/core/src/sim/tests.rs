use super::*;
use crate::bundle::{cluster, extract_in_tx_traces};
use crate::parser::{parse_transaction, ParserConfig};
use crate::risk::min_price_ratio;

fn run(profile: Profile, seed: u64) -> SimulatedLaunch {
    simulate_launch(&ScenarioConfig::preset(profile, seed)).unwrap()
}

#[test]
fn same_seed_same_stream() {
    let a = run(Profile::High, 11);
    let b = run(Profile::High, 11);
    assert_eq!(a, b);
    let bytes = |l: &SimulatedLaunch| serde_json::to_vec(&l.transactions).unwrap();
    assert_eq!(bytes(&a), bytes(&b));
    assert_ne!(bytes(&a), bytes(&run(Profile::High, 12)));
}

#[test]
fn creation_comes_first_and_time_is_ordered() {
    let l = run(Profile::Medium, 3);
    assert!(l.transactions[0].involves_mint_instruction);
    assert_eq!(l.transactions[0].slot_time, l.launch.create_ts);
    assert!(l.transactions.windows(2).all(|w| w[0].slot_time <= w[1].slot_time));
    assert!(l.launch.migrate_ts > l.transactions.last().unwrap().slot_time);
}

#[test]
fn prebuy_probability_controls_creation_kind() {
    let mut cfg = ScenarioConfig::preset(Profile::Low, 5);
    cfg.developer.prebuy_prob = 0.0;
    assert_eq!(simulate_launch(&cfg).unwrap().truth.events[0].kind, EventKind::Create);
    cfg.developer.prebuy_prob = 1.0;
    assert_eq!(simulate_launch(&cfg).unwrap().truth.events[0].kind, EventKind::CreateAndBuy);
}

#[test]
fn migration_moves_the_reserve() {
    let l = run(Profile::Low, 9);
    let cfg = CurveConfig::default();
    assert_eq!(l.migration.token_reserve as u128, cfg.total_supply - cfg.migration_threshold().unwrap());
    assert_eq!(l.migration.token_reserve, 200_000_000);
    let m = &l.migration_tx;
    assert_eq!(m.token_sum(), 0);
    assert_eq!(m.fee_paid(), 5_000);
    let expected = l.migration.base_reserve as f64 / l.migration.token_reserve as f64;
    assert_eq!(l.migration.migration_price, expected);
}

#[test]
fn stream_conserves_tokens_and_base() {
    for p in Profile::ALL {
        let l = run(p, 21);
        let all: Vec<&RawTransaction> = l.transactions.iter().chain([&l.migration_tx]).collect();
        let tokens: i64 = all.iter().map(|t| t.token_sum()).sum();
        assert_eq!(tokens as u128, l.curve.total_supply, "{p}");
        let base: i64 = all.iter().flat_map(|t| &t.deltas).map(|d| d.sol_delta).sum();
        assert_eq!(base + (l.truth.fee_per_tx * all.len() as u64) as i64, 0, "{p}");
        assert!(all.iter().all(|t| t.fee_paid() == l.truth.fee_per_tx as i64));
    }
}

#[test]
fn parser_recovers_every_true_kind() {
    let cfg = ParserConfig::default();
    for p in Profile::ALL {
        let l = run(p, 4);
        let got: Vec<(String, String, EventKind)> = l
            .transactions
            .iter()
            .flat_map(|t| parse_transaction(t, &cfg))
            .map(|e| (e.tx_id, e.actor, e.kind))
            .collect();
        let want: Vec<(String, String, EventKind)> =
            l.truth.events.iter().map(|e| (e.tx_id.clone(), e.actor.clone(), e.kind)).collect();
        assert_eq!(got, want, "{p}");
    }
}

fn recovered(l: &SimulatedLaunch) -> Vec<BTreeSet<String>> {
    let events: Vec<_> = l.transactions.iter().flat_map(|t| parse_transaction(t, &ParserConfig::default())).collect();
    let mut traces = l.traces.clone();
    traces.extend(extract_in_tx_traces(&events));
    let mut got: Vec<BTreeSet<String>> =
        cluster(&traces, &CexList::builtin()).into_iter().map(|b| b.accounts).collect();
    got.sort();
    got
}

#[test]
fn clustering_recovers_true_bundles() {
    let l = run(Profile::High, 8);
    let mut want = l.truth.bundles.clone();
    want.sort();
    assert_eq!(want.len(), 3);
    assert!(want.iter().any(|b| b.contains(&l.launch.creator) && b.len() == 6));
    assert_eq!(recovered(&l), want);
}

#[test]
fn one_tx_bundle_alone_is_found() {
    let mut cfg = ScenarioConfig::preset(Profile::Medium, 2);
    cfg.insiders.bundles = 1;
    cfg.insiders.split_factor = 5;
    cfg.emit = TraceEmission { in_tx: true, funder: false, jito: false };
    let l = simulate_launch(&cfg).unwrap();
    let events: Vec<_> = l.transactions.iter().flat_map(|t| parse_transaction(t, &ParserConfig::default())).collect();
    assert_eq!(extract_in_tx_traces(&events).len(), 5);
    let got = recovered(&l);
    assert_eq!(got.len(), 1);
    assert_eq!(got[0].len(), 5);
}

#[test]
fn suppressed_traces_give_a_refinement() {
    let mut cfg = ScenarioConfig::preset(Profile::High, 8);
    cfg.emit.funder = false;
    let l = simulate_launch(&cfg).unwrap();
    let got = recovered(&l);
    for b in &got {
        assert!(l.truth.bundles.iter().any(|t| b.is_subset(t)));
    }
    // the developer was tied to bundle 0 only through its funder
    assert!(got.iter().all(|b| !b.contains(&l.launch.creator)));
}

#[test]
fn non_migrating_sale_is_an_error() {
    let mut cfg = ScenarioConfig::preset(Profile::Low, 1);
    cfg.organic.buyers = 3;
    assert!(matches!(simulate_launch(&cfg), Err(SimError::NonMigrating { .. })));
}

#[test]
fn invalid_scenarios_are_rejected() {
    let mut cfg = ScenarioConfig::preset(Profile::Low, 1);
    cfg.wash.rate = 0.9;
    assert!(matches!(simulate_launch(&cfg), Err(SimError::InvalidConfig(_))));
    let mut cfg = ScenarioConfig::preset(Profile::Low, 1);
    cfg.curve.migrate_fraction = 1.5;
    assert!(matches!(simulate_launch(&cfg), Err(SimError::Market(_))));
}

#[test]
fn profiles_shape_the_post_series() {
    let low = run(Profile::Low, 30);
    let high = run(Profile::High, 30);
    let manip = run(Profile::Manipulated, 30);
    let r = |l: &SimulatedLaunch| min_price_ratio(&l.post, l.migration.migration_price, 20).unwrap();
    assert!(r(&low) >= 0.7);
    assert!(r(&high) < 0.3);
    assert!(manip.truth.manipulator_actions.len() > 1000);
    assert!(low.truth.manipulator_actions.is_empty());
    assert_eq!(manip.truth.level, RiskLevel::High);
}

#[test]
fn high_risk_insiders_hold_more() {
    let low = run(Profile::Low, 6);
    let high = run(Profile::High, 6);
    assert!(high.truth.insider_tokens_at_migration > 3 * low.truth.insider_tokens_at_migration);
}

#[test]
fn mix_allocation() {
    let mix = ProfileMix::new(0.8, 0.15, 0.05, 0.0).unwrap();
    assert_eq!(mix.allocate(100), [80, 15, 5, 0]);
    assert_eq!(mix.allocate(1), [1, 0, 0, 0]);
    assert_eq!(mix.allocate(7).iter().sum::<usize>(), 7);
    assert!(ProfileMix::new(0.5, 0.2, 0.2, 0.0).is_err());
    assert!(ProfileMix::new(1.2, -0.2, 0.0, 0.0).is_err());
    assert_eq!("high=0.8,medium=0.15,low=0.05".parse::<ProfileMix>().unwrap(), mix);
    assert!("high=0.5".parse::<ProfileMix>().is_err());
    assert!("bogus=1".parse::<ProfileMix>().is_err());
}

#[test]
fn corpus_plan_is_seeded() {
    let mix = ProfileMix::default();
    let a = corpus_plan(50, &mix, 1).unwrap();
    assert_eq!(a, corpus_plan(50, &mix, 1).unwrap());
    assert_ne!(a, corpus_plan(50, &mix, 2).unwrap());
    let highs = a.iter().filter(|c| c.profile == Profile::High).count();
    assert_eq!(highs, mix.count(50, Profile::High));
    assert!(corpus_plan(0, &mix, 1).is_err());
}

#[test]
fn scenario_json_round_trip() {
    let cfg = ScenarioConfig::preset(Profile::Manipulated, 3);
    let back: ScenarioConfig = serde_json::from_str(&serde_json::to_string(&cfg).unwrap()).unwrap();
    assert_eq!(back, cfg);
}

#[test]
fn shipped_presets_file_matches_code() {
    let shipped: Vec<ScenarioConfig> = serde_json::from_str(include_str!("../../scenarios/presets.json")).unwrap();
    let want: Vec<ScenarioConfig> = Profile::ALL.iter().map(|p| ScenarioConfig::preset(*p, 0)).collect();
    assert_eq!(shipped, want);
}
