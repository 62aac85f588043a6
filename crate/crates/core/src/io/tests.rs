use super::*;
use crate::bundle::{BundleTrace, IdentifierKind};
use crate::features::{FeatureRow, COLUMNS};
use crate::parser::{EventKind, ParsedEvent, RawTransaction};
use crate::risk::{PostSeries, RiskLabel, RiskLevel};
use std::path::Path;

fn p() -> &'static Path {
    Path::new("test.csv")
}

#[test]
fn records_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("labels.csv");
    let labels = vec![
        RiskLabel { mint: "a".into(), min_price_ratio: 0.25, pred_score: 0.1, risk_level: RiskLevel::High },
        RiskLabel { mint: "b".into(), min_price_ratio: 1.0, pred_score: 0.0, risk_level: RiskLevel::Low },
    ];
    write_records(&path, &labels).unwrap();
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("# schema_version=1\nmint,min_price_ratio,pred_score,risk_level\n"));
    assert_eq!(read_records::<RiskLabel>(&path).unwrap(), labels);
}

#[test]
fn optional_fields_round_trip() {
    let ev = ParsedEvent {
        tx_id: "t".into(),
        kind: EventKind::Transfer,
        actor: "a".into(),
        counterparty: Some("b".into()),
        token_amount: 5,
        base_amount: 0,
        net_token_delta: -5,
        timestamp: 9,
        diagnostic: None,
    };
    let bytes = csv_bytes(std::slice::from_ref(&ev));
    let back: Vec<ParsedEvent> = parse_records(p(), std::str::from_utf8(&bytes).unwrap()).unwrap();
    assert_eq!(back, vec![ev]);
}

#[test]
fn trace_kinds_use_snake_case() {
    let t = BundleTrace::new("acct", IdentifierKind::InTx, "sig");
    let text = String::from_utf8(csv_bytes(std::slice::from_ref(&t))).unwrap();
    assert!(text.contains("acct,in_tx,sig"));
    assert_eq!(parse_records::<BundleTrace>(p(), &text).unwrap(), vec![t]);
}

#[test]
fn missing_schema_line_is_line_one() {
    let err = parse_records::<ScoreRow>(p(), "mint,normal_probability\na,0.5\n").unwrap_err();
    assert_eq!(err.line(), Some(1));
    let err = parse_records::<ScoreRow>(p(), "# schema_version=2\nmint,normal_probability\n").unwrap_err();
    assert_eq!(err.line(), Some(1));
}

#[test]
fn wrong_header_is_line_two() {
    let err = parse_records::<ScoreRow>(p(), "# schema_version=1\nmint,score\na,0.5\n").unwrap_err();
    assert_eq!(err.line(), Some(2));
}

#[test]
fn bad_row_reports_its_line() {
    let text = "# schema_version=1\nmint,normal_probability\na,0.5\nb,0.25\nc,high\n";
    let err = parse_records::<ScoreRow>(p(), text).unwrap_err();
    assert_eq!(err.line(), Some(5));
    let ragged = "# schema_version=1\nmint,normal_probability\na,0.5\nb\n";
    assert_eq!(parse_records::<ScoreRow>(p(), ragged).unwrap_err().line(), Some(4));
}

#[test]
fn jsonl_reports_bad_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("tx.jsonl");
    let tx = RawTransaction {
        tx_id: "t".into(),
        slot_time: 1,
        signer: "s".into(),
        deltas: vec![],
        involves_mint_instruction: false,
        pool_accounts: Default::default(),
        legs: vec![],
    };
    write_jsonl(&path, &[tx.clone(), tx.clone()]).unwrap();
    assert_eq!(read_jsonl::<RawTransaction>(&path).unwrap(), vec![tx.clone(), tx]);
    let mut text = std::fs::read_to_string(&path).unwrap();
    text.push_str("{\"tx_id\": 3}\n");
    std::fs::write(&path, text).unwrap();
    assert_eq!(read_jsonl::<RawTransaction>(&path).unwrap_err().line(), Some(3));
}

#[test]
fn features_round_trip_with_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("features.csv");
    let mut values: Vec<Option<f64>> = (0..COLUMNS.len()).map(|i| Some(i as f64 * 0.5)).collect();
    values[3] = None;
    let rows = vec![FeatureRow { mint: "m".into(), values, incomplete: true }];
    write_features(&path, &rows).unwrap();
    assert_eq!(read_features(&path).unwrap(), rows);
    let text = std::fs::read_to_string(&path).unwrap().replace(",1\n", ",2\n");
    std::fs::write(&path, text).unwrap();
    assert_eq!(read_features(&path).unwrap_err().line(), Some(3));
}

#[test]
fn post_series_round_trip_and_length_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("post.csv");
    let prices: Vec<f64> = (0..crate::risk::POST_SERIES_LEN).map(|i| 1.0 + i as f64 * 1e-3).collect();
    let series = PostSeries::from_prices(&prices).unwrap();
    write_post(&path, &series).unwrap();
    assert_eq!(read_post(&path).unwrap(), series);
    let rows: Vec<PostRow> = read_records(&path).unwrap();
    write_records(&path, &rows[..10]).unwrap();
    assert!(matches!(read_post(&path), Err(IoError::Schema { .. })));
}

#[test]
fn atomic_write_replaces_and_cleans_up() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/out.txt");
    write_atomic(&path, b"one").unwrap();
    write_atomic(&path, b"two").unwrap();
    assert_eq!(std::fs::read(&path).unwrap(), b"two");
    let entries: Vec<_> = std::fs::read_dir(path.parent().unwrap()).unwrap().collect();
    assert_eq!(entries.len(), 1);
}

#[test]
fn feature_manifest_matches_schema() {
    let rows = feature_manifest_rows();
    assert_eq!(rows.len(), COLUMNS.len());
    assert!(rows.iter().all(|r| (1..=5).contains(&r.group) && (r.kind == "int" || r.kind == "float")));
    let text = String::from_utf8(csv_bytes(&rows)).unwrap();
    assert!(text.lines().nth(1) == Some("name,group,type,unit"));
}
