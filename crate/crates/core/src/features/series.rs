use crate::parser::{EventKind, ParsedEvent};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Bucket {
    pub open_price: f64,
    pub end_price: f64,
    pub avg_price: f64,
    pub buy_volume: f64,
    pub sell_volume: f64,
}

/// Fixed-resolution price/volume series over the launchpad sale. Volumes are
/// in base units.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub bucket_seconds: i64,
    pub start_ts: i64,
    pub buckets: Vec<Bucket>,
}

/// Aggregate priced events between `start_ts` and `end_ts` (inclusive).
/// Buckets without trades carry the previous end price with zero volume.
pub fn build_timeseries(events: &[ParsedEvent], start_ts: i64, end_ts: i64, bucket_seconds: i64) -> TimeSeries {
    assert!(bucket_seconds > 0, "bucket width must be positive");
    let n = if end_ts >= start_ts { ((end_ts - start_ts) / bucket_seconds + 1) as usize } else { 0 };

    #[derive(Default, Clone)]
    struct Acc {
        open: Option<f64>,
        end: f64,
        base: f64,
        tokens: f64,
        buy: f64,
        sell: f64,
    }
    let mut accs = vec![Acc::default(); n];
    for e in events {
        if e.timestamp < start_ts || e.timestamp > end_ts {
            continue;
        }
        let Some(price) = e.price() else { continue };
        let a = &mut accs[((e.timestamp - start_ts) / bucket_seconds) as usize];
        a.open.get_or_insert(price);
        a.end = price;
        a.base += e.base_amount as f64;
        a.tokens += e.token_amount as f64;
        match e.kind {
            EventKind::Buy | EventKind::CreateAndBuy => a.buy += e.base_amount as f64,
            EventKind::Sell => a.sell += e.base_amount as f64,
            EventKind::Wash => {
                a.buy += e.base_amount as f64;
                a.sell += e.base_amount as f64;
            }
            _ => {}
        }
    }

    let mut last = 0.0;
    let buckets = accs
        .into_iter()
        .map(|a| match a.open {
            Some(open) => {
                last = a.end;
                Bucket {
                    open_price: open,
                    end_price: a.end,
                    avg_price: a.base / a.tokens,
                    buy_volume: a.buy,
                    sell_volume: a.sell,
                }
            }
            None => Bucket { open_price: last, end_price: last, avg_price: last, ..Bucket::default() },
        })
        .collect();
    TimeSeries { bucket_seconds, start_ts, buckets }
}

impl TimeSeries {
    pub fn first_priced(&self) -> Option<&Bucket> {
        self.buckets.iter().find(|b| b.buy_volume + b.sell_volume > 0.0)
    }

    /// Last end price over the first trade's open price.
    pub fn price_change(&self) -> Option<f64> {
        let first = self.first_priced()?;
        let last = self.buckets.last()?;
        (first.open_price > 0.0).then(|| last.end_price / first.open_price)
    }

    /// Fraction of buy volume that occurred in the first 60 seconds.
    pub fn first_minute_buy_share(&self) -> Option<f64> {
        let total: f64 = self.buckets.iter().map(|b| b.buy_volume).sum();
        if total <= 0.0 {
            return None;
        }
        let per_minute = (60 / self.bucket_seconds).max(1) as usize;
        let early: f64 = self.buckets.iter().take(per_minute).map(|b| b.buy_volume).sum();
        Some(early / total)
    }
}
