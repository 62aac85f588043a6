//! Deterministic stand-in for a trained manipulation detector.
//!
//! Scripted manipulators sell into buying pressure and buy back after the
//! price has been pushed down, which leaves three traces in a per-second
//! series: long alternating runs of one-sided flow, a periodic price
//! component, and past flow that predicts the opposite future move.

use super::{PostBucket, PostSeries};

const WEIGHTS: [f64; 3] = [0.4, 0.3, 0.3];

/// Net flow smoothing before run detection (seconds).
const FLOW_SMOOTHING: usize = 10;
/// A flow run must last this long to count as a phase.
const MIN_PHASE: usize = 30;
/// Alternating phases needed for a full reversal signal.
const FULL_PHASES: f64 = 24.0;
/// A phase only counts if its mean |flow| reaches this share of the
/// strongest phase.
const PHASE_STRENGTH: f64 = 0.25;

/// Detrending window for the periodicity signal (seconds, odd).
const DETREND_WINDOW: usize = 301;
const MAX_LAG: usize = 900;
const PERIODICITY_FLOOR: f64 = 0.3;
const PERIODICITY_SPAN: f64 = 0.5;

const FLOW_HORIZONS: [usize; 4] = [15, 30, 60, 120];
const REVERSAL_FLOOR: f64 = 0.25;
const REVERSAL_SPAN: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ScoreSignals {
    pub reversal: f64,
    pub periodicity: f64,
    pub flow_reversal: f64,
}

impl ScoreSignals {
    pub fn of(series: &PostSeries) -> Self {
        let buckets = series.buckets();
        let log_price: Vec<f64> = buckets.iter().map(|b| b.price.ln()).collect();
        let flow: Vec<f64> = buckets.iter().map(|b: &PostBucket| b.net_flow).collect();
        ScoreSignals {
            reversal: reversal_signal(&flow),
            periodicity: periodicity_signal(&log_price),
            flow_reversal: flow_reversal_signal(&flow, &log_price),
        }
    }

    pub fn combined(&self) -> f64 {
        (WEIGHTS[0] * self.reversal + WEIGHTS[1] * self.periodicity + WEIGHTS[2] * self.flow_reversal).clamp(0.0, 1.0)
    }
}

pub fn heuristic_manipulation_score(series: &PostSeries) -> f64 {
    ScoreSignals::of(series).combined()
}

fn ramp(x: f64, floor: f64, span: f64) -> f64 {
    ((x - floor) / span).clamp(0.0, 1.0)
}

fn prefix(values: &[f64]) -> Vec<f64> {
    let mut p = Vec::with_capacity(values.len() + 1);
    p.push(0.0);
    let mut acc = 0.0;
    for v in values {
        acc += v;
        p.push(acc);
    }
    p
}

/// Trailing moving average.
fn smooth(values: &[f64], window: usize) -> Vec<f64> {
    let p = prefix(values);
    (0..values.len())
        .map(|i| {
            let lo = (i + 1).saturating_sub(window);
            (p[i + 1] - p[lo]) / (i + 1 - lo) as f64
        })
        .collect()
}

/// Alternating sustained one-sided flow phases.
fn reversal_signal(flow: &[f64]) -> f64 {
    let smoothed = smooth(flow, FLOW_SMOOTHING);
    // (sign, length, mean |flow|)
    let mut runs: Vec<(i8, usize, f64)> = Vec::new();
    for f in smoothed {
        let sign = if f > 0.0 {
            1
        } else if f < 0.0 {
            -1
        } else {
            0
        };
        match runs.last_mut() {
            Some((s, len, sum)) if *s == sign => {
                *len += 1;
                *sum += f.abs();
            }
            _ => runs.push((sign, 1, f.abs())),
        }
    }
    let phases: Vec<(i8, f64)> = runs
        .into_iter()
        .filter(|(s, len, _)| *s != 0 && *len >= MIN_PHASE)
        .map(|(s, len, sum)| (s, sum / len as f64))
        .collect();
    let strongest = phases.iter().map(|p| p.1).fold(0.0, f64::max);
    if strongest <= 0.0 {
        return 0.0;
    }
    let strong: Vec<i8> = phases.iter().filter(|p| p.1 >= PHASE_STRENGTH * strongest).map(|p| p.0).collect();
    let alternations = strong.windows(2).filter(|w| w[0] != w[1]).count();
    (alternations as f64 / FULL_PHASES).min(1.0)
}

fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    if lag >= n {
        return 0.0;
    }
    let var: f64 = x.iter().map(|v| v * v).sum();
    if var <= 0.0 {
        return 0.0;
    }
    x[..n - lag].iter().zip(&x[lag..]).map(|(a, b)| a * b).sum::<f64>() / var
}

/// Second ACF peak of the detrended log price: after the first zero
/// crossing, a smooth random path stays uncorrelated while a periodic one
/// comes back.
fn periodicity_signal(log_price: &[f64]) -> f64 {
    let n = log_price.len();
    let half = DETREND_WINDOW / 2;
    if n <= DETREND_WINDOW {
        return 0.0;
    }
    let p = prefix(log_price);
    let resid: Vec<f64> =
        (half..n - half).map(|i| log_price[i] - (p[i + half + 1] - p[i - half]) / DETREND_WINDOW as f64).collect();
    let mean = resid.iter().sum::<f64>() / resid.len() as f64;
    let centered: Vec<f64> = resid.iter().map(|r| r - mean).collect();
    if centered.iter().all(|v| v.abs() < 1e-12) {
        return 0.0;
    }
    let max_lag = MAX_LAG.min(centered.len() / 2);
    let mut crossed = false;
    let mut peak = 0.0f64;
    for lag in 1..=max_lag {
        let r = autocorrelation(&centered, lag);
        if !crossed {
            crossed = r <= 0.0;
            continue;
        }
        peak = peak.max(r);
    }
    ramp(peak, PERIODICITY_FLOOR, PERIODICITY_SPAN)
}

fn correlation(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    if a.is_empty() {
        return 0.0;
    }
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va <= 0.0 || vb <= 0.0 {
        0.0
    } else {
        cov / (va.sqrt() * vb.sqrt())
    }
}

/// Negative correlation between flow over the last `h` seconds and the log
/// price move over the next `h`, maximised over horizons.
fn flow_reversal_signal(flow: &[f64], log_price: &[f64]) -> f64 {
    let n = flow.len();
    let p = prefix(flow);
    let best = FLOW_HORIZONS
        .iter()
        .filter(|h| 2 * **h < n)
        .map(|&h| {
            let (past, future): (Vec<f64>, Vec<f64>) =
                (h..n - h).map(|t| (p[t] - p[t - h], log_price[t + h - 1] - log_price[t - 1])).unzip();
            -correlation(&past, &future)
        })
        .fold(0.0, f64::max);
    ramp(best, REVERSAL_FLOOR, REVERSAL_SPAN)
}
