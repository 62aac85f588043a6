//! C ABI over the launchrisk market and risk primitives.
//!
//! Every fallible call returns an [`LrStatus`]; on failure the message is
//! available from [`lr_last_error`] on the same thread. Handles are opaque
//! and must be released with their `_free` function.

use launchrisk::market::{AmmPool, BondingCurve, CurveConfig, MarketError, Side};
use launchrisk::risk::{self, PostBucket, PostSeries, RiskError, RiskLevel, Thresholds, POST_SERIES_LEN};
use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::ptr;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    InvalidConfig = 3,
    SoldOut = 4,
    InsufficientInventory = 5,
    DustTrade = 6,
    Overflow = 7,
    Panic = 99,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrSide {
    Buy = 0,
    Sell = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LrRiskLevel {
    Low = 0,
    Medium = 1,
    High = 2,
}

impl From<RiskLevel> for LrRiskLevel {
    fn from(l: RiskLevel) -> Self {
        match l {
            RiskLevel::Low => LrRiskLevel::Low,
            RiskLevel::Medium => LrRiskLevel::Medium,
            RiskLevel::High => LrRiskLevel::High,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrThresholds {
    pub collapse_ratio: f64,
    pub manipulated_score: f64,
    pub stable_ratio: f64,
    pub clean_score: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LrPostBucket {
    pub price: f64,
    pub buy_volume: f64,
    pub sell_volume: f64,
    pub tx_count: u32,
    pub net_flow: f64,
}

/// Opaque bonding curve handle.
pub struct LrCurve {
    curve: BondingCurve,
    migrate_fraction: f64,
}

/// Opaque constant-product pool handle.
pub struct LrPool {
    pool: AmmPool,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(msg));
}

fn fail(status: LrStatus, msg: impl Into<String>) -> LrStatus {
    set_error(msg);
    status
}

fn market_status(e: &MarketError) -> LrStatus {
    match e {
        MarketError::SoldOut => LrStatus::SoldOut,
        MarketError::InvalidAmount => LrStatus::InvalidArgument,
        MarketError::InsufficientInventory { .. } => LrStatus::InsufficientInventory,
        MarketError::DustTrade => LrStatus::DustTrade,
        MarketError::InvalidConfig(_) => LrStatus::InvalidConfig,
    }
}

fn risk_status(_: &RiskError) -> LrStatus {
    LrStatus::InvalidArgument
}

/// Runs `f`, turning panics into [`LrStatus::Panic`].
fn guard(f: impl FnOnce() -> LrStatus) -> LrStatus {
    match std::panic::catch_unwind(std::panic::AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(LrStatus::Panic, "internal panic"),
    }
}

fn to_u64(v: u128) -> Result<u64, LrStatus> {
    u64::try_from(v).map_err(|_| fail(LrStatus::Overflow, format!("{v} does not fit in 64 bits")))
}

macro_rules! check_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            return fail(LrStatus::NullPointer, concat!("`", stringify!($p), "` is null"));
        })+
    };
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn lr_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Static description of a status code.
#[no_mangle]
pub extern "C" fn lr_status_str(status: LrStatus) -> *const c_char {
    let s: &'static [u8] = match status {
        LrStatus::Ok => b"ok\0",
        LrStatus::NullPointer => b"null pointer\0",
        LrStatus::InvalidArgument => b"invalid argument\0",
        LrStatus::InvalidConfig => b"invalid configuration\0",
        LrStatus::SoldOut => b"curve sold out\0",
        LrStatus::InsufficientInventory => b"insufficient inventory\0",
        LrStatus::DustTrade => b"trade rounds to zero\0",
        LrStatus::Overflow => b"value overflows 64 bits\0",
        LrStatus::Panic => b"internal panic\0",
    };
    s.as_ptr().cast()
}

/// Curve with the default launchpad parameters.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lr_curve_new_default(out: *mut *mut LrCurve) -> LrStatus {
    let cfg = CurveConfig::default();
    lr_curve_new(
        cfg.p0 as u64,
        cfg.ratio,
        cfg.tiers as u32,
        cfg.tier_allocation as u64,
        cfg.total_supply as u64,
        cfg.migrate_fraction,
        out,
    )
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lr_curve_new(
    p0: u64,
    ratio: f64,
    tiers: u32,
    tier_allocation: u64,
    total_supply: u64,
    migrate_fraction: f64,
    out: *mut *mut LrCurve,
) -> LrStatus {
    check_null!(out);
    guard(|| {
        let cfg = CurveConfig {
            p0: p0 as u128,
            ratio,
            tiers: tiers as usize,
            tier_allocation: tier_allocation as u128,
            total_supply: total_supply as u128,
            migrate_fraction,
        };
        match cfg.build_curve() {
            Ok(curve) => {
                *out = Box::into_raw(Box::new(LrCurve { curve, migrate_fraction }));
                LrStatus::Ok
            }
            Err(e) => fail(market_status(&e), e.to_string()),
        }
    })
}

/// # Safety
/// `curve` must be NULL or a handle from `lr_curve_new*` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lr_curve_free(curve: *mut LrCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}

/// Spend up to `base_budget`; writes the tokens received and base spent.
///
/// # Safety
/// `curve` must be a live handle; `tokens_out` and `cost_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lr_curve_buy(
    curve: *mut LrCurve,
    base_budget: u64,
    tokens_out: *mut u64,
    cost_out: *mut u64,
) -> LrStatus {
    check_null!(curve, tokens_out, cost_out);
    guard(|| match (*curve).curve.buy(base_budget as u128) {
        Ok(b) => match (to_u64(b.trade.token_amount), to_u64(b.trade.base_amount)) {
            (Ok(t), Ok(c)) => {
                *tokens_out = t;
                *cost_out = c;
                LrStatus::Ok
            }
            (Err(s), _) | (_, Err(s)) => s,
        },
        Err(e) => fail(market_status(&e), e.to_string()),
    })
}

/// Return `tokens` to the curve; writes the base refunded.
///
/// # Safety
/// `curve` must be a live handle; `base_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lr_curve_sell(curve: *mut LrCurve, tokens: u64, base_out: *mut u64) -> LrStatus {
    check_null!(curve, base_out);
    guard(|| match (*curve).curve.sell(tokens as u128) {
        Ok(t) => match to_u64(t.base_amount) {
            Ok(v) => {
                *base_out = v;
                LrStatus::Ok
            }
            Err(s) => s,
        },
        Err(e) => fail(market_status(&e), e.to_string()),
    })
}

/// # Safety
/// `curve` must be a live handle; `sold_out` and `migrated_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lr_curve_state(
    curve: *const LrCurve,
    sold_out: *mut u64,
    migrated_out: *mut bool,
) -> LrStatus {
    check_null!(curve, sold_out, migrated_out);
    let c = &*curve;
    match to_u64(c.curve.sold()) {
        Ok(v) => {
            *sold_out = v;
            *migrated_out = c.curve.check_migration(c.migrate_fraction);
            LrStatus::Ok
        }
        Err(s) => s,
    }
}

/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn lr_pool_new(token_reserve: u64, base_reserve: u64, out: *mut *mut LrPool) -> LrStatus {
    check_null!(out);
    match AmmPool::new(token_reserve as u128, base_reserve as u128) {
        Ok(pool) => {
            *out = Box::into_raw(Box::new(LrPool { pool }));
            LrStatus::Ok
        }
        Err(e) => fail(market_status(&e), e.to_string()),
    }
}

/// # Safety
/// `pool` must be NULL or a handle from `lr_pool_new` not yet freed.
#[no_mangle]
pub unsafe extern "C" fn lr_pool_free(pool: *mut LrPool) {
    if !pool.is_null() {
        drop(Box::from_raw(pool));
    }
}

/// Swap `amount_in` (base for a buy, tokens for a sell); writes the amount
/// received.
///
/// # Safety
/// `pool` must be a live handle; `amount_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lr_pool_swap(
    pool: *mut LrPool,
    side: LrSide,
    amount_in: u64,
    amount_out: *mut u64,
) -> LrStatus {
    check_null!(pool, amount_out);
    let side = match side {
        LrSide::Buy => Side::Buy,
        LrSide::Sell => Side::Sell,
    };
    guard(|| match (*pool).pool.swap(side, amount_in as u128) {
        Ok(t) => {
            let got = if side == Side::Buy { t.token_amount } else { t.base_amount };
            match to_u64(got) {
                Ok(v) => {
                    *amount_out = v;
                    LrStatus::Ok
                }
                Err(s) => s,
            }
        }
        Err(e) => fail(market_status(&e), e.to_string()),
    })
}

/// # Safety
/// `pool` must be a live handle; `token_out` and `base_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn lr_pool_reserves(pool: *const LrPool, token_out: *mut u64, base_out: *mut u64) -> LrStatus {
    check_null!(pool, token_out, base_out);
    let p = &(*pool).pool;
    match (to_u64(p.token_reserve()), to_u64(p.base_reserve())) {
        (Ok(t), Ok(b)) => {
            *token_out = t;
            *base_out = b;
            LrStatus::Ok
        }
        (Err(s), _) | (_, Err(s)) => s,
    }
}

#[no_mangle]
pub extern "C" fn lr_default_thresholds() -> LrThresholds {
    let t = Thresholds::default();
    LrThresholds {
        collapse_ratio: t.collapse_ratio,
        manipulated_score: t.manipulated_score,
        stable_ratio: t.stable_ratio,
        clean_score: t.clean_score,
    }
}

/// Risk level for a ratio/score pair. `thresholds` may be NULL for the
/// defaults.
///
/// # Safety
/// `thresholds` must be NULL or valid; `level_out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn lr_label(
    min_price_ratio: f64,
    pred_score: f64,
    thresholds: *const LrThresholds,
    level_out: *mut LrRiskLevel,
) -> LrStatus {
    check_null!(level_out);
    if !(0.0..=1.0).contains(&min_price_ratio) || !(0.0..=1.0).contains(&pred_score) {
        return fail(LrStatus::InvalidArgument, "ratio and score must be in [0, 1]");
    }
    let t = if thresholds.is_null() {
        Thresholds::default()
    } else {
        let t = &*thresholds;
        Thresholds {
            collapse_ratio: t.collapse_ratio,
            manipulated_score: t.manipulated_score,
            stable_ratio: t.stable_ratio,
            clean_score: t.clean_score,
        }
    };
    *level_out = risk::label(min_price_ratio, pred_score, &t).into();
    LrStatus::Ok
}

unsafe fn series_from(buckets: *const LrPostBucket, len: usize) -> Result<PostSeries, LrStatus> {
    if buckets.is_null() {
        return Err(fail(LrStatus::NullPointer, "`buckets` is null"));
    }
    if len != POST_SERIES_LEN {
        return Err(fail(LrStatus::InvalidArgument, format!("series needs {POST_SERIES_LEN} buckets, got {len}")));
    }
    let raw = std::slice::from_raw_parts(buckets, len);
    PostSeries::new(
        raw.iter()
            .map(|b| PostBucket {
                price: b.price,
                buy_volume: b.buy_volume,
                sell_volume: b.sell_volume,
                tx_count: b.tx_count,
                net_flow: b.net_flow,
            })
            .collect(),
    )
    .map_err(|e| fail(risk_status(&e), e.to_string()))
}

/// Minimum price over the first `window_minutes` relative to the migration
/// price, capped at 1.
///
/// # Safety
/// `buckets` must point to `len` readable buckets; `ratio_out` valid.
#[no_mangle]
pub unsafe extern "C" fn lr_min_price_ratio(
    buckets: *const LrPostBucket,
    len: usize,
    migration_price: f64,
    window_minutes: u32,
    ratio_out: *mut f64,
) -> LrStatus {
    check_null!(ratio_out);
    guard(|| {
        let series = match series_from(buckets, len) {
            Ok(s) => s,
            Err(s) => return s,
        };
        match risk::min_price_ratio(&series, migration_price, window_minutes) {
            Ok(r) => {
                *ratio_out = r;
                LrStatus::Ok
            }
            Err(e) => fail(risk_status(&e), e.to_string()),
        }
    })
}

/// Heuristic manipulation score in [0, 1].
///
/// # Safety
/// `buckets` must point to `len` readable buckets; `score_out` valid.
#[no_mangle]
pub unsafe extern "C" fn lr_manipulation_score(
    buckets: *const LrPostBucket,
    len: usize,
    score_out: *mut f64,
) -> LrStatus {
    check_null!(score_out);
    guard(|| match series_from(buckets, len) {
        Ok(s) => {
            *score_out = risk::heuristic_manipulation_score(&s);
            LrStatus::Ok
        }
        Err(s) => s,
    })
}

/// Buckets per post-migration series.
#[no_mangle]
pub extern "C" fn lr_post_series_len() -> usize {
    POST_SERIES_LEN
}
