#ifndef LAUNCHRISK_H
#define LAUNCHRISK_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LrStatus {
  LR_STATUS_OK = 0,
  LR_STATUS_NULL_POINTER = 1,
  LR_STATUS_INVALID_ARGUMENT = 2,
  LR_STATUS_INVALID_CONFIG = 3,
  LR_STATUS_SOLD_OUT = 4,
  LR_STATUS_INSUFFICIENT_INVENTORY = 5,
  LR_STATUS_DUST_TRADE = 6,
  LR_STATUS_OVERFLOW = 7,
  LR_STATUS_PANIC = 99,
} LrStatus;

typedef enum LrSide {
  LR_SIDE_BUY = 0,
  LR_SIDE_SELL = 1,
} LrSide;

typedef enum LrRiskLevel {
  LR_RISK_LEVEL_LOW = 0,
  LR_RISK_LEVEL_MEDIUM = 1,
  LR_RISK_LEVEL_HIGH = 2,
} LrRiskLevel;

// Opaque bonding curve handle.
typedef struct LrCurve LrCurve;

// Opaque constant-product pool handle.
typedef struct LrPool LrPool;

typedef struct LrThresholds {
  double collapse_ratio;
  double manipulated_score;
  double stable_ratio;
  double clean_score;
} LrThresholds;

typedef struct LrPostBucket {
  double price;
  double buy_volume;
  double sell_volume;
  uint32_t tx_count;
  double net_flow;
} LrPostBucket;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Message of the last failed call on this thread, or NULL. The pointer
// stays valid until the next failing call on the same thread.
const char *lr_last_error(void);

// Static description of a status code.
const char *lr_status_str(enum LrStatus status);

// Curve with the default launchpad parameters.
//
// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum LrStatus lr_curve_new_default(struct LrCurve **out);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum LrStatus lr_curve_new(uint64_t p0,
                           double ratio,
                           uint32_t tiers,
                           uint64_t tier_allocation,
                           uint64_t total_supply,
                           double migrate_fraction,
                           struct LrCurve **out);

// # Safety
// `curve` must be NULL or a handle from `lr_curve_new*` not yet freed.
void lr_curve_free(struct LrCurve *curve);

// Spend up to `base_budget`; writes the tokens received and base spent.
//
// # Safety
// `curve` must be a live handle; `tokens_out` and `cost_out` valid pointers.
enum LrStatus lr_curve_buy(struct LrCurve *curve,
                           uint64_t base_budget,
                           uint64_t *tokens_out,
                           uint64_t *cost_out);

// Return `tokens` to the curve; writes the base refunded.
//
// # Safety
// `curve` must be a live handle; `base_out` a valid pointer.
enum LrStatus lr_curve_sell(struct LrCurve *curve, uint64_t tokens, uint64_t *base_out);

// # Safety
// `curve` must be a live handle; `sold_out` and `migrated_out` valid pointers.
enum LrStatus lr_curve_state(const struct LrCurve *curve, uint64_t *sold_out, bool *migrated_out);

// # Safety
// `out` must be a valid pointer to writable storage for one handle.
enum LrStatus lr_pool_new(uint64_t token_reserve, uint64_t base_reserve, struct LrPool **out);

// # Safety
// `pool` must be NULL or a handle from `lr_pool_new` not yet freed.
void lr_pool_free(struct LrPool *pool);

// Swap `amount_in` (base for a buy, tokens for a sell); writes the amount
// received.
//
// # Safety
// `pool` must be a live handle; `amount_out` a valid pointer.
enum LrStatus lr_pool_swap(struct LrPool *pool,
                           enum LrSide side,
                           uint64_t amount_in,
                           uint64_t *amount_out);

// # Safety
// `pool` must be a live handle; `token_out` and `base_out` valid pointers.
enum LrStatus lr_pool_reserves(const struct LrPool *pool, uint64_t *token_out, uint64_t *base_out);

struct LrThresholds lr_default_thresholds(void);

// Risk level for a ratio/score pair. `thresholds` may be NULL for the
// defaults.
//
// # Safety
// `thresholds` must be NULL or valid; `level_out` a valid pointer.
enum LrStatus lr_label(double min_price_ratio,
                       double pred_score,
                       const struct LrThresholds *thresholds,
                       enum LrRiskLevel *level_out);

// Minimum price over the first `window_minutes` relative to the migration
// price, capped at 1.
//
// # Safety
// `buckets` must point to `len` readable buckets; `ratio_out` valid.
enum LrStatus lr_min_price_ratio(const struct LrPostBucket *buckets,
                                 size_t len,
                                 double migration_price,
                                 uint32_t window_minutes,
                                 double *ratio_out);

// Heuristic manipulation score in [0, 1].
//
// # Safety
// `buckets` must point to `len` readable buckets; `score_out` valid.
enum LrStatus lr_manipulation_score(const struct LrPostBucket *buckets,
                                    size_t len,
                                    double *score_out);

// Buckets per post-migration series.
size_t lr_post_series_len(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LAUNCHRISK_H */
