//! Toolkit for launchpad memecoin launches: balance-change transaction
//! parsing, bundled-account clustering, launch features, post-migration risk
//! annotation, token-selection backtests and a deterministic launch
//! simulator that produces labelled corpora for all of the above.

// `!(x > 0.0)` checks also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bundle;
pub mod features;
pub mod io;
pub mod market;
pub mod parser;
pub mod pipeline;
pub mod risk;
pub mod sim;
