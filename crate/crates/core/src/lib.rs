//! Univariate market-risk engine: h-day Value-at-Risk estimated directly and
//! through square-root-of-time scaling, with coverage backtests.
//!
//! Sign convention throughout: a VaR is a signed return quantile, negative in
//! the loss region, and a breach is a realized return strictly below it.

// `!(x > 0.0)` is used on purpose so NaN fails validation; approximation
// coefficients are kept exactly as published.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod backtest;
pub mod error;
pub mod garch;
pub mod market_data;
pub mod optim;
pub mod simgen;
pub mod statfun;
pub mod var_engine;

pub use error::{Result, VarError};
