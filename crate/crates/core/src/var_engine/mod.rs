//! Point VaR estimators, square-root-of-time scaling and the rolling engine.

mod align;
mod estimators;
mod rolling;
mod series;

pub use align::{align_for_backtest, AlignedPairs};
pub use estimators::{
    hs_var, hs_var_interpolated, scale_var, vc_var_normal, vc_var_t, vc_var_t_with_dof, MIN_HS_WINDOW,
    MIN_T_WINDOW,
};
pub use rolling::{rolling_estimate, EstimatorOptions, GarchOptions, RollingConfig};
pub use series::{Method, Mode, VarForecast, VarForecastSeries, FORECAST_HEADER};
