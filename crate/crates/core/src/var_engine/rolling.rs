use rayon::prelude::*;

use super::estimators::{hs_var, hs_var_interpolated, scale_var, vc_var_normal, vc_var_t, MIN_HS_WINDOW};
use super::series::{Method, Mode, VarForecast, VarForecastSeries};
use crate::error::{Result, VarError};
use crate::garch::{fit_arma_garch, forecast_one_step, garch_var, select_arma_order, ArmaOrder, Innovations};
use crate::market_data::ReturnSeries;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GarchOptions {
    /// Fixed mean-equation order; selected on the whole input series when `None`.
    pub order: Option<ArmaOrder>,
    pub max_p: usize,
    pub max_q: usize,
    /// Use the raw t quantile instead of the unit-variance one.
    pub raw_t_quantile: bool,
}

impl Default for GarchOptions {
    fn default() -> Self {
        Self {
            order: None,
            max_p: 2,
            max_q: 2,
            raw_t_quantile: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct EstimatorOptions {
    pub hs_interpolate: bool,
    /// Multiply the VC-t quantile by `sqrt((v - 2) / v)`.
    pub t_standardized: bool,
    pub garch: GarchOptions,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RollingConfig {
    pub method: Method,
    pub mode: Mode,
    pub confidence: f64,
    pub horizon: usize,
    pub window: usize,
    pub estimator: EstimatorOptions,
}

impl RollingConfig {
    pub fn new(method: Method, mode: Mode, confidence: f64, horizon: usize, window: usize) -> Self {
        Self {
            method,
            mode,
            confidence,
            horizon,
            window,
            estimator: EstimatorOptions::default(),
        }
    }
}

fn point_estimate(cfg: &RollingConfig, window: &[f64], include_mean: bool, order: Option<ArmaOrder>) -> Result<f64> {
    let p = cfg.confidence;
    let opts = &cfg.estimator;
    match cfg.method {
        Method::Hs if opts.hs_interpolate => hs_var_interpolated(window, p),
        Method::Hs => hs_var(window, p),
        Method::VcNormal => vc_var_normal(window, p, include_mean),
        Method::VcT => vc_var_t(window, p, include_mean, opts.t_standardized),
        Method::GarchNormal | Method::GarchT => {
            let innovations = if cfg.method == Method::GarchT {
                Innovations::StudentT
            } else {
                Innovations::Normal
            };
            let order = order.expect("order resolved before the window loop");
            let fit = fit_arma_garch(window, order, innovations)?;
            if !fit.converged {
                return Err(VarError::Optimization("GARCH fit did not converge".into()));
            }
            let (mu, sigma) = forecast_one_step(&fit.params, window)?;
            let mu = if include_mean { mu } else { 0.0 };
            garch_var(mu, sigma, p, innovations, fit.params.dof, !opts.garch.raw_t_quantile)
        }
    }
}

/// Rolls the configured estimator over the input one day at a time.
///
/// Direct mode estimates on windows of `returns_hd` (horizon `cfg.horizon`)
/// with the mean included; scaled mode estimates on `returns_1d` without the
/// mean and multiplies by `sqrt(horizon)`. A series of `n` returns gives
/// `n - window` forecasts, the last one dated at the final observation. A
/// failed window repeats the previous value with `carried_forward` set.
pub fn rolling_estimate(returns_1d: &ReturnSeries, returns_hd: &ReturnSeries, cfg: &RollingConfig) -> Result<VarForecastSeries> {
    if !(cfg.confidence > 0.0 && cfg.confidence < 1.0) {
        return Err(VarError::InvalidArgument(format!(
            "confidence must lie in (0, 1), got {}",
            cfg.confidence
        )));
    }
    if cfg.horizon == 0 {
        return Err(VarError::InvalidArgument("horizon must be at least 1".into()));
    }
    if cfg.window < MIN_HS_WINDOW {
        return Err(VarError::InvalidArgument(format!(
            "window must be at least {MIN_HS_WINDOW}, got {}",
            cfg.window
        )));
    }
    let (series, include_mean) = match cfg.mode {
        Mode::Direct => {
            if returns_hd.horizon() != cfg.horizon {
                return Err(VarError::InvalidArgument(format!(
                    "direct mode needs {}-day returns, got {}-day",
                    cfg.horizon,
                    returns_hd.horizon()
                )));
            }
            (returns_hd, true)
        }
        Mode::Scaled => {
            if returns_1d.horizon() != 1 {
                return Err(VarError::InvalidArgument(format!(
                    "scaled mode needs 1-day returns, got {}-day",
                    returns_1d.horizon()
                )));
            }
            (returns_1d, false)
        }
    };
    let n = series.len();
    if n <= cfg.window {
        return Err(VarError::InsufficientData {
            needed: cfg.window + 1,
            got: n,
        });
    }
    let values = series.values();
    let order = if cfg.method.is_garch() {
        Some(match cfg.estimator.garch.order {
            Some(o) => o,
            None => select_arma_order(values, cfg.estimator.garch.max_p, cfg.estimator.garch.max_q)?,
        })
    } else {
        None
    };

    let raw: Vec<Result<f64>> = (cfg.window..n)
        .into_par_iter()
        .map(|end| {
            let w = &values[end + 1 - cfg.window..=end];
            let v = point_estimate(cfg, w, include_mean, order)?;
            let v = match cfg.mode {
                Mode::Direct => v,
                Mode::Scaled => scale_var(v, cfg.horizon)?,
            };
            if v.is_finite() {
                Ok(v)
            } else {
                Err(VarError::Degenerate("non-finite VaR".into()))
            }
        })
        .collect();

    let dates = series.dates();
    let mut entries = Vec::with_capacity(raw.len());
    let mut last: Option<f64> = None;
    for (i, r) in raw.into_iter().enumerate() {
        let as_of_date = dates[cfg.window + i];
        let (value, carried_forward) = match (r, last) {
            (Ok(v), _) => (v, false),
            (Err(_), Some(prev)) => (prev, true),
            (Err(e), None) => {
                return Err(VarError::FirstWindowFailed(format!(
                    "{} {} window ending {as_of_date}: {e}",
                    cfg.method, cfg.mode
                )))
            }
        };
        last = Some(value);
        entries.push(VarForecast {
            as_of_date,
            value,
            carried_forward,
        });
    }
    Ok(VarForecastSeries {
        method: cfg.method,
        mode: cfg.mode,
        confidence: cfg.confidence,
        horizon: cfg.horizon,
        window: Some(cfg.window),
        entries,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use chrono::{Days, NaiveDate};

    fn series(values: Vec<f64>, horizon: usize) -> ReturnSeries {
        let d0 = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
        let n = values.len();
        let dates: Vec<NaiveDate> = (0..n).map(|i| d0 + Days::new((i + horizon) as u64)).collect();
        let starts: Vec<NaiveDate> = (0..n).map(|i| d0 + Days::new(i as u64)).collect();
        ReturnSeries::from_parts(horizon, starts, dates, values).unwrap()
    }

    fn wiggle(n: usize) -> Vec<f64> {
        (0..n).map(|i| ((i * 7919) % 101) as f64 / 1000.0 - 0.05).collect()
    }

    #[test]
    fn forecast_count_is_length_minus_window() {
        let s = series(wiggle(260), 1);
        let cfg = RollingConfig::new(Method::Hs, Mode::Scaled, 0.95, 1, 250);
        let out = rolling_estimate(&s, &s, &cfg).unwrap();
        assert_eq!(out.len(), 10);
        assert_eq!(out.entries[0].as_of_date, s.dates()[250]);
        assert_eq!(out.entries[9].as_of_date, *s.dates().last().unwrap());
    }

    #[test]
    fn scaled_is_sqrt_t_times_one_day() {
        let s = series(wiggle(400), 1);
        let one = rolling_estimate(&s, &s, &RollingConfig::new(Method::VcNormal, Mode::Scaled, 0.99, 1, 250)).unwrap();
        let ten = rolling_estimate(&s, &s, &RollingConfig::new(Method::VcNormal, Mode::Scaled, 0.99, 10, 250)).unwrap();
        for (a, b) in one.entries.iter().zip(&ten.entries) {
            assert_eq!(b.value, a.value * 10f64.sqrt());
        }
    }

    #[test]
    fn failures_carry_forward_and_first_failure_aborts() {
        // Constant stretch makes the VC estimator fail on later windows only.
        let mut v = wiggle(30);
        v.extend(std::iter::repeat_n(0.01, 30));
        let s = series(v, 1);
        let out = rolling_estimate(&s, &s, &RollingConfig::new(Method::VcNormal, Mode::Scaled, 0.95, 1, 25)).unwrap();
        let carried = out.carried_dates();
        assert!(!carried.is_empty());
        let first_carry = out.entries.iter().position(|e| e.carried_forward).unwrap();
        for e in &out.entries[first_carry..] {
            assert_eq!(e.value, out.entries[first_carry - 1].value);
        }

        let s = series(vec![0.01; 40], 1);
        let err = rolling_estimate(&s, &s, &RollingConfig::new(Method::VcNormal, Mode::Scaled, 0.95, 1, 25)).unwrap_err();
        assert!(matches!(err, VarError::FirstWindowFailed(_)));
    }

    #[test]
    fn horizon_mismatch_rejected() {
        let s = series(wiggle(300), 1);
        let cfg = RollingConfig::new(Method::Hs, Mode::Direct, 0.95, 10, 250);
        assert!(rolling_estimate(&s, &s, &cfg).is_err());
    }
}
