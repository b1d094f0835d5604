//! Seeded synthetic returns and prices.
//!
//! The random source is ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`).
//! Uniforms take the top 53 bits of each `next_u64` as `(k + 0.5) / 2^53`, so
//! they never hit 0 or 1; normal and t variates come from the inverse CDFs
//! in [`crate::statfun`].

use chrono::{Datelike, Days, NaiveDate, Weekday};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VarError};
use crate::market_data::{PriceSeries, ReturnSeries};
use crate::statfun::{normal_quantile, t_quantile};

pub const RNG_ALGORITHM: &str = "ChaCha20";
const GARCH_BURN_IN: usize = 1000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SimKind {
    IidNormal { mu: f64, sigma: f64 },
    /// `mu + scale * t_v`, with the raw (not unit-variance) t.
    IidT { mu: f64, scale: f64, dof: f64 },
    GarchNormal { mu: f64, omega: f64, alpha: f64, beta: f64 },
    /// GARCH(1,1) driven by unit-variance t innovations.
    GarchT { mu: f64, omega: f64, alpha: f64, beta: f64, dof: f64 },
    /// Daily log returns `N(drift, vol^2)` accumulated from `start_price`.
    GbmPrices { drift: f64, vol: f64, start_price: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub kind: SimKind,
    /// Number of returns (prices have one more entry).
    pub n: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum SimOutput {
    Returns(ReturnSeries),
    Prices(PriceSeries),
}

fn invalid(msg: String) -> VarError {
    VarError::InvalidArgument(msg)
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(invalid("n must be at least 1".into()));
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let garch = |omega: f64, alpha: f64, beta: f64| -> Result<()> {
            if !finite(&[omega, alpha, beta]) || omega <= 0.0 || alpha < 0.0 || beta < 0.0 {
                return Err(invalid("need omega > 0, alpha >= 0, beta >= 0".into()));
            }
            if alpha + beta >= 1.0 {
                return Err(invalid(format!("alpha + beta must be below 1, got {}", alpha + beta)));
            }
            Ok(())
        };
        let dof_ok = |v: f64| {
            if v > 2.0 && v.is_finite() {
                Ok(())
            } else {
                Err(invalid(format!("dof must exceed 2, got {v}")))
            }
        };
        match self.kind {
            SimKind::IidNormal { mu, sigma } => {
                if !finite(&[mu, sigma]) || sigma <= 0.0 {
                    return Err(invalid("need finite mu and sigma > 0".into()));
                }
            }
            SimKind::IidT { mu, scale, dof } => {
                if !finite(&[mu, scale]) || scale <= 0.0 {
                    return Err(invalid("need finite mu and scale > 0".into()));
                }
                dof_ok(dof)?;
            }
            SimKind::GarchNormal { mu, omega, alpha, beta } => {
                if !mu.is_finite() {
                    return Err(invalid("mu must be finite".into()));
                }
                garch(omega, alpha, beta)?;
            }
            SimKind::GarchT { mu, omega, alpha, beta, dof } => {
                if !mu.is_finite() {
                    return Err(invalid("mu must be finite".into()));
                }
                garch(omega, alpha, beta)?;
                dof_ok(dof)?;
            }
            SimKind::GbmPrices { drift, vol, start_price } => {
                if !finite(&[drift, vol, start_price]) || vol <= 0.0 || start_price <= 0.0 {
                    return Err(invalid("need finite drift, vol > 0 and start price > 0".into()));
                }
            }
        }
        Ok(())
    }
}

/// Uniform (0, 1) and inverse-CDF variates on a seeded ChaCha20 stream.
pub struct Draws {
    rng: ChaCha20Rng,
}

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha20Rng::seed_from_u64(seed),
        }
    }

    pub fn uniform(&mut self) -> f64 {
        ((self.rng.next_u64() >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    }

    pub fn normal(&mut self) -> f64 {
        let u = self.uniform();
        normal_quantile(u).expect("uniform lies strictly inside (0, 1)")
    }

    pub fn student_t(&mut self, dof: f64) -> f64 {
        let u = self.uniform();
        t_quantile(u, dof).expect("uniform lies strictly inside (0, 1)")
    }

    /// t variate rescaled to unit variance.
    pub fn standardized_t(&mut self, dof: f64) -> f64 {
        self.student_t(dof) * ((dof - 2.0) / dof).sqrt()
    }
}

/// Consecutive weekdays starting at the first weekday on or after `start`.
pub fn business_days(start: NaiveDate, n: usize) -> Vec<NaiveDate> {
    let mut out = Vec::with_capacity(n);
    let mut d = start;
    while out.len() < n {
        if !matches!(d.weekday(), Weekday::Sat | Weekday::Sun) {
            out.push(d);
        }
        d = d + Days::new(1);
    }
    out
}

pub fn default_start_date() -> NaiveDate {
    NaiveDate::from_ymd_opt(2000, 1, 3).expect("valid date")
}

fn garch_path(draws: &mut Draws, n: usize, mu: f64, omega: f64, alpha: f64, beta: f64, dof: Option<f64>) -> Vec<f64> {
    let mut s2 = omega / (1.0 - alpha - beta);
    let mut out = Vec::with_capacity(n);
    for i in 0..n + GARCH_BURN_IN {
        let z = match dof {
            Some(v) => draws.standardized_t(v),
            None => draws.normal(),
        };
        let eps = s2.sqrt() * z;
        if i >= GARCH_BURN_IN {
            out.push(mu + eps);
        }
        s2 = omega + alpha * eps * eps + beta * s2;
    }
    out
}

/// Raw return values for the return-producing kinds (log returns for `GbmPrices`).
pub fn simulate_values(spec: &SimSpec) -> Result<Vec<f64>> {
    spec.validate()?;
    let mut d = Draws::new(spec.seed);
    let n = spec.n;
    Ok(match spec.kind {
        SimKind::IidNormal { mu, sigma } => (0..n).map(|_| mu + sigma * d.normal()).collect(),
        SimKind::IidT { mu, scale, dof } => (0..n).map(|_| mu + scale * d.student_t(dof)).collect(),
        SimKind::GarchNormal { mu, omega, alpha, beta } => garch_path(&mut d, n, mu, omega, alpha, beta, None),
        SimKind::GarchT { mu, omega, alpha, beta, dof } => garch_path(&mut d, n, mu, omega, alpha, beta, Some(dof)),
        SimKind::GbmPrices { drift, vol, .. } => (0..n).map(|_| drift + vol * d.normal()).collect(),
    })
}

/// Prices `start_price * exp(cumsum(returns))` on business days from `start`,
/// with `returns.len() + 1` entries.
pub fn prices_from_returns(returns: &[f64], start_price: f64, start: NaiveDate) -> Result<PriceSeries> {
    if !(start_price > 0.0 && start_price.is_finite()) {
        return Err(invalid(format!("start price must be positive, got {start_price}")));
    }
    let dates = business_days(start, returns.len() + 1);
    let mut level = start_price.ln();
    let mut rows = Vec::with_capacity(dates.len());
    rows.push((dates[0], start_price));
    for (d, r) in dates[1..].iter().zip(returns) {
        level += r;
        rows.push((*d, level.exp()));
    }
    PriceSeries::new(rows)
}

/// 1-day return series on business days from `start`.
pub fn returns_series(values: Vec<f64>, start: NaiveDate) -> Result<ReturnSeries> {
    let dates = business_days(start, values.len() + 1);
    ReturnSeries::from_parts(1, dates[..values.len()].to_vec(), dates[1..].to_vec(), values)
}

pub fn generate(spec: &SimSpec) -> Result<SimOutput> {
    let values = simulate_values(spec)?;
    let start = default_start_date();
    match spec.kind {
        SimKind::GbmPrices { start_price, .. } => Ok(SimOutput::Prices(prices_from_returns(&values, start_price, start)?)),
        _ => Ok(SimOutput::Returns(returns_series(values, start)?)),
    }
}
