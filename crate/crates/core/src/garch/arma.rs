//! ARMA mean equation: coefficient transforms, residual filter and order selection.

use serde::{Deserialize, Serialize};

use crate::error::{Result, VarError};
use crate::optim::{minimize, SimplexOptions};

pub const MIN_OBS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ArmaOrder {
    pub p: usize,
    pub q: usize,
}

impl ArmaOrder {
    pub const WHITE_NOISE: ArmaOrder = ArmaOrder { p: 0, q: 0 };

    pub fn new(p: usize, q: usize) -> Self {
        Self { p, q }
    }
}

impl std::fmt::Display for ArmaOrder {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ARMA({},{})", self.p, self.q)
    }
}

/// Maps unconstrained reals to the coefficients of a stationary AR polynomial
/// `1 - phi_1 B - ... - phi_k B^k` through partial autocorrelations in (-1, 1).
pub fn stationary_from_unconstrained(raw: &[f64]) -> Vec<f64> {
    let partials: Vec<f64> = raw.iter().map(|x| x.tanh()).collect();
    let mut phi: Vec<f64> = Vec::with_capacity(partials.len());
    for (k, &r) in partials.iter().enumerate() {
        let prev = phi.clone();
        for j in 0..k {
            phi[j] = prev[j] - r * prev[k - 1 - j];
        }
        phi.push(r);
    }
    phi
}

/// Conditional mean filter in demeaned form:
/// `mu_t = mu + sum phi_i (r_{t-i} - mu) + sum theta_j eps_{t-j}`,
/// with pre-sample deviations and residuals set to zero.
///
/// Writes residuals into `eps` and returns nothing; `eps.len()` must equal `r.len()`.
pub fn arma_residuals(r: &[f64], mu: f64, ar: &[f64], ma: &[f64], eps: &mut [f64]) {
    for t in 0..r.len() {
        let mut m = mu;
        for (i, phi) in ar.iter().enumerate() {
            if t > i {
                m += phi * (r[t - 1 - i] - mu);
            }
        }
        for (j, theta) in ma.iter().enumerate() {
            if t > j {
                m += theta * eps[t - 1 - j];
            }
        }
        eps[t] = r[t] - m;
    }
}

/// One-step-ahead conditional mean after the last observation.
pub fn arma_next_mean(r: &[f64], eps: &[f64], mu: f64, ar: &[f64], ma: &[f64]) -> f64 {
    let n = r.len();
    let mut m = mu;
    for (i, phi) in ar.iter().enumerate() {
        if n > i {
            m += phi * (r[n - 1 - i] - mu);
        }
    }
    for (j, theta) in ma.iter().enumerate() {
        if n > j {
            m += theta * eps[n - 1 - j];
        }
    }
    m
}

/// Unpacks `[mu, ar partials.., ma partials..]` into `(mu, ar, ma)`.
pub(crate) fn unpack_mean(order: ArmaOrder, x: &[f64]) -> (f64, Vec<f64>, Vec<f64>) {
    let ar = stationary_from_unconstrained(&x[1..1 + order.p]);
    // Invertibility of 1 + theta_1 B + ... mirrors stationarity of its negation.
    let ma = stationary_from_unconstrained(&x[1 + order.p..1 + order.p + order.q])
        .into_iter()
        .map(|c| -c)
        .collect();
    (x[0], ar, ma)
}

/// Result of a constant-variance Gaussian ARMA fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ArmaFit {
    pub order: ArmaOrder,
    pub mu: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub sigma2: f64,
    pub loglik: f64,
    pub aic: f64,
    pub converged: bool,
}

/// Gaussian maximum likelihood with the innovation variance concentrated out.
pub fn fit_arma(r: &[f64], order: ArmaOrder) -> Result<ArmaFit> {
    let n = r.len();
    if n < MIN_OBS {
        return Err(VarError::InsufficientData { needed: MIN_OBS, got: n });
    }
    let mean = r.iter().sum::<f64>() / n as f64;
    let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if !(var > 0.0) || crate::market_data::is_constant(r) {
        return Err(VarError::Degenerate("constant return series".into()));
    }
    let nf = n as f64;
    let mut eps = vec![0.0; n];
    let mut negll = |x: &[f64]| {
        let (mu, ar, ma) = unpack_mean(order, x);
        arma_residuals(r, mu, &ar, &ma, &mut eps);
        let s2 = eps.iter().map(|e| e * e).sum::<f64>() / nf;
        if !(s2 > 0.0) {
            return f64::INFINITY;
        }
        0.5 * nf * ((2.0 * std::f64::consts::PI).ln() + s2.ln() + 1.0)
    };

    let k = order.p + order.q;
    let mut start = vec![0.0; 1 + k];
    start[0] = mean;
    let (x, f, converged) = if k == 0 {
        // Closed form: the sample mean maximizes the concentrated likelihood.
        let f = negll(&start);
        (start, f, true)
    } else {
        let mut steps = vec![0.2; 1 + k];
        steps[0] = 0.1 * var.sqrt();
        let res = minimize(&mut negll, &start, &steps, &SimplexOptions::default());
        (res.x, res.f, res.converged)
    };
    if !f.is_finite() {
        return Err(VarError::Optimization(format!("{order} likelihood not finite")));
    }
    let (mu, ar, ma) = unpack_mean(order, &x);
    arma_residuals(r, mu, &ar, &ma, &mut eps);
    let sigma2 = eps.iter().map(|e| e * e).sum::<f64>() / nf;
    let loglik = -f;
    let params = (k + 2) as f64;
    Ok(ArmaFit {
        order,
        mu,
        ar,
        ma,
        sigma2,
        loglik,
        aic: -2.0 * loglik + 2.0 * params,
        converged,
    })
}

/// AIC-minimizing order over `p <= max_p`, `q <= max_q`.
///
/// Ties go to the smaller `p + q`, then the smaller `p`.
pub fn select_arma_order(r: &[f64], max_p: usize, max_q: usize) -> Result<ArmaOrder> {
    if r.len() < MIN_OBS {
        return Err(VarError::InsufficientData {
            needed: MIN_OBS,
            got: r.len(),
        });
    }
    let mut grid: Vec<ArmaOrder> = (0..=max_p)
        .flat_map(|p| (0..=max_q).map(move |q| ArmaOrder::new(p, q)))
        .collect();
    grid.sort_by_key(|o| (o.p + o.q, o.p));

    let mut best: Option<(ArmaOrder, f64)> = None;
    let mut last_err = None;
    for order in grid {
        match fit_arma(r, order) {
            Ok(fit) if fit.aic.is_finite() => {
                if best.is_none_or(|(_, aic)| fit.aic < aic) {
                    best = Some((order, fit.aic));
                }
            }
            Ok(_) => {}
            Err(e) => last_err = Some(e),
        }
    }
    best.map(|(o, _)| o).ok_or_else(|| {
        last_err.unwrap_or_else(|| VarError::Optimization("no candidate ARMA order could be fitted".into()))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn transform_yields_stationary_ar2() {
        for &(a, b) in &[(3.0, -2.0), (-1.0, 0.5), (0.2, 5.0), (-4.0, -4.0)] {
            let phi = stationary_from_unconstrained(&[a, b]);
            // AR(2) stationarity triangle
            assert!(phi[1].abs() < 1.0);
            assert!(phi[0] + phi[1] < 1.0);
            assert!(phi[1] - phi[0] < 1.0);
        }
        assert_eq!(stationary_from_unconstrained(&[0.0]), vec![0.0]);
    }

    #[test]
    fn residual_filter_ar1_by_hand() {
        let r = [1.0, 2.0, 0.5];
        let mut eps = [0.0; 3];
        arma_residuals(&r, 0.5, &[0.6], &[], &mut eps);
        assert_eq!(eps[0], 0.5);
        assert!((eps[1] - (2.0 - (0.5 + 0.6 * 0.5))).abs() < 1e-15);
        assert!((eps[2] - (0.5 - (0.5 + 0.6 * 1.5))).abs() < 1e-15);
    }

    #[test]
    fn residual_filter_ma1_by_hand() {
        let r = [1.0, 2.0, 0.5];
        let mut eps = [0.0; 3];
        arma_residuals(&r, 0.0, &[], &[0.4], &mut eps);
        assert_eq!(eps[0], 1.0);
        assert!((eps[1] - (2.0 - 0.4)).abs() < 1e-15);
        assert!((eps[2] - (0.5 - 0.4 * 1.6)).abs() < 1e-15);
        let next = arma_next_mean(&r, &eps, 0.0, &[], &[0.4]);
        assert!((next - 0.4 * eps[2]).abs() < 1e-15);
    }

    #[test]
    fn singleton_grid_returns_white_noise() {
        let r: Vec<f64> = (0..150).map(|i| ((i * 37) % 11) as f64 - 5.0).collect();
        assert_eq!(select_arma_order(&r, 0, 0).unwrap(), ArmaOrder::WHITE_NOISE);
    }

    #[test]
    fn short_series_rejected() {
        assert!(select_arma_order(&[0.1; 20], 2, 2).is_err());
    }
}
