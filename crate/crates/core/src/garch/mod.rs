//! ARMA-mean GARCH(1,1) under normal or standardized Student-t innovations.
//!
//! Variance recursion: `s2_t = omega + alpha * eps_{t-1}^2 + beta * s2_{t-1}`,
//! started at the sample variance of the mean-equation residuals. The
//! optimizer works on unconstrained coordinates:
//!
//! - `omega = exp(a)`
//! - `alpha + beta = MAX_PERSISTENCE * logistic(b)`, so persistence stays below one
//! - `alpha = (alpha + beta) * logistic(c)`, `beta` takes the remainder
//! - `dof = DOF_MIN + (DOF_MAX - DOF_MIN) * logistic(d)` for t innovations
//!
//! Both bounds make the likelihood flat at the edge, so fits drifting
//! towards an integrated or Gaussian model still converge.

pub mod arma;

use serde::{Deserialize, Serialize};

pub use arma::{fit_arma, select_arma_order, ArmaFit, ArmaOrder};

use crate::error::{Result, VarError};
use crate::optim::{minimize, SimplexOptions};
use crate::statfun::special::ln_gamma;
use crate::statfun::{normal_quantile, t_quantile};
use arma::{arma_next_mean, arma_residuals, unpack_mean};

/// Lower bound on the t degrees of freedom; above 2 so the variance exists.
pub const DOF_MIN: f64 = 2.1;
pub const DOF_MAX: f64 = 100.0;
const MAX_PERSISTENCE: f64 = 1.0 - 1e-6;
const START_DOF: f64 = 8.0;
const START_ALPHA: f64 = 0.05;
const START_BETA: f64 = 0.90;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Innovations {
    Normal,
    #[serde(rename = "t")]
    StudentT,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchParams {
    /// Unconditional mean of the ARMA equation.
    pub mu: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    /// Degrees of freedom, present only for t innovations.
    pub dof: Option<f64>,
}

impl GarchParams {
    pub fn order(&self) -> ArmaOrder {
        ArmaOrder::new(self.ar.len(), self.ma.len())
    }

    /// ARMA intercept `c = mu * (1 - sum(ar))`.
    pub fn intercept(&self) -> f64 {
        self.mu * (1.0 - self.ar.iter().sum::<f64>())
    }

    /// Residuals and filtered conditional variances over `r`.
    pub fn filter(&self, r: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut eps = vec![0.0; r.len()];
        arma_residuals(r, self.mu, &self.ar, &self.ma, &mut eps);
        let mut s2 = vec![0.0; r.len()];
        variance_filter(&eps, self.omega, self.alpha, self.beta, &mut s2);
        (eps, s2)
    }
}

fn variance_filter(eps: &[f64], omega: f64, alpha: f64, beta: f64, s2: &mut [f64]) {
    if eps.is_empty() {
        return;
    }
    s2[0] = eps.iter().map(|e| e * e).sum::<f64>() / eps.len() as f64;
    for t in 1..eps.len() {
        s2[t] = omega + alpha * eps[t - 1] * eps[t - 1] + beta * s2[t - 1];
    }
}

fn loglik(eps: &[f64], s2: &[f64], innovations: Innovations, dof: Option<f64>) -> f64 {
    match innovations {
        Innovations::Normal => {
            let c = (2.0 * std::f64::consts::PI).ln();
            -0.5 * eps.iter().zip(s2).map(|(e, v)| c + v.ln() + e * e / v).sum::<f64>()
        }
        Innovations::StudentT => {
            let v = dof.unwrap_or(f64::NAN);
            let norm = ln_gamma(0.5 * (v + 1.0)) - ln_gamma(0.5 * v) - 0.5 * (std::f64::consts::PI * (v - 2.0)).ln();
            let k = 0.5 * (v + 1.0);
            eps.iter()
                .zip(s2)
                .map(|(e, s)| norm - 0.5 * s.ln() - k * (e * e / (s * (v - 2.0))).ln_1p())
                .sum()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchFit {
    pub innovations: Innovations,
    pub params: GarchParams,
    pub residuals: Vec<f64>,
    /// Filtered conditional variances, one per observation.
    pub variances: Vec<f64>,
    pub loglik: f64,
    /// Log-likelihood at the optimizer's starting point.
    pub initial_loglik: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// Compact structured summary of a fit, without the filtered series.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GarchSummary {
    pub order: ArmaOrder,
    pub innovations: Innovations,
    pub intercept: f64,
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
    pub omega: f64,
    pub alpha: f64,
    pub beta: f64,
    pub dof: Option<f64>,
    pub loglik: f64,
    pub converged: bool,
}

impl GarchFit {
    pub fn order(&self) -> ArmaOrder {
        self.params.order()
    }

    pub fn summary(&self) -> GarchSummary {
        GarchSummary {
            order: self.order(),
            innovations: self.innovations,
            intercept: self.params.intercept(),
            ar: self.params.ar.clone(),
            ma: self.params.ma.clone(),
            omega: self.params.omega,
            alpha: self.params.alpha,
            beta: self.params.beta,
            dof: self.params.dof,
            loglik: self.loglik,
            converged: self.converged,
        }
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

fn unpack(order: ArmaOrder, innovations: Innovations, x: &[f64]) -> GarchParams {
    let (mu, ar, ma) = unpack_mean(order, x);
    let k = 1 + order.p + order.q;
    let persistence = MAX_PERSISTENCE * logistic(x[k + 1]);
    let share = logistic(x[k + 2]);
    GarchParams {
        mu,
        ar,
        ma,
        omega: x[k].exp(),
        alpha: persistence * share,
        beta: persistence * (1.0 - share),
        dof: match innovations {
            Innovations::Normal => None,
            Innovations::StudentT => Some(DOF_MIN + (DOF_MAX - DOF_MIN) * logistic(x[k + 3])),
        },
    }
}

/// Joint maximum likelihood of the ARMA mean and GARCH(1,1) variance.
///
/// Non-convergence returns the best point found with `converged = false`.
pub fn fit_arma_garch(r: &[f64], order: ArmaOrder, innovations: Innovations) -> Result<GarchFit> {
    let n = r.len();
    if n < arma::MIN_OBS {
        return Err(VarError::InsufficientData {
            needed: arma::MIN_OBS,
            got: n,
        });
    }
    if r.iter().any(|x| !x.is_finite()) {
        return Err(VarError::InvalidArgument("non-finite return".into()));
    }
    let mean = r.iter().sum::<f64>() / n as f64;
    let var = r.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if !(var > 0.0) || crate::market_data::is_constant(r) {
        return Err(VarError::Degenerate("constant return series".into()));
    }

    let k = 1 + order.p + order.q;
    let dim = k + 3 + usize::from(innovations == Innovations::StudentT);
    let mut start = vec![0.0; dim];
    start[0] = mean;
    let persistence = START_ALPHA + START_BETA;
    start[k] = (var * (1.0 - persistence)).ln();
    start[k + 1] = logit(persistence / MAX_PERSISTENCE);
    start[k + 2] = logit(START_ALPHA / persistence);
    if innovations == Innovations::StudentT {
        start[k + 3] = logit((START_DOF - DOF_MIN) / (DOF_MAX - DOF_MIN));
    }
    let mut steps = vec![0.5; dim];
    steps[0] = 0.1 * var.sqrt();
    for s in &mut steps[1..k] {
        *s = 0.2;
    }

    let mut eps = vec![0.0; n];
    let mut s2 = vec![0.0; n];
    let mut negll = |x: &[f64]| {
        let p = unpack(order, innovations, x);
        if !(p.omega > 0.0 && p.omega.is_finite()) {
            return f64::INFINITY;
        }
        arma_residuals(r, p.mu, &p.ar, &p.ma, &mut eps);
        variance_filter(&eps, p.omega, p.alpha, p.beta, &mut s2);
        if s2.iter().any(|v| !(*v > 0.0)) {
            return f64::INFINITY;
        }
        -loglik(&eps, &s2, innovations, p.dof)
    };

    let initial_loglik = -negll(&start);
    let opts = SimplexOptions {
        rel_tol: 1e-8,
        max_iter: 3000,
        restarts: 2,
    };
    let res = minimize(&mut negll, &start, &steps, &opts);
    let params = unpack(order, innovations, &res.x);
    let (residuals, variances) = params.filter(r);
    let ll = -res.f;
    Ok(GarchFit {
        innovations,
        converged: res.converged && ll.is_finite() && params.alpha + params.beta < 1.0,
        params,
        residuals,
        variances,
        loglik: ll,
        initial_loglik,
        iterations: res.iterations,
    })
}

/// One-step-ahead conditional mean and standard deviation after the last
/// observation of `r`, filtering `r` with the given parameters.
pub fn forecast_one_step(params: &GarchParams, r: &[f64]) -> Result<(f64, f64)> {
    if r.is_empty() {
        return Err(VarError::InsufficientData { needed: 1, got: 0 });
    }
    let (eps, s2) = params.filter(r);
    let last = r.len() - 1;
    let mu_next = arma_next_mean(r, &eps, params.mu, &params.ar, &params.ma);
    let var_next = params.omega + params.alpha * eps[last] * eps[last] + params.beta * s2[last];
    if !(var_next > 0.0 && var_next.is_finite()) {
        return Err(VarError::Degenerate(format!("forecast variance {var_next}")));
    }
    Ok((mu_next, var_next.sqrt()))
}

/// VaR from conditional moments.
///
/// With t innovations and `standardized = true` the t quantile is rescaled by
/// `sqrt((v - 2) / v)` because the innovations have unit variance; `false`
/// uses the raw quantile.
pub fn garch_var(
    mu_next: f64,
    sigma_next: f64,
    p: f64,
    innovations: Innovations,
    dof: Option<f64>,
    standardized: bool,
) -> Result<f64> {
    if !(sigma_next > 0.0 && sigma_next.is_finite()) {
        return Err(VarError::InvalidArgument(format!("sigma must be positive, got {sigma_next}")));
    }
    let q = match innovations {
        Innovations::Normal => normal_quantile(1.0 - p)?,
        Innovations::StudentT => {
            let v = dof.ok_or_else(|| VarError::InvalidArgument("t innovations need dof".into()))?;
            if !(v > 2.0) {
                return Err(VarError::InvalidArgument(format!("dof must exceed 2, got {v}")));
            }
            let raw = t_quantile(1.0 - p, v)?;
            if standardized {
                raw * ((v - 2.0) / v).sqrt()
            } else {
                raw
            }
        }
    };
    Ok(mu_next + q * sigma_next)
}
