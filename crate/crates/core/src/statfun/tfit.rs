//! Maximum-likelihood fit of a location-scale Student-t distribution.

use serde::{Deserialize, Serialize};

use super::special::ln_gamma;
use crate::error::{Result, VarError};
use crate::optim::{minimize, SimplexOptions};

/// Lower bound of the degrees-of-freedom transform `v = V_MIN + exp(u)`.
pub const V_MIN: f64 = 0.5;
const START_DOF: f64 = 8.0;
pub const MIN_OBS: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TLocScaleFit {
    pub location: f64,
    pub scale: f64,
    pub dof: f64,
    pub loglik: f64,
    pub converged: bool,
}

/// Log-likelihood of `x` under a Student-t with the given location, scale and dof.
pub fn t_loglik(x: &[f64], location: f64, scale: f64, dof: f64) -> f64 {
    if !(scale > 0.0 && dof > 0.0) {
        return f64::NEG_INFINITY;
    }
    let n = x.len() as f64;
    let norm = ln_gamma(0.5 * (dof + 1.0))
        - ln_gamma(0.5 * dof)
        - 0.5 * (dof * std::f64::consts::PI).ln()
        - scale.ln();
    let kernel: f64 = x
        .iter()
        .map(|&r| {
            let z = (r - location) / scale;
            (z * z / dof).ln_1p()
        })
        .sum();
    n * norm - 0.5 * (dof + 1.0) * kernel
}

/// Moment-based starting point used by [`fit_t_mle`]: sample mean, sample sd, dof 8.
pub fn t_start(x: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt(), START_DOF)
}

/// Fit location, scale and degrees of freedom by maximum likelihood.
///
/// Non-convergence is not an error: the best point found is returned with
/// `converged = false` so that rolling callers can carry the last estimate.
pub fn fit_t_mle(x: &[f64]) -> Result<TLocScaleFit> {
    if x.len() < MIN_OBS {
        return Err(VarError::InsufficientData {
            needed: MIN_OBS,
            got: x.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) {
        return Err(VarError::InvalidArgument("non-finite return".into()));
    }
    let (m0, s0, v0) = t_start(x);
    if !(s0 > 0.0) || crate::market_data::is_constant(x) {
        return Err(VarError::Degenerate("constant sample".into()));
    }

    let objective = |p: &[f64]| {
        let scale = p[1].exp();
        let dof = V_MIN + p[2].exp();
        -t_loglik(x, p[0], scale, dof)
    };
    let start = [m0, s0.ln(), (v0 - V_MIN).ln()];
    let steps = [0.1 * s0, 0.1, 0.5];
    let opts = SimplexOptions {
        rel_tol: 1e-8,
        max_iter: 2000,
        restarts: 2,
    };
    let res = minimize(objective, &start, &steps, &opts);
    let loglik = -res.f;
    Ok(TLocScaleFit {
        location: res.x[0],
        scale: res.x[1].exp(),
        dof: V_MIN + res.x[2].exp(),
        loglik,
        converged: res.converged && loglik.is_finite(),
    })
}
