use crate::error::{Result, VarError};
use crate::market_data::{is_constant, mean, sample_sd};
use crate::statfun::{fit_t_mle, normal_quantile, t_quantile};

pub const MIN_HS_WINDOW: usize = 20;
pub const MIN_T_WINDOW: usize = 20;

fn check_confidence(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(VarError::InvalidArgument(format!("confidence must lie in (0, 1), got {p}")))
    }
}

fn sorted_window(window: &[f64]) -> Result<Vec<f64>> {
    if window.len() < MIN_HS_WINDOW {
        return Err(VarError::InsufficientData {
            needed: MIN_HS_WINDOW,
            got: window.len(),
        });
    }
    if window.iter().any(|x| !x.is_finite()) {
        return Err(VarError::InvalidArgument("non-finite return in window".into()));
    }
    let mut sorted = window.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted)
}

/// Number of largest losses struck before reading off the VaR: `floor(n * (1 - p))`.
fn struck_count(n: usize, p: f64) -> usize {
    // The small offset absorbs rounding in 1 - p (e.g. 20 * 0.05 = 0.99999...).
    let k = (n as f64 * (1.0 - p) + 1e-9).floor() as usize;
    k.min(n - 1)
}

/// Historical simulation by counting: strike the `floor(n * (1 - p))` worst
/// returns, the VaR is the worst one remaining.
pub fn hs_var(window: &[f64], p: f64) -> Result<f64> {
    check_confidence(p)?;
    let sorted = sorted_window(window)?;
    Ok(sorted[struck_count(sorted.len(), p)])
}

/// Linearly interpolated empirical quantile at `1 - p` (positions `(n - 1) * (1 - p)`).
pub fn hs_var_interpolated(window: &[f64], p: f64) -> Result<f64> {
    check_confidence(p)?;
    let sorted = sorted_window(window)?;
    let h = (sorted.len() - 1) as f64 * (1.0 - p);
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    Ok(sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo]))
}

fn moments(window: &[f64]) -> Result<(f64, f64)> {
    if window.len() < 2 {
        return Err(VarError::InsufficientData { needed: 2, got: window.len() });
    }
    let sd = sample_sd(window);
    if !(sd > 0.0 && sd.is_finite()) || is_constant(window) {
        return Err(VarError::Degenerate("window has zero standard deviation".into()));
    }
    Ok((mean(window), sd))
}

/// `mean * [include_mean] + z_{1-p} * sd`.
pub fn vc_var_normal(window: &[f64], p: f64, include_mean: bool) -> Result<f64> {
    check_confidence(p)?;
    let (m, sd) = moments(window)?;
    let z = normal_quantile(1.0 - p)?;
    Ok(if include_mean { m } else { 0.0 } + z * sd)
}

/// `mean * [include_mean] + t_{1-p,v} * sd` for a given `v`; with
/// `standardized` the quantile is multiplied by `sqrt((v - 2) / v)`.
pub fn vc_var_t_with_dof(mean: f64, sd: f64, dof: f64, p: f64, include_mean: bool, standardized: bool) -> Result<f64> {
    check_confidence(p)?;
    let mut q = t_quantile(1.0 - p, dof)?;
    if standardized {
        if !(dof > 2.0) {
            return Err(VarError::InvalidArgument(format!(
                "standardized t quantile needs dof > 2, got {dof}"
            )));
        }
        q *= ((dof - 2.0) / dof).sqrt();
    }
    Ok(if include_mean { mean } else { 0.0 } + q * sd)
}

/// Variance-covariance VaR with a Student-t quantile whose degrees of freedom
/// are fitted by maximum likelihood on the window. A fit that fails to
/// converge is reported as [`VarError::Optimization`].
pub fn vc_var_t(window: &[f64], p: f64, include_mean: bool, standardized: bool) -> Result<f64> {
    check_confidence(p)?;
    if window.len() < MIN_T_WINDOW {
        return Err(VarError::InsufficientData {
            needed: MIN_T_WINDOW,
            got: window.len(),
        });
    }
    let (m, sd) = moments(window)?;
    let fit = fit_t_mle(window)?;
    if !fit.converged {
        return Err(VarError::Optimization(format!(
            "t fit did not converge (dof {:.4})",
            fit.dof
        )));
    }
    vc_var_t_with_dof(m, sd, fit.dof, p, include_mean, standardized)
}

/// Square-root-of-time rule: `var_1d * sqrt(horizon)`.
pub fn scale_var(var_1d: f64, horizon: usize) -> Result<f64> {
    if horizon == 0 {
        return Err(VarError::InvalidArgument("horizon must be at least 1".into()));
    }
    Ok(var_1d * (horizon as f64).sqrt())
}
