//! Normal, Student-t and chi-squared distribution functions and quantiles.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use super::special::{beta_reg, erfc, gamma_p, gamma_q, ln_gamma};
use crate::error::{Result, VarError};

fn check_prob(q: f64) -> Result<()> {
    if q > 0.0 && q < 1.0 {
        Ok(())
    } else {
        Err(VarError::InvalidArgument(format!(
            "probability must lie in (0, 1), got {q}"
        )))
    }
}

fn check_dof(v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(VarError::InvalidArgument(format!(
            "degrees of freedom must be positive and finite, got {v}"
        )))
    }
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x * FRAC_1_SQRT_2)
}

/// Inverse of the standard normal CDF.
///
/// Acklam's rational approximation (relative error about 1e-9) followed by
/// one Halley step against [`normal_cdf`].
pub fn normal_quantile(q: f64) -> Result<f64> {
    check_prob(q)?;
    if q > 0.5 {
        return Ok(-lower_normal_quantile(1.0 - q));
    }
    Ok(lower_normal_quantile(q))
}

fn lower_normal_quantile(q: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;

    if q == 0.5 {
        return 0.0;
    }
    let x = if q < P_LOW {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    } else {
        let u = q - 0.5;
        let r = u * u;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * u
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    // Halley refinement
    let e = normal_cdf(x) - q;
    let u = e * (2.0 * PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Student-t density with `v` degrees of freedom.
pub fn t_pdf(x: f64, v: f64) -> f64 {
    t_ln_pdf(x, v).exp()
}

pub(crate) fn t_ln_pdf(x: f64, v: f64) -> f64 {
    ln_gamma(0.5 * (v + 1.0)) - ln_gamma(0.5 * v) - 0.5 * (v * PI).ln()
        - 0.5 * (v + 1.0) * (x * x / v).ln_1p()
}

/// Student-t CDF with `v` degrees of freedom.
pub fn t_cdf(x: f64, v: f64) -> f64 {
    if x == 0.0 {
        return 0.5;
    }
    if x > 0.0 {
        return 1.0 - t_lower_tail(-x, v);
    }
    t_lower_tail(x, v)
}

/// Upper tail probability `1 - T_v(x)`.
pub fn t_sf(x: f64, v: f64) -> f64 {
    t_cdf(-x, v)
}

// P(T <= x) for x < 0, keeping relative accuracy in the far tail.
fn t_lower_tail(x: f64, v: f64) -> f64 {
    let x2 = x * x;
    if x2 < v {
        let z = x2 / (v + x2);
        0.5 - 0.5 * beta_reg(0.5, 0.5 * v, z, v / (v + x2))
    } else {
        let z = v / (v + x2);
        0.5 * beta_reg(0.5 * v, 0.5, z, x2 / (v + x2))
    }
}

/// Inverse of the Student-t CDF with real-valued `v > 0`.
pub fn t_quantile(q: f64, v: f64) -> Result<f64> {
    check_prob(q)?;
    check_dof(v)?;
    if q == 0.5 {
        return Ok(0.0);
    }
    if q > 0.5 {
        return Ok(-lower_t_quantile(1.0 - q, v));
    }
    Ok(lower_t_quantile(q, v))
}

fn lower_t_quantile(q: f64, v: f64) -> f64 {
    if v == 1.0 {
        return (PI * (q - 0.5)).tan();
    }
    if v == 2.0 {
        return (2.0 * q - 1.0) / (2.0 * q * (1.0 - q)).sqrt();
    }
    if v > 1e10 {
        return lower_normal_quantile(q);
    }
    // Cornish-Fisher expansion around the normal quantile.
    let z = lower_normal_quantile(q);
    let z3 = z * z * z;
    let z5 = z3 * z * z;
    let cf = z + (z3 + z) / (4.0 * v) + (5.0 * z5 + 16.0 * z3 + 3.0 * z) / (96.0 * v * v);
    // Power-law tail: T(x) ~ c v^((v-1)/2) |x|^-v.
    let ln_c = ln_gamma(0.5 * (v + 1.0)) - ln_gamma(0.5 * v) - 0.5 * (v * PI).ln();
    let tail = -((ln_c + 0.5 * (v - 1.0) * v.ln() - q.ln()) / v).exp();
    let miss = |x: f64| (t_lower_tail(x.min(-f64::MIN_POSITIVE), v).ln() - q.ln()).abs();
    let guess = if cf < 0.0 && miss(cf) <= miss(tail) { cf } else { tail };
    solve_increasing(|x| t_cdf(x, v), |x| t_pdf(x, v), q, guess, f64::NEG_INFINITY, 0.0)
}

pub fn chisq_cdf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    gamma_p(0.5 * df, 0.5 * x)
}

/// Chi-squared upper tail probability `P(X > x)`.
pub fn chisq_sf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    gamma_q(0.5 * df, 0.5 * x)
}

fn chisq_pdf(x: f64, df: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let k = 0.5 * df;
    ((k - 1.0) * x.ln() - 0.5 * x - k * 2f64.ln() - ln_gamma(k)).exp()
}

/// Inverse of the chi-squared CDF.
pub fn chisq_quantile(q: f64, df: f64) -> Result<f64> {
    check_prob(q)?;
    check_dof(df)?;
    if df == 2.0 {
        return Ok(-2.0 * (-q).ln_1p());
    }
    if df == 1.0 {
        // Square of a standard normal: upper tail mass (1 - q) split over both sides.
        let z = lower_normal_quantile(0.5 * (1.0 - q));
        return Ok(z * z);
    }
    // Wilson-Hilferty start, falling back to the small-x power law.
    let z = normal_quantile(q)?;
    let h = 2.0 / (9.0 * df);
    let wh = df * (1.0 - h + z * h.sqrt()).powi(3);
    let k = 0.5 * df;
    let small = ((q.ln() + ln_gamma(k + 1.0)) / k).exp() * 2.0;
    let guess = if wh > 0.0 { wh } else { small };
    Ok(solve_increasing(
        |x| chisq_cdf(x, df),
        |x| chisq_pdf(x, df),
        q,
        guess,
        0.0,
        f64::INFINITY,
    ))
}

/// Safeguarded Newton iteration for an increasing CDF on `(lo_limit, hi_limit)`.
fn solve_increasing<F, P>(cdf: F, pdf: P, target: f64, guess: f64, lo_limit: f64, hi_limit: f64) -> f64
where
    F: Fn(f64) -> f64,
    P: Fn(f64) -> f64,
{
    // Bracket the root by geometric expansion away from the guess.
    let mut lo;
    let mut hi;
    let g = guess;
    if cdf(g) > target {
        hi = g;
        let mut step = g.abs().max(1.0);
        lo = g - step;
        while lo > lo_limit && cdf(lo) > target {
            hi = lo;
            step *= 2.0;
            lo -= step;
            if !lo.is_finite() {
                break;
            }
        }
        if lo <= lo_limit {
            lo = lo_limit;
        }
    } else {
        lo = g;
        let mut step = g.abs().max(1.0);
        hi = g + step;
        while hi < hi_limit && cdf(hi) < target {
            lo = hi;
            step *= 2.0;
            hi += step;
            if !hi.is_finite() {
                break;
            }
        }
        if hi >= hi_limit {
            hi = hi_limit;
        }
    }

    let mut x = g.clamp(
        if lo.is_finite() { lo } else { g.min(hi) },
        if hi.is_finite() { hi } else { g.max(lo) },
    );
    for _ in 0..400 {
        let fx = cdf(x) - target;
        if fx == 0.0 {
            return x;
        }
        if fx < 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let d = pdf(x);
        let mut next = if d > 0.0 { x - fx / d } else { f64::NAN };
        if !(next > lo && next < hi) {
            next = if lo.is_finite() && hi.is_finite() {
                0.5 * (lo + hi)
            } else if lo.is_finite() {
                lo + 2.0 * (x - lo).abs().max(1.0)
            } else {
                hi - 2.0 * (hi - x).abs().max(1.0)
            };
        }
        if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) {
            return next;
        }
        x = next;
    }
    x
}
