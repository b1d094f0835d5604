//! Exceedance counting, Kupiec unconditional coverage and Christoffersen
//! independence / conditional coverage tests.

mod report;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use report::{backtest_report, BacktestReport, BacktestRun, ConfidenceTables};

use crate::error::{Result, VarError};
use crate::statfun::chisq_quantile;
use crate::var_engine::AlignedPairs;

/// Breach indicators in time order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExceedanceSequence {
    pub indicators: Vec<bool>,
    /// Nominal breach probability `1 - p`.
    pub alpha: f64,
}

impl ExceedanceSequence {
    pub fn new(indicators: Vec<bool>, alpha: f64) -> Result<Self> {
        check_alpha(alpha)?;
        if indicators.is_empty() {
            return Err(VarError::InsufficientData { needed: 1, got: 0 });
        }
        Ok(Self { indicators, alpha })
    }

    pub fn n(&self) -> usize {
        self.indicators.len()
    }

    pub fn x(&self) -> usize {
        self.indicators.iter().filter(|b| **b).count()
    }

    pub fn frequency(&self) -> f64 {
        self.x() as f64 / self.n() as f64
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 1.0 {
        Ok(())
    } else {
        Err(VarError::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha}")))
    }
}

/// A breach is a realized return strictly below the VaR.
pub fn exceedances(pairs: &AlignedPairs, alpha: f64) -> Result<ExceedanceSequence> {
    exceedances_from(&pairs.forecasts, &pairs.realized, alpha)
}

pub fn exceedances_from(forecasts: &[f64], realized: &[f64], alpha: f64) -> Result<ExceedanceSequence> {
    if forecasts.len() != realized.len() {
        return Err(VarError::InvalidArgument("forecast and realized lengths differ".into()));
    }
    let ind = forecasts.iter().zip(realized).map(|(v, r)| r < v).collect();
    ExceedanceSequence::new(ind, alpha)
}

/// `alpha * n` rounded half away from zero.
pub fn expected_exceedances(n: usize, alpha: f64) -> u64 {
    (alpha * n as f64).round() as u64
}

/// `k * ln(p)` with the convention `0 * ln 0 = 0`.
fn xlny(k: f64, p: f64) -> f64 {
    if k == 0.0 {
        0.0
    } else {
        k * p.ln()
    }
}

/// Kupiec likelihood ratio for `x` breaches in `n` trials at breach probability `alpha`.
pub fn kupiec_lr(x: usize, n: usize, alpha: f64) -> Result<f64> {
    check_alpha(alpha)?;
    if n == 0 || x > n {
        return Err(VarError::InvalidArgument(format!("need 0 <= x <= n and n >= 1, got x = {x}, n = {n}")));
    }
    let (xf, nf) = (x as f64, n as f64);
    let rate = xf / nf;
    let restricted = xlny(nf - xf, 1.0 - alpha) + xlny(xf, alpha);
    let unrestricted = xlny(nf - xf, 1.0 - rate) + xlny(xf, rate);
    Ok((-2.0 * (restricted - unrestricted)).max(0.0))
}

/// Likelihood ratio with its chi-square critical value and decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CoverageTest {
    pub lr: f64,
    pub critical: f64,
    pub reject: bool,
}

impl CoverageTest {
    fn decide(lr: f64, df: f64, test_significance: f64) -> Result<Self> {
        if !(test_significance > 0.0 && test_significance < 1.0) {
            return Err(VarError::InvalidArgument(format!(
                "test significance must lie in (0, 1), got {test_significance}"
            )));
        }
        let critical = chisq_quantile(1.0 - test_significance, df)?;
        Ok(Self {
            lr,
            critical,
            reject: lr > critical,
        })
    }
}

pub fn kupiec_uc(x: usize, n: usize, alpha: f64, test_significance: f64) -> Result<CoverageTest> {
    CoverageTest::decide(kupiec_lr(x, n, alpha)?, 1.0, test_significance)
}

/// Transition counts `[n00, n01, n10, n11]` of consecutive indicator pairs.
pub fn transition_counts(seq: &ExceedanceSequence) -> [usize; 4] {
    let mut c = [0usize; 4];
    for w in seq.indicators.windows(2) {
        c[usize::from(w[0]) * 2 + usize::from(w[1])] += 1;
    }
    c
}

/// First-order Markov independence likelihood ratio.
///
/// Cells with an empty denominator contribute nothing, so constant sequences give 0.
pub fn christoffersen_ind(seq: &ExceedanceSequence) -> Result<f64> {
    if seq.n() < 2 {
        return Err(VarError::InsufficientData { needed: 2, got: seq.n() });
    }
    let [n00, n01, n10, n11] = transition_counts(seq).map(|c| c as f64);
    let pi = (n01 + n11) / (seq.n() - 1) as f64;
    let pi01 = if n00 + n01 > 0.0 { n01 / (n00 + n01) } else { 0.0 };
    let pi11 = if n10 + n11 > 0.0 { n11 / (n10 + n11) } else { 0.0 };
    let restricted = xlny(n00 + n10, 1.0 - pi) + xlny(n01 + n11, pi);
    let unrestricted = xlny(n00, 1.0 - pi01) + xlny(n01, pi01) + xlny(n10, 1.0 - pi11) + xlny(n11, pi11);
    Ok((-2.0 * (restricted - unrestricted)).max(0.0))
}

/// `LR_cc = LR_uc + LR_ind` against the 2-df critical value.
pub fn christoffersen_cc(seq: &ExceedanceSequence, test_significance: f64) -> Result<CoverageTest> {
    let lr = kupiec_lr(seq.x(), seq.n(), seq.alpha)? + christoffersen_ind(seq)?;
    CoverageTest::decide(lr, 2.0, test_significance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "overestimates risk")]
    Overestimates,
    #[serde(rename = "underestimates risk")]
    Underestimates,
    #[serde(rename = "matches")]
    Matches,
}

impl fmt::Display for Classification {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Classification::Overestimates => "overestimates risk",
            Classification::Underestimates => "underestimates risk",
            Classification::Matches => "matches",
        })
    }
}

/// More breaches than expected means the VaR sits too high, i.e. risk is underestimated.
pub fn classify(x: u64, expected: u64) -> Classification {
    match x.cmp(&expected) {
        std::cmp::Ordering::Greater => Classification::Underestimates,
        std::cmp::Ordering::Less => Classification::Overestimates,
        std::cmp::Ordering::Equal => Classification::Matches,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestResult {
    pub n: usize,
    pub x: usize,
    pub expected: u64,
    pub alpha: f64,
    pub lr_uc: f64,
    pub crit_uc: f64,
    pub reject_uc: bool,
    pub lr_ind: f64,
    pub lr_cc: f64,
    pub crit_cc: f64,
    pub reject_cc: bool,
    pub classification: Classification,
}

/// Test significance tied to the VaR level: 5% tests for 95% VaR, 1% for 99%.
pub fn default_test_significance(confidence: f64) -> f64 {
    1.0 - confidence
}

pub fn run_backtest(seq: &ExceedanceSequence, significance_uc: f64, significance_cc: f64) -> Result<BacktestResult> {
    let (n, x) = (seq.n(), seq.x());
    let uc = kupiec_uc(x, n, seq.alpha, significance_uc)?;
    let lr_ind = christoffersen_ind(seq)?;
    let cc = CoverageTest::decide(uc.lr + lr_ind, 2.0, significance_cc)?;
    let expected = expected_exceedances(n, seq.alpha);
    Ok(BacktestResult {
        n,
        x,
        expected,
        alpha: seq.alpha,
        lr_uc: uc.lr,
        crit_uc: uc.critical,
        reject_uc: uc.reject,
        lr_ind,
        lr_cc: cc.lr,
        crit_cc: cc.critical,
        reject_cc: cc.reject,
        classification: classify(x as u64, expected),
    })
}
