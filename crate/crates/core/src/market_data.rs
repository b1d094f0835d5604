//! Price ingestion, log returns at arbitrary horizons, and descriptive statistics.
//!
//! Input is treated as an evenly indexed trading-day sequence: gaps in the
//! calendar (weekends, holidays) are not interpolated.

use std::io::{BufRead, BufReader, Read, Write};

use chrono::{Months, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Result, VarError};
use crate::statfun::{chisq_sf, t_sf};

pub const PRICE_HEADER: &str = "date,price";
pub const DATE_FORMAT: &str = "%Y-%m-%d";

/// Ordered daily price observations, strictly positive, strictly increasing dates.
#[derive(Debug, Clone, PartialEq)]
pub struct PriceSeries {
    dates: Vec<NaiveDate>,
    prices: Vec<f64>,
}

impl PriceSeries {
    /// Builds a series from rows in any order; rows are sorted by date.
    pub fn new(mut rows: Vec<(NaiveDate, f64)>) -> Result<Self> {
        for (i, &(_, p)) in rows.iter().enumerate() {
            if !(p > 0.0 && p.is_finite()) {
                return Err(VarError::NonPositivePrice { line: i + 1, price: p });
            }
        }
        rows.sort_by_key(|r| r.0);
        if let Some(w) = rows.windows(2).find(|w| w[0].0 == w[1].0) {
            return Err(VarError::DuplicateDate(w[0].0.to_string()));
        }
        if rows.len() < 2 {
            return Err(VarError::InsufficientData {
                needed: 2,
                got: rows.len(),
            });
        }
        let (dates, prices) = rows.into_iter().unzip();
        Ok(Self { dates, prices })
    }

    pub fn len(&self) -> usize {
        self.prices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.prices.is_empty()
    }

    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    pub fn prices(&self) -> &[f64] {
        &self.prices
    }

    pub fn first_date(&self) -> NaiveDate {
        self.dates[0]
    }

    pub fn last_date(&self) -> NaiveDate {
        self.dates[self.dates.len() - 1]
    }

    /// Observations dated on or after `last_date - years`.
    pub fn last_years(&self, years: u32) -> Result<PriceSeries> {
        let cutoff = self
            .last_date()
            .checked_sub_months(Months::new(12 * years))
            .ok_or_else(|| VarError::InvalidArgument(format!("span of {years} years out of range")))?;
        let start = self.dates.partition_point(|d| *d < cutoff);
        PriceSeries::new(
            self.dates[start..]
                .iter()
                .copied()
                .zip(self.prices[start..].iter().copied())
                .collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{PRICE_HEADER}")?;
        for (d, p) in self.dates.iter().zip(&self.prices) {
            writeln!(out, "{},{}", d.format(DATE_FORMAT), p)?;
        }
        Ok(())
    }
}

/// Reads `date,price` delimited text. Line numbers in errors are 1-based and
/// count the header.
pub fn load_prices<R: Read>(source: R) -> Result<PriceSeries> {
    let reader = BufReader::new(source);
    let mut rows = Vec::new();
    let mut header_seen = false;
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx + 1;
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        if !header_seen {
            let normalized: String = line.trim_start_matches('\u{feff}').split(',').map(str::trim).collect::<Vec<_>>().join(",");
            if normalized.to_ascii_lowercase() != PRICE_HEADER {
                return Err(VarError::BadHeader {
                    expected: PRICE_HEADER.into(),
                });
            }
            header_seen = true;
            continue;
        }
        let mut fields = line.split(',');
        let (Some(date), Some(price), None) = (fields.next(), fields.next(), fields.next()) else {
            return Err(VarError::MalformedRow {
                line: line_no,
                reason: "expected exactly two fields".into(),
            });
        };
        let date = NaiveDate::parse_from_str(date.trim(), DATE_FORMAT).map_err(|e| VarError::MalformedRow {
            line: line_no,
            reason: format!("bad date `{}`: {e}", date.trim()),
        })?;
        let price: f64 = price.trim().parse().map_err(|_| VarError::MalformedRow {
            line: line_no,
            reason: format!("bad price `{}`", price.trim()),
        })?;
        if !(price > 0.0 && price.is_finite()) {
            return Err(VarError::NonPositivePrice { line: line_no, price });
        }
        rows.push((date, price));
    }
    if !header_seen {
        return Err(VarError::BadHeader {
            expected: PRICE_HEADER.into(),
        });
    }
    PriceSeries::new(rows)
}

/// Log returns at a fixed horizon, one per trading day (overlapping when h > 1).
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnSeries {
    horizon: usize,
    start_dates: Vec<NaiveDate>,
    dates: Vec<NaiveDate>,
    values: Vec<f64>,
}

impl ReturnSeries {
    /// Assembles a series from explicit start dates, end dates and values.
    pub fn from_parts(horizon: usize, start_dates: Vec<NaiveDate>, dates: Vec<NaiveDate>, values: Vec<f64>) -> Result<Self> {
        if horizon == 0 {
            return Err(VarError::InvalidArgument("horizon must be positive".into()));
        }
        if start_dates.len() != values.len() || dates.len() != values.len() {
            return Err(VarError::InvalidArgument("date and value lengths differ".into()));
        }
        if dates.windows(2).any(|w| w[0] >= w[1]) {
            return Err(VarError::InvalidArgument("dates must be strictly increasing".into()));
        }
        Ok(Self {
            horizon,
            start_dates,
            dates,
            values,
        })
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// End date `t` of each return.
    pub fn dates(&self) -> &[NaiveDate] {
        &self.dates
    }

    /// Date `t - h` of the price each return starts from.
    pub fn start_dates(&self) -> &[NaiveDate] {
        &self.start_dates
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "date,return")?;
        for (d, r) in self.dates.iter().zip(&self.values) {
            writeln!(out, "{},{}", d.format(DATE_FORMAT), r)?;
        }
        Ok(())
    }
}

/// `r_t = ln(K_t / K_{t-h})` for every `t >= h`.
pub fn log_returns(prices: &PriceSeries, h: usize) -> Result<ReturnSeries> {
    if h == 0 {
        return Err(VarError::InvalidArgument("horizon must be positive".into()));
    }
    let n = prices.len();
    if h >= n {
        return Err(VarError::InsufficientData { needed: h + 1, got: n });
    }
    let k = prices.prices();
    let values = (h..n).map(|t| (k[t] / k[t - h]).ln()).collect();
    Ok(ReturnSeries {
        horizon: h,
        start_dates: prices.dates()[..n - h].to_vec(),
        dates: prices.dates()[h..].to_vec(),
        values,
    })
}

/// Sample statistics; kurtosis is non-excess (normal = 3).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatsSummary {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    pub sd: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub df: Option<f64>,
    pub p_value: f64,
    pub reject: bool,
    pub significance: f64,
}

impl TestResult {
    fn new(statistic: f64, df: Option<f64>, p_value: f64, significance: f64) -> Self {
        let p_value = p_value.clamp(0.0, 1.0);
        Self {
            statistic,
            df,
            p_value,
            reject: p_value < significance,
            significance,
        }
    }
}

/// True when every value equals the first; rounding in the mean makes a
/// zero-variance check unreliable for such samples.
pub fn is_constant(x: &[f64]) -> bool {
    x.iter().all(|v| *v == x[0])
}

pub fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Sample standard deviation with divisor `n - 1`.
pub fn sample_sd(x: &[f64]) -> f64 {
    let m = mean(x);
    (x.iter().map(|r| (r - m) * (r - m)).sum::<f64>() / (x.len() as f64 - 1.0)).sqrt()
}

pub fn descriptive_stats(x: &[f64]) -> Result<StatsSummary> {
    if x.len() < 4 {
        return Err(VarError::InsufficientData { needed: 4, got: x.len() });
    }
    let n = x.len() as f64;
    let mean = mean(x);
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &r in x {
        let d = r - mean;
        let d2 = d * d;
        m2 += d2;
        m3 += d2 * d;
        m4 += d2 * d2;
    }
    if !(m2 > 0.0) || is_constant(x) {
        return Err(VarError::Degenerate("constant series: moments undefined".into()));
    }
    let sd = (m2 / (n - 1.0)).sqrt();
    m2 /= n;
    m3 /= n;
    m4 /= n;
    let min = x.iter().copied().fold(f64::INFINITY, f64::min);
    let max = x.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(StatsSummary {
        n: x.len(),
        min,
        max,
        mean: mean.clamp(min, max),
        sd,
        skewness: m3 / m2.powf(1.5),
        kurtosis: m4 / (m2 * m2),
    })
}

fn check_significance(s: f64) -> Result<()> {
    if s > 0.0 && s < 1.0 {
        Ok(())
    } else {
        Err(VarError::InvalidArgument(format!("significance must lie in (0, 1), got {s}")))
    }
}

/// Jarque-Bera statistic from sample skewness and kurtosis, chi-squared(2) reference.
pub fn jarque_bera(x: &[f64], significance: f64) -> Result<TestResult> {
    check_significance(significance)?;
    if x.len() < 8 {
        return Err(VarError::InsufficientData { needed: 8, got: x.len() });
    }
    let s = descriptive_stats(x)?;
    let jb = jarque_bera_statistic(s.n, s.skewness, s.kurtosis);
    Ok(TestResult::new(jb, Some(2.0), chisq_sf(jb, 2.0), significance))
}

pub fn jarque_bera_statistic(n: usize, skewness: f64, kurtosis: f64) -> f64 {
    n as f64 * (skewness * skewness / 6.0 + (kurtosis - 3.0).powi(2) / 24.0)
}

/// Two-sided one-sample t-test of a zero mean, Student-t with `n - 1` df.
pub fn mean_zero_ttest(x: &[f64], significance: f64) -> Result<TestResult> {
    check_significance(significance)?;
    if x.len() < 2 {
        return Err(VarError::InsufficientData { needed: 2, got: x.len() });
    }
    let sd = sample_sd(x);
    if !(sd > 0.0) || is_constant(x) {
        return Err(VarError::Degenerate("zero standard deviation".into()));
    }
    let n = x.len() as f64;
    let t = mean(x) / (sd / n.sqrt());
    let df = n - 1.0;
    let p = 2.0 * t_sf(t.abs(), df);
    Ok(TestResult::new(t, Some(df), p, significance))
}
