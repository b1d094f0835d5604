use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Result, VarError};
use crate::market_data::DATE_FORMAT;

pub const FORECAST_HEADER: &str = "as_of_date,value,method,mode,confidence,horizon,carried_forward";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "HS")]
    Hs,
    #[serde(rename = "VC-normal")]
    VcNormal,
    #[serde(rename = "VC-t")]
    VcT,
    #[serde(rename = "GARCH-normal")]
    GarchNormal,
    #[serde(rename = "GARCH-t")]
    GarchT,
}

impl Method {
    pub const ALL: [Method; 5] = [Method::Hs, Method::VcNormal, Method::VcT, Method::GarchNormal, Method::GarchT];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Hs => "HS",
            Method::VcNormal => "VC-normal",
            Method::VcT => "VC-t",
            Method::GarchNormal => "GARCH-normal",
            Method::GarchT => "GARCH-t",
        }
    }

    pub fn is_garch(self) -> bool {
        matches!(self, Method::GarchNormal | Method::GarchT)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = VarError;

    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| VarError::InvalidArgument(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Estimated from h-day returns.
    Direct,
    /// Estimated from 1-day returns and multiplied by `sqrt(T)`.
    Scaled,
}

impl Mode {
    pub const ALL: [Mode; 2] = [Mode::Direct, Mode::Scaled];

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Direct => "direct",
            Mode::Scaled => "scaled",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = VarError;

    fn from_str(s: &str) -> Result<Self> {
        Mode::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| VarError::InvalidArgument(format!("unknown mode `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarForecast {
    /// Date of the last observation in the estimation window.
    pub as_of_date: NaiveDate,
    /// Signed return quantile, negative in the loss region.
    pub value: f64,
    pub carried_forward: bool,
}

/// Forecasts on a daily grid sharing method, mode, confidence, horizon and window.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VarForecastSeries {
    pub method: Method,
    pub mode: Mode,
    pub confidence: f64,
    pub horizon: usize,
    /// Estimation window length; unknown when read back from a file.
    pub window: Option<usize>,
    pub entries: Vec<VarForecast>,
}

impl VarForecastSeries {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn carried_dates(&self) -> Vec<NaiveDate> {
        self.entries.iter().filter(|e| e.carried_forward).map(|e| e.as_of_date).collect()
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{FORECAST_HEADER}")?;
        for e in &self.entries {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.as_of_date.format(DATE_FORMAT),
                e.value,
                self.method,
                self.mode,
                self.confidence,
                self.horizon,
                e.carried_forward
            )?;
        }
        Ok(())
    }

    pub fn read_csv<R: Read>(source: R) -> Result<Self> {
        let reader = BufReader::new(source);
        let mut lines = reader.lines().enumerate();
        match lines.next() {
            Some((_, Ok(h))) if h.trim() == FORECAST_HEADER => {}
            Some((_, Err(e))) => return Err(e.into()),
            _ => {
                return Err(VarError::BadHeader {
                    expected: FORECAST_HEADER.into(),
                })
            }
        }
        let mut meta: Option<(Method, Mode, f64, usize)> = None;
        let mut entries = Vec::new();
        for (idx, line) in lines {
            let line_no = idx + 1;
            let line = line?;
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let bad = |reason: String| VarError::MalformedRow { line: line_no, reason };
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(bad(format!("expected 7 fields, got {}", f.len())));
            }
            let as_of_date = NaiveDate::parse_from_str(f[0], DATE_FORMAT).map_err(|e| bad(format!("bad date: {e}")))?;
            let value: f64 = f[1].parse().map_err(|_| bad(format!("bad value `{}`", f[1])))?;
            let method: Method = f[2].parse().map_err(|e: VarError| bad(e.to_string()))?;
            let mode: Mode = f[3].parse().map_err(|e: VarError| bad(e.to_string()))?;
            let confidence: f64 = f[4].parse().map_err(|_| bad(format!("bad confidence `{}`", f[4])))?;
            let horizon: usize = f[5].parse().map_err(|_| bad(format!("bad horizon `{}`", f[5])))?;
            let carried_forward: bool = f[6].parse().map_err(|_| bad(format!("bad flag `{}`", f[6])))?;
            let row_meta = (method, mode, confidence, horizon);
            match meta {
                None => meta = Some(row_meta),
                Some(m) if m == row_meta => {}
                Some(_) => return Err(bad("metadata differs from earlier rows".into())),
            }
            if let Some(prev) = entries.last().map(|e: &VarForecast| e.as_of_date) {
                if as_of_date <= prev {
                    return Err(bad("dates must be strictly increasing".into()));
                }
            }
            entries.push(VarForecast {
                as_of_date,
                value,
                carried_forward,
            });
        }
        let (method, mode, confidence, horizon) =
            meta.ok_or(VarError::InsufficientData { needed: 1, got: 0 })?;
        Ok(Self {
            method,
            mode,
            confidence,
            horizon,
            window: None,
            entries,
        })
    }
}
