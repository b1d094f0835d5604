use std::collections::HashMap;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use super::series::VarForecastSeries;
use crate::error::{Result, VarError};
use crate::market_data::ReturnSeries;

/// Forecasts paired with the first fully out-of-sample realized return.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlignedPairs {
    pub as_of_dates: Vec<NaiveDate>,
    /// End date of each realized return.
    pub realized_dates: Vec<NaiveDate>,
    pub forecasts: Vec<f64>,
    pub realized: Vec<f64>,
    /// Forecasts without a realized return inside the data.
    pub dropped: usize,
}

impl AlignedPairs {
    pub fn len(&self) -> usize {
        self.forecasts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forecasts.is_empty()
    }
}

/// Pairs the forecast made at `t` with the `T`-day return over `(t, t + T]`,
/// i.e. the realized return whose start date is `t`.
pub fn align_for_backtest(forecasts: &VarForecastSeries, realized: &ReturnSeries) -> Result<AlignedPairs> {
    if realized.horizon() != forecasts.horizon {
        return Err(VarError::Alignment(format!(
            "forecast horizon {} but realized returns span {} days",
            forecasts.horizon,
            realized.horizon()
        )));
    }
    let by_start: HashMap<NaiveDate, usize> = realized
        .start_dates()
        .iter()
        .enumerate()
        .map(|(i, d)| (*d, i))
        .collect();
    let mut out = AlignedPairs {
        as_of_dates: Vec::new(),
        realized_dates: Vec::new(),
        forecasts: Vec::new(),
        realized: Vec::new(),
        dropped: 0,
    };
    for e in &forecasts.entries {
        match by_start.get(&e.as_of_date) {
            Some(&i) => {
                out.as_of_dates.push(e.as_of_date);
                out.realized_dates.push(realized.dates()[i]);
                out.forecasts.push(e.value);
                out.realized.push(realized.values()[i]);
            }
            None => out.dropped += 1,
        }
    }
    if out.is_empty() {
        let span = |d: &[NaiveDate]| match (d.first(), d.last()) {
            (Some(a), Some(b)) => format!("{a}..{b}"),
            _ => "empty".to_string(),
        };
        let fdates: Vec<NaiveDate> = forecasts.entries.iter().map(|e| e.as_of_date).collect();
        return Err(VarError::Alignment(format!(
            "no forecast date matches a realized start date (forecasts {}, realized starts {})",
            span(&fdates),
            span(realized.start_dates())
        )));
    }
    Ok(out)
}
