//! Dataset loading and output file naming.

use std::fs::{self, File};
use std::path::{Path, PathBuf};

use varscale_core::market_data::{load_prices, PriceSeries};
use varscale_core::var_engine::{Method, Mode};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone)]
pub struct Dataset {
    pub name: String,
    pub path: PathBuf,
    pub prices: PriceSeries,
}

pub fn dataset_name(path: &Path) -> CliResult<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .filter(|s| !s.is_empty() && !s.contains("__"))
        .map(str::to_string)
        .ok_or_else(|| CliError::Usage(format!("cannot derive a dataset name from {}", path.display())))
}

pub fn load_datasets(inputs: &[PathBuf]) -> CliResult<Vec<Dataset>> {
    let mut out: Vec<Dataset> = Vec::with_capacity(inputs.len());
    for path in inputs {
        let name = dataset_name(path)?;
        if out.iter().any(|d| d.name == name) {
            return Err(CliError::Usage(format!("two inputs share the dataset name `{name}`")));
        }
        let file = File::open(path).map_err(|e| CliError::io(path, e))?;
        let prices = load_prices(file).map_err(|e| CliError::data(path, e))?;
        out.push(Dataset {
            name,
            path: path.clone(),
            prices,
        });
    }
    Ok(out)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn forecast_file_name(dataset: &str, method: Method, mode: Mode, confidence: f64) -> String {
    format!("var__{dataset}__{method}__{mode}__{confidence}.csv")
}

/// Inverse of [`forecast_file_name`]; `None` for unrelated files.
pub fn parse_forecast_file_name(name: &str) -> Option<(String, Method, Mode, f64)> {
    let stem = name.strip_prefix("var__")?.strip_suffix(".csv")?;
    let parts: Vec<&str> = stem.split("__").collect();
    if parts.len() != 4 {
        return None;
    }
    Some((
        parts[0].to_string(),
        parts[1].parse().ok()?,
        parts[2].parse().ok()?,
        parts[3].parse().ok()?,
    ))
}

/// Formats with `digits` significant digits in plain decimal notation.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}
