use std::collections::HashMap;
use std::fs::File;
use std::path::{Path, PathBuf};

use varscale_core::backtest::{backtest_report, default_test_significance, exceedances, run_backtest, BacktestRun};
use varscale_core::market_data::{log_returns, ReturnSeries};
use varscale_core::var_engine::{align_for_backtest, AlignedPairs, Method, Mode, VarForecastSeries};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::files::{ensure_dir, load_datasets, parse_forecast_file_name, write_text, Dataset};

/// A forecast file found on disk and selected by the configuration.
pub(crate) struct ForecastFile {
    pub dataset: String,
    pub method: Method,
    pub mode: Mode,
    pub confidence: f64,
    pub path: PathBuf,
}

/// Forecast files in `dir` for the configured datasets, methods, modes and
/// confidence levels, sorted by file name.
pub(crate) fn find_forecasts(dir: &Path, cfg: &RunConfig, datasets: &[Dataset]) -> CliResult<Vec<ForecastFile>> {
    let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
    let mut names = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| CliError::io(dir, e))?;
        if let Some(name) = entry.file_name().to_str() {
            names.push(name.to_string());
        }
    }
    names.sort();
    let found: Vec<ForecastFile> = names
        .into_iter()
        .filter_map(|name| {
            let (dataset, method, mode, confidence) = parse_forecast_file_name(&name)?;
            let wanted = datasets.iter().any(|d| d.name == dataset)
                && cfg.methods.contains(&method)
                && cfg.modes.contains(&mode)
                && cfg.confidences.contains(&confidence);
            wanted.then(|| ForecastFile {
                dataset,
                method,
                mode,
                confidence,
                path: dir.join(name),
            })
        })
        .collect();
    if found.is_empty() {
        return Err(CliError::data(
            dir,
            varscale_core::VarError::InsufficientData { needed: 1, got: 0 },
        ));
    }
    Ok(found)
}

/// Reads a forecast file and pairs it with realized returns of its horizon.
pub(crate) fn load_aligned(
    f: &ForecastFile,
    dataset: &Dataset,
    realized_cache: &mut HashMap<(String, usize), ReturnSeries>,
) -> CliResult<(VarForecastSeries, AlignedPairs)> {
    let file = File::open(&f.path).map_err(|e| CliError::io(&f.path, e))?;
    let series = VarForecastSeries::read_csv(file).map_err(|e| CliError::data(&f.path, e))?;
    if (series.method, series.mode, series.confidence) != (f.method, f.mode, f.confidence) {
        return Err(CliError::data(
            &f.path,
            varscale_core::VarError::InvalidArgument("file contents do not match its name".into()),
        ));
    }
    let key = (dataset.name.clone(), series.horizon);
    if !realized_cache.contains_key(&key) {
        let r = log_returns(&dataset.prices, series.horizon).map_err(|e| CliError::data(&dataset.path, e))?;
        realized_cache.insert(key.clone(), r);
    }
    let pairs = align_for_backtest(&series, &realized_cache[&key]).map_err(|e| CliError::data(&f.path, e))?;
    Ok((series, pairs))
}

pub fn run(cfg: &RunConfig, forecast_dir: &Path) -> CliResult<()> {
    cfg.require_inputs()?;
    let datasets = load_datasets(&cfg.inputs)?;
    let files = find_forecasts(forecast_dir, cfg, &datasets)?;
    ensure_dir(&cfg.out)?;

    let mut cache = HashMap::new();
    let mut runs = Vec::with_capacity(files.len());
    for f in &files {
        let dataset = datasets.iter().find(|d| d.name == f.dataset).expect("filtered by dataset");
        let (_, pairs) = load_aligned(f, dataset, &mut cache)?;
        let alpha = 1.0 - f.confidence;
        let seq = exceedances(&pairs, alpha).map_err(|e| CliError::data(&f.path, e))?;
        let sig = cfg.test_significance.unwrap_or_else(|| default_test_significance(f.confidence));
        let result = run_backtest(&seq, sig, sig).map_err(|e| CliError::data(&f.path, e))?;
        runs.push(BacktestRun {
            dataset: f.dataset.clone(),
            method: f.method,
            mode: f.mode,
            confidence: f.confidence,
            result,
        });
    }

    let report = backtest_report(runs).map_err(|e| CliError::data(forecast_dir, e))?;
    write_text(&cfg.out.join("backtest.csv"), &report.to_long_csv())?;
    write_text(
        &cfg.out.join("backtest.json"),
        &report.to_json().map_err(|e| CliError::Io(e.to_string()))?,
    )?;
    for c in report.confidences() {
        let t = report.tables(c);
        write_text(&cfg.out.join(format!("backtest_exceedances_{c}.csv")), &t.exceedances)?;
        write_text(&cfg.out.join(format!("backtest_lr_uc_{c}.csv")), &t.lr_uc)?;
        write_text(&cfg.out.join(format!("backtest_lr_cc_{c}.csv")), &t.lr_cc)?;
    }
    println!("backtested {} forecast series into {}", report.runs.len(), cfg.out.display());
    Ok(())
}
