use std::collections::BTreeMap;
use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;
use varscale_core::garch::{fit_arma_garch, select_arma_order, ArmaOrder, GarchSummary, Innovations};
use varscale_core::market_data::{log_returns, ReturnSeries, DATE_FORMAT};
use varscale_core::var_engine::{
    rolling_estimate, EstimatorOptions, GarchOptions, Method, Mode, RollingConfig, VarForecastSeries,
};

use super::thread_pool;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::files::{ensure_dir, forecast_file_name, load_datasets, write_text, Dataset};

pub const REPORT_FILE: &str = "var_report.json";

/// Daily and horizon returns for one dataset over one price span.
struct Inputs {
    r1: ReturnSeries,
    rh: ReturnSeries,
}

struct Prepared {
    dataset: String,
    full: Inputs,
    /// Span used by GARCH methods, absent when none is configured.
    garch: Option<Inputs>,
    /// Selected mean-equation order per mode, or the reason selection failed.
    orders: BTreeMap<Mode, Result<ArmaOrder, String>>,
}

#[derive(Debug, Serialize)]
struct OrderReport {
    dataset: String,
    mode: Mode,
    order: Option<String>,
    span_start: String,
    span_end: String,
    observations: usize,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct FitReport {
    dataset: String,
    mode: Mode,
    summary: Option<GarchSummary>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct ComboReport {
    dataset: String,
    method: Method,
    mode: Mode,
    confidence: f64,
    status: &'static str,
    file: Option<String>,
    forecasts: usize,
    first_date: Option<String>,
    last_date: Option<String>,
    carried_dates: Vec<String>,
    error: Option<String>,
}

#[derive(Debug, Serialize)]
struct RunReport<'a> {
    config: &'a RunConfig,
    vc_t_quantile: &'static str,
    garch_t_quantile: &'static str,
    garch_orders: Vec<OrderReport>,
    garch_fits: Vec<FitReport>,
    combinations: Vec<ComboReport>,
    aborted: usize,
}

fn returns_for(d: &Dataset, prices: &varscale_core::market_data::PriceSeries, horizon: usize) -> CliResult<Inputs> {
    Ok(Inputs {
        r1: log_returns(prices, 1).map_err(|e| CliError::data(&d.path, e))?,
        rh: log_returns(prices, horizon).map_err(|e| CliError::data(&d.path, e))?,
    })
}

fn series_for(inputs: &Inputs, mode: Mode) -> &ReturnSeries {
    match mode {
        Mode::Direct => &inputs.rh,
        Mode::Scaled => &inputs.r1,
    }
}

fn prepare(d: &Dataset, cfg: &RunConfig) -> CliResult<Prepared> {
    let full = returns_for(d, &d.prices, cfg.horizon)?;
    let mut orders = BTreeMap::new();
    let garch = if cfg.methods.iter().any(|m| m.is_garch()) {
        let span = d.prices.last_years(cfg.garch_span_years).map_err(|e| CliError::data(&d.path, e))?;
        let g = returns_for(d, &span, cfg.horizon)?;
        for &mode in &cfg.modes {
            let order = select_arma_order(series_for(&g, mode).values(), cfg.max_p, cfg.max_q).map_err(|e| e.to_string());
            orders.insert(mode, order);
        }
        Some(g)
    } else {
        None
    };
    Ok(Prepared {
        dataset: d.name.clone(),
        full,
        garch,
        orders,
    })
}

struct Job<'a> {
    prep: &'a Prepared,
    method: Method,
    mode: Mode,
    confidence: f64,
}

fn run_job(job: &Job<'_>, cfg: &RunConfig) -> Result<VarForecastSeries, String> {
    let mut rc = RollingConfig::new(job.method, job.mode, job.confidence, cfg.horizon, cfg.window);
    rc.estimator = EstimatorOptions {
        hs_interpolate: cfg.hs_interpolate,
        t_standardized: cfg.t_standardized,
        garch: GarchOptions {
            order: None,
            max_p: cfg.max_p,
            max_q: cfg.max_q,
            raw_t_quantile: cfg.garch_raw_t,
        },
    };
    let inputs = if job.method.is_garch() {
        let order = job.prep.orders.get(&job.mode).expect("order selected for every configured mode");
        rc.estimator.garch.order = Some(order.clone().map_err(|e| format!("ARMA order selection failed: {e}"))?);
        job.prep.garch.as_ref().expect("GARCH span prepared")
    } else {
        &job.prep.full
    };
    rolling_estimate(&inputs.r1, &inputs.rh, &rc).map_err(|e| e.to_string())
}

fn date_string(d: chrono::NaiveDate) -> String {
    d.format(DATE_FORMAT).to_string()
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    cfg.require_inputs()?;
    let datasets = load_datasets(&cfg.inputs)?;
    ensure_dir(&cfg.out)?;
    let pool = thread_pool(cfg.workers)?;

    let prepared: Vec<Prepared> = pool.install(|| {
        datasets
            .par_iter()
            .map(|d| prepare(d, cfg))
            .collect::<CliResult<Vec<_>>>()
    })?;

    let mut jobs = Vec::new();
    for prep in &prepared {
        for &method in &cfg.methods {
            for &mode in &cfg.modes {
                for &confidence in &cfg.confidences {
                    jobs.push(Job {
                        prep,
                        method,
                        mode,
                        confidence,
                    });
                }
            }
        }
    }
    let results: Vec<Result<VarForecastSeries, String>> = pool.install(|| jobs.par_iter().map(|j| run_job(j, cfg)).collect());

    // Whole-span fits describe the selected models; they do not feed the forecasts.
    let fit_jobs: Vec<(&Prepared, Mode, Method)> = prepared
        .iter()
        .filter(|p| p.garch.is_some())
        .flat_map(|p| {
            cfg.modes.iter().flat_map(move |&mode| {
                cfg.methods.iter().filter(|m| m.is_garch()).map(move |&m| (p, mode, m))
            })
        })
        .collect();
    let garch_fits: Vec<FitReport> = pool.install(|| {
        fit_jobs
            .par_iter()
            .map(|(p, mode, method)| {
                let innovations = if *method == Method::GarchT {
                    Innovations::StudentT
                } else {
                    Innovations::Normal
                };
                let series = series_for(p.garch.as_ref().expect("span prepared"), *mode);
                let fit = match &p.orders[mode] {
                    Ok(order) => fit_arma_garch(series.values(), *order, innovations).map_err(|e| e.to_string()),
                    Err(e) => Err(e.clone()),
                };
                FitReport {
                    dataset: p.dataset.clone(),
                    mode: *mode,
                    summary: fit.as_ref().ok().map(|f| f.summary()),
                    error: fit.err(),
                }
            })
            .collect()
    });

    let mut combos = Vec::with_capacity(jobs.len());
    let mut aborted = Vec::new();
    for (job, res) in jobs.iter().zip(results) {
        let ds = &job.prep.dataset;
        match res {
            Ok(series) => {
                let name = forecast_file_name(ds, job.method, job.mode, job.confidence);
                let mut buf = Vec::new();
                series.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
                let path = cfg.out.join(&name);
                std::fs::write(&path, buf).map_err(|e| CliError::io(&path, e))?;
                let carried: Vec<String> = series.carried_dates().into_iter().map(date_string).collect();
                if !carried.is_empty() {
                    eprintln!(
                        "{ds} {} {} {}: carried forward on {} date(s)",
                        job.method,
                        job.mode,
                        job.confidence,
                        carried.len()
                    );
                }
                combos.push(ComboReport {
                    dataset: ds.clone(),
                    method: job.method,
                    mode: job.mode,
                    confidence: job.confidence,
                    status: "ok",
                    file: Some(name),
                    forecasts: series.len(),
                    first_date: series.entries.first().map(|e| date_string(e.as_of_date)),
                    last_date: series.entries.last().map(|e| date_string(e.as_of_date)),
                    carried_dates: carried,
                    error: None,
                });
            }
            Err(e) => {
                let label = format!("{ds} {} {} {}", job.method, job.mode, job.confidence);
                eprintln!("{label}: aborted: {e}");
                aborted.push(format!("{label}: {e}"));
                combos.push(ComboReport {
                    dataset: ds.clone(),
                    method: job.method,
                    mode: job.mode,
                    confidence: job.confidence,
                    status: "aborted",
                    file: None,
                    forecasts: 0,
                    first_date: None,
                    last_date: None,
                    carried_dates: Vec::new(),
                    error: Some(e),
                });
            }
        }
    }

    let mut garch_orders = Vec::new();
    for p in &prepared {
        if let Some(g) = &p.garch {
            for (mode, order) in &p.orders {
                let s = series_for(g, *mode);
                garch_orders.push(OrderReport {
                    dataset: p.dataset.clone(),
                    mode: *mode,
                    order: order.as_ref().ok().map(|o| o.to_string()),
                    span_start: s.dates().first().map(|d| date_string(*d)).unwrap_or_default(),
                    span_end: s.dates().last().map(|d| date_string(*d)).unwrap_or_default(),
                    observations: s.len(),
                    error: order.as_ref().err().cloned(),
                });
            }
        }
    }

    let report = RunReport {
        config: cfg,
        vc_t_quantile: if cfg.t_standardized { "standardized" } else { "raw" },
        garch_t_quantile: if cfg.garch_raw_t { "raw" } else { "standardized" },
        garch_orders,
        garch_fits,
        combinations: combos,
        aborted: aborted.len(),
    };
    let json = serde_json::to_string_pretty(&report).map_err(|e| CliError::Io(e.to_string()))?;
    write_text(&cfg.out.join(REPORT_FILE), &json)?;

    let written = jobs.len() - aborted.len();
    println!("wrote {written} forecast series to {}", cfg.out.display());
    if aborted.is_empty() {
        Ok(())
    } else {
        let mut msg = format!("{} of {} combination(s) aborted:", aborted.len(), jobs.len());
        for a in &aborted {
            write!(msg, "\n  {a}").unwrap();
        }
        Err(CliError::Numerical(msg))
    }
}
