use std::fmt::Write as _;

use serde::Serialize;
use varscale_core::market_data::{descriptive_stats, jarque_bera, log_returns, mean_zero_ttest, StatsSummary, TestResult};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::files::{ensure_dir, load_datasets, write_text};

pub const STATS_HEADER: &str = "dataset,observations,mean,sd,min,max,skewness,kurtosis";

#[derive(Debug, Serialize)]
struct HorizonStats {
    horizon: usize,
    summary: StatsSummary,
    jarque_bera: TestResult,
    zero_mean_ttest: TestResult,
}

#[derive(Debug, Serialize)]
struct DatasetStats {
    dataset: String,
    horizons: Vec<HorizonStats>,
}

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    cfg.require_inputs()?;
    let datasets = load_datasets(&cfg.inputs)?;
    ensure_dir(&cfg.out)?;
    let significance = cfg.test_significance.unwrap_or(0.05);
    let mut horizons = vec![1];
    if cfg.horizon != 1 {
        horizons.push(cfg.horizon);
    }

    let mut all = Vec::with_capacity(datasets.len());
    for d in &datasets {
        let mut per = Vec::new();
        for &h in &horizons {
            let r = log_returns(&d.prices, h).map_err(|e| CliError::data(&d.path, e))?;
            let v = r.values();
            per.push(HorizonStats {
                horizon: h,
                summary: descriptive_stats(v).map_err(|e| CliError::data(&d.path, e))?,
                jarque_bera: jarque_bera(v, significance).map_err(|e| CliError::data(&d.path, e))?,
                zero_mean_ttest: mean_zero_ttest(v, significance).map_err(|e| CliError::data(&d.path, e))?,
            });
        }
        all.push(DatasetStats {
            dataset: d.name.clone(),
            horizons: per,
        });
    }

    for (i, &h) in horizons.iter().enumerate() {
        let mut table = format!("{STATS_HEADER}\n");
        for d in &all {
            let s = &d.horizons[i].summary;
            writeln!(
                table,
                "{},{},{},{},{},{},{},{}",
                d.dataset, s.n, s.mean, s.sd, s.min, s.max, s.skewness, s.kurtosis
            )
            .unwrap();
        }
        write_text(&cfg.out.join(format!("stats_{h}d.csv")), &table)?;
    }

    let mut tests = String::from("dataset,horizon,test,statistic,df,p_value,reject\n");
    for d in &all {
        for hs in &d.horizons {
            for (name, t) in [("jarque_bera", &hs.jarque_bera), ("zero_mean_t", &hs.zero_mean_ttest)] {
                let df = t.df.map(|v| v.to_string()).unwrap_or_default();
                writeln!(
                    tests,
                    "{},{},{},{},{},{:e},{}",
                    d.dataset, hs.horizon, name, t.statistic, df, t.p_value, t.reject
                )
                .unwrap();
            }
        }
    }
    write_text(&cfg.out.join("stats_tests.csv"), &tests)?;
    let json = serde_json::to_string_pretty(&all).map_err(|e| CliError::Io(e.to_string()))?;
    write_text(&cfg.out.join("stats.json"), &json)?;
    println!("wrote statistics for {} dataset(s) to {}", all.len(), cfg.out.display());
    Ok(())
}
