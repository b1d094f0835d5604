use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;
use std::path::Path;

use varscale_core::market_data::DATE_FORMAT;
use varscale_core::var_engine::{Method, Mode};

use super::backtest::{find_forecasts, load_aligned};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::files::{ensure_dir, load_datasets, significant, write_text};

pub const PLOT_HEADER: &str = "date,realized,direct,scaled";

pub fn plot_file_name(dataset: &str, method: Method, confidence: f64) -> String {
    format!("plot__{dataset}__{method}__{confidence}.csv")
}

pub fn run(cfg: &RunConfig, forecast_dir: &Path) -> CliResult<()> {
    cfg.require_inputs()?;
    let datasets = load_datasets(&cfg.inputs)?;
    let files = find_forecasts(forecast_dir, cfg, &datasets)?;
    ensure_dir(&cfg.out)?;

    // (dataset, method, confidence bits) -> per-mode forecast file
    let mut groups: BTreeMap<(String, Method, u64), HashMap<Mode, usize>> = BTreeMap::new();
    for (i, f) in files.iter().enumerate() {
        groups
            .entry((f.dataset.clone(), f.method, f.confidence.to_bits()))
            .or_default()
            .insert(f.mode, i);
    }

    let mut cache = HashMap::new();
    let mut written = 0;
    for ((dataset, method, conf_bits), modes) in &groups {
        let confidence = f64::from_bits(*conf_bits);
        let (Some(&di), Some(&si)) = (modes.get(&Mode::Direct), modes.get(&Mode::Scaled)) else {
            eprintln!("{dataset} {method} {confidence}: needs both direct and scaled forecasts, skipped");
            continue;
        };
        let ds = datasets.iter().find(|d| &d.name == dataset).expect("filtered by dataset");
        let (_, direct) = load_aligned(&files[di], ds, &mut cache)?;
        let (_, scaled) = load_aligned(&files[si], ds, &mut cache)?;
        let scaled_by_date: HashMap<_, _> = scaled.as_of_dates.iter().zip(&scaled.forecasts).collect();

        let mut text = format!("{PLOT_HEADER}\n");
        let mut rows = 0;
        for i in 0..direct.len() {
            if let Some(s) = scaled_by_date.get(&direct.as_of_dates[i]) {
                writeln!(
                    text,
                    "{},{},{},{}",
                    direct.realized_dates[i].format(DATE_FORMAT),
                    direct.realized[i],
                    significant(direct.forecasts[i], 4),
                    significant(**s, 4)
                )
                .unwrap();
                rows += 1;
            }
        }
        if rows == 0 {
            return Err(CliError::data(
                &files[di].path,
                varscale_core::VarError::Alignment("direct and scaled forecasts share no dates".into()),
            ));
        }
        write_text(&cfg.out.join(plot_file_name(dataset, *method, confidence)), &text)?;
        written += 1;
    }
    if written == 0 {
        return Err(CliError::Usage(
            "plot data needs direct and scaled forecasts for the same dataset, method and confidence".into(),
        ));
    }
    println!("wrote {written} plot file(s) to {}", cfg.out.display());
    Ok(())
}
