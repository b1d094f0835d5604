//! Shared flags, the optional key-value config file and their merge.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use varscale_core::var_engine::{Method, Mode};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// Price file(s) with a `date,price` header; the file stem names the dataset.
    #[arg(long = "input", short = 'i')]
    pub input: Vec<PathBuf>,
    /// Output directory (created if missing).
    #[arg(long, short = 'o')]
    pub out: Option<PathBuf>,
    /// Key-value (TOML) file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// VaR confidence levels, comma separated.
    #[arg(long, value_delimiter = ',')]
    pub confidence: Option<Vec<f64>>,
    /// Holding period in trading days.
    #[arg(long)]
    pub horizon: Option<usize>,
    /// Rolling estimation window in observations.
    #[arg(long)]
    pub window: Option<usize>,
    /// Subset of HS, VC-normal, VC-t, GARCH-normal, GARCH-t.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Subset of direct, scaled.
    #[arg(long, value_delimiter = ',')]
    pub modes: Option<Vec<Mode>>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads for independent combinations (0 = all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// GARCH methods only use the most recent this-many years of prices.
    #[arg(long)]
    pub garch_span_years: Option<u32>,
    /// Rescale the VC-t quantile to unit variance.
    #[arg(long)]
    pub t_standardized: bool,
    /// Interpolate between order statistics in historical simulation.
    #[arg(long)]
    pub hs_interpolate: bool,
    /// Use the raw t quantile for GARCH-t instead of the unit-variance one.
    #[arg(long)]
    pub garch_raw_t: bool,
    /// Largest AR order searched for the GARCH mean equation.
    #[arg(long)]
    pub max_p: Option<usize>,
    /// Largest MA order searched for the GARCH mean equation.
    #[arg(long)]
    pub max_q: Option<usize>,
    /// Size of the coverage tests; defaults to one minus the VaR confidence.
    #[arg(long)]
    pub test_significance: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub input: Option<Vec<PathBuf>>,
    pub out: Option<PathBuf>,
    pub confidence: Option<Vec<f64>>,
    pub horizon: Option<usize>,
    pub window: Option<usize>,
    pub methods: Option<Vec<String>>,
    pub modes: Option<Vec<String>>,
    pub seed: Option<u64>,
    pub workers: Option<usize>,
    pub garch_span_years: Option<u32>,
    pub t_standardized: Option<bool>,
    pub hs_interpolate: Option<bool>,
    pub garch_raw_t: Option<bool>,
    pub max_p: Option<usize>,
    pub max_q: Option<usize>,
    pub test_significance: Option<f64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
    pub confidences: Vec<f64>,
    pub horizon: usize,
    pub window: usize,
    pub methods: Vec<Method>,
    pub modes: Vec<Mode>,
    pub seed: u64,
    pub workers: usize,
    pub garch_span_years: u32,
    pub t_standardized: bool,
    pub hs_interpolate: bool,
    pub garch_raw_t: bool,
    pub max_p: usize,
    pub max_q: usize,
    pub test_significance: Option<f64>,
}

fn parse_all<T: std::str::FromStr<Err = varscale_core::VarError>>(items: &[String]) -> CliResult<Vec<T>> {
    items
        .iter()
        .map(|s| s.parse().map_err(|e: varscale_core::VarError| CliError::Usage(e.to_string())))
        .collect()
}

impl RunConfig {
    /// Flags win over the config file, which wins over the built-in defaults.
    pub fn resolve(args: &CommonArgs) -> CliResult<Self> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let methods = match (&args.methods, &file.methods) {
            (Some(m), _) => m.clone(),
            (None, Some(m)) => parse_all(m)?,
            (None, None) => Method::ALL.to_vec(),
        };
        let modes = match (&args.modes, &file.modes) {
            (Some(m), _) => m.clone(),
            (None, Some(m)) => parse_all(m)?,
            (None, None) => Mode::ALL.to_vec(),
        };
        let inputs = if args.input.is_empty() {
            file.input.unwrap_or_default()
        } else {
            args.input.clone()
        };
        let cfg = RunConfig {
            inputs,
            out: args.out.clone().or(file.out).unwrap_or_else(|| PathBuf::from("out")),
            confidences: args.confidence.clone().or(file.confidence).unwrap_or_else(|| vec![0.95, 0.99]),
            horizon: args.horizon.or(file.horizon).unwrap_or(10),
            window: args.window.or(file.window).unwrap_or(250),
            methods: dedup(methods),
            modes: dedup(modes),
            seed: args.seed.or(file.seed).unwrap_or(0),
            workers: args.workers.or(file.workers).unwrap_or(0),
            garch_span_years: args.garch_span_years.or(file.garch_span_years).unwrap_or(5),
            t_standardized: args.t_standardized || file.t_standardized.unwrap_or(false),
            hs_interpolate: args.hs_interpolate || file.hs_interpolate.unwrap_or(false),
            garch_raw_t: args.garch_raw_t || file.garch_raw_t.unwrap_or(false),
            max_p: args.max_p.or(file.max_p).unwrap_or(2),
            max_q: args.max_q.or(file.max_q).unwrap_or(2),
            test_significance: args.test_significance.or(file.test_significance),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn validate(&self) -> CliResult<()> {
        let bad = |m: String| Err(CliError::Usage(m));
        if self.confidences.is_empty() || self.confidences.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
            return bad(format!("confidence levels must lie in (0, 1), got {:?}", self.confidences));
        }
        if self.horizon == 0 {
            return bad("horizon must be at least 1".into());
        }
        if self.window < 20 {
            return bad(format!("window must be at least 20, got {}", self.window));
        }
        if self.methods.is_empty() || self.modes.is_empty() {
            return bad("need at least one method and one mode".into());
        }
        if self.garch_span_years == 0 {
            return bad("garch span must be at least one year".into());
        }
        if self.max_p > 5 || self.max_q > 5 {
            return bad("ARMA grid bounds above 5 are not supported".into());
        }
        if let Some(s) = self.test_significance {
            if !(s > 0.0 && s < 1.0) {
                return bad(format!("test significance must lie in (0, 1), got {s}"));
            }
        }
        Ok(())
    }

    pub fn require_inputs(&self) -> CliResult<()> {
        if self.inputs.is_empty() {
            return Err(CliError::Usage("at least one --input file is required".into()));
        }
        Ok(())
    }
}

fn dedup<T: PartialEq + Copy>(items: Vec<T>) -> Vec<T> {
    let mut out: Vec<T> = Vec::with_capacity(items.len());
    for i in items {
        if !out.contains(&i) {
            out.push(i);
        }
    }
    out
}
