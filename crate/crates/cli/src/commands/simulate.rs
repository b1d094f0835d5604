use std::path::PathBuf;

use clap::{Args, ValueEnum};
use varscale_core::market_data::log_returns;
use varscale_core::simgen::{default_start_date, generate, prices_from_returns, SimKind, SimOutput, SimSpec, RNG_ALGORITHM};

use crate::error::{CliError, CliResult};
use crate::files::{ensure_dir, write_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    IidNormal,
    IidT,
    GarchNormal,
    GarchT,
    GbmPrices,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    #[arg(long, value_enum)]
    pub kind: KindArg,
    /// Number of returns.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, short = 'o', default_value = "out")]
    pub out: PathBuf,
    /// Prefix of the written files.
    #[arg(long, default_value = "sim")]
    pub name: String,
    #[arg(long, default_value_t = 0.0)]
    pub mu: f64,
    #[arg(long, default_value_t = 0.01)]
    pub sigma: f64,
    /// Scale of the raw t draws (iid-t).
    #[arg(long, default_value_t = 0.01)]
    pub scale: f64,
    #[arg(long, default_value_t = 5.0)]
    pub dof: f64,
    #[arg(long, default_value_t = 1e-6)]
    pub omega: f64,
    #[arg(long, default_value_t = 0.08)]
    pub alpha: f64,
    #[arg(long, default_value_t = 0.90)]
    pub beta: f64,
    /// Daily log-return drift (gbm-prices).
    #[arg(long, default_value_t = 0.0)]
    pub drift: f64,
    /// Daily log-return volatility (gbm-prices).
    #[arg(long, default_value_t = 0.01)]
    pub vol: f64,
    /// First price of the written price file.
    #[arg(long, default_value_t = 100.0)]
    pub start_price: f64,
}

impl SimulateArgs {
    pub fn spec(&self) -> SimSpec {
        let kind = match self.kind {
            KindArg::IidNormal => SimKind::IidNormal { mu: self.mu, sigma: self.sigma },
            KindArg::IidT => SimKind::IidT { mu: self.mu, scale: self.scale, dof: self.dof },
            KindArg::GarchNormal => SimKind::GarchNormal {
                mu: self.mu,
                omega: self.omega,
                alpha: self.alpha,
                beta: self.beta,
            },
            KindArg::GarchT => SimKind::GarchT {
                mu: self.mu,
                omega: self.omega,
                alpha: self.alpha,
                beta: self.beta,
                dof: self.dof,
            },
            KindArg::GbmPrices => SimKind::GbmPrices {
                drift: self.drift,
                vol: self.vol,
                start_price: self.start_price,
            },
        };
        SimSpec {
            kind,
            n: self.n,
            seed: self.seed,
        }
    }
}

pub fn run(args: &SimulateArgs) -> CliResult<()> {
    let spec = args.spec();
    if args.name.is_empty() || args.name.contains("__") || args.name.contains(std::path::MAIN_SEPARATOR) {
        return Err(CliError::Usage(format!("invalid file prefix `{}`", args.name)));
    }
    let output = generate(&spec).map_err(|e| CliError::Usage(e.to_string()))?;
    let (returns, prices) = match output {
        SimOutput::Returns(r) => {
            let p = prices_from_returns(r.values(), args.start_price, default_start_date())
                .map_err(|e| CliError::Usage(e.to_string()))?;
            (r, p)
        }
        SimOutput::Prices(p) => {
            let r = log_returns(&p, 1).map_err(|e| CliError::Usage(e.to_string()))?;
            (r, p)
        }
    };
    ensure_dir(&args.out)?;
    let mut buf = Vec::new();
    returns.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    let rpath = args.out.join(format!("{}_returns.csv", args.name));
    std::fs::write(&rpath, buf).map_err(|e| CliError::io(&rpath, e))?;

    let mut buf = Vec::new();
    prices.write_csv(&mut buf).map_err(|e| CliError::Io(e.to_string()))?;
    let ppath = args.out.join(format!("{}.csv", args.name));
    std::fs::write(&ppath, buf).map_err(|e| CliError::io(&ppath, e))?;

    let meta = serde_json::json!({ "rng": RNG_ALGORITHM, "spec": spec });
    write_text(
        &args.out.join(format!("{}_spec.json", args.name)),
        &serde_json::to_string_pretty(&meta).map_err(|e| CliError::Io(e.to_string()))?,
    )?;
    println!("wrote {} returns to {} and prices to {}", returns.len(), rpath.display(), ppath.display());
    Ok(())
}
