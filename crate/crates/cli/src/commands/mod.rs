pub mod backtest;
pub mod plotdata;
pub mod simulate;
pub mod stats;
pub mod var;

use rayon::ThreadPool;

use crate::error::{CliError, CliResult};

pub(crate) fn thread_pool(workers: usize) -> CliResult<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| CliError::Usage(format!("cannot start {workers} workers: {e}")))
}
