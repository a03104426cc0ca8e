//! Experiment runner for contaminated bandit simulations: configuration,
//! presets, trial orchestration and CSV / JSON output.

pub mod config;
pub mod output;
pub mod presets;
pub mod runner;

use std::path::Path;

use anyhow::bail;

pub use config::{ConfigError, ExperimentConfig, RawConfig, RegretKind};
pub use runner::{run_experiment, ExperimentRun};

/// Runs `cfg` and writes its files into `dir`.
///
/// When a trial aborts, the completed part is still written (metadata status
/// `failed`) before the error is returned.
pub fn run_and_write(cfg: &ExperimentConfig, dir: &Path) -> anyhow::Result<ExperimentRun> {
    let run = run_experiment(cfg)?;
    output::write_outputs(dir, cfg, &run)?;
    if let Some(failure) = &run.failure {
        bail!("trial aborted, partial results written to {}: {failure}", dir.display());
    }
    Ok(run)
}
