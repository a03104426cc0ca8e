//! Runs every configured algorithm over the seeded trials.

use rayon::prelude::*;

use crucb_core::environment::draw_table;
use crucb_core::harness::{
    observed_regret_diagnostic, pseudo_regret, realized_uncontaminated_regret, run_trial_on_table,
    RegretTrace, TrialLog,
};
use crucb_core::seeding::trial_seed;

use crate::config::{ExperimentConfig, RegretKind};

#[derive(Debug, Clone)]
pub struct TrialResult {
    pub trial: usize,
    pub seed: u64,
    pub log: TrialLog,
    pub pseudo: RegretTrace,
    pub realized: Option<RegretTrace>,
    pub diagnostic: Option<RegretTrace>,
}

impl TrialResult {
    /// Trace that feeds the aggregate curve.
    pub fn aggregated(&self, regret: RegretKind) -> &RegretTrace {
        match (regret, &self.realized) {
            (RegretKind::Realized, Some(r)) => r,
            _ => &self.pseudo,
        }
    }
}

#[derive(Debug, Clone)]
pub struct AlgorithmRun {
    pub label: String,
    /// Completed trials in trial order.
    pub trials: Vec<TrialResult>,
}

#[derive(Debug, Clone)]
pub struct ExperimentRun {
    pub algorithms: Vec<AlgorithmRun>,
    /// First trial abort; algorithms after the failing one were not run.
    pub failure: Option<String>,
}

impl ExperimentRun {
    pub fn is_complete(&self) -> bool {
        self.failure.is_none()
    }
}

/// Seeds of the trials; trial `i` gets the same seed for every algorithm.
pub fn trial_seeds(cfg: &ExperimentConfig) -> Vec<u64> {
    (0..cfg.trials as u64).map(|i| trial_seed(cfg.master_seed, i)).collect()
}

pub fn run_experiment(cfg: &ExperimentConfig) -> anyhow::Result<ExperimentRun> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cfg.threads {
        builder = builder.num_threads(n);
    }
    let pool = builder.build()?;
    Ok(pool.install(|| run_all(cfg)))
}

fn run_all(cfg: &ExperimentConfig) -> ExperimentRun {
    let seeds = trial_seeds(cfg);
    let mut algorithms = Vec::with_capacity(cfg.algorithms.len());
    for algo in &cfg.algorithms {
        let results: Vec<crucb_core::Result<TrialResult>> = seeds
            .par_iter()
            .enumerate()
            .map(|(trial, &seed)| {
                let table = draw_table(&cfg.instance, seed);
                let log = run_trial_on_table(&table, &algo.policy, &cfg.adversary, seed)?;
                Ok(TrialResult {
                    trial,
                    seed,
                    pseudo: pseudo_regret(&log, &cfg.instance),
                    realized: cfg
                        .regret
                        .includes_realized()
                        .then(|| realized_uncontaminated_regret(&log, &table)),
                    diagnostic: cfg.diagnostic_eq2.then(|| observed_regret_diagnostic(&log, &table)),
                    log,
                })
            })
            .collect();
        let mut trials = Vec::with_capacity(results.len());
        for result in results {
            match result {
                Ok(r) => trials.push(r),
                Err(e) => {
                    algorithms.push(AlgorithmRun {
                        label: algo.label.clone(),
                        trials,
                    });
                    return ExperimentRun {
                        algorithms,
                        failure: Some(format!("{}: {e}", algo.label)),
                    };
                }
            }
        }
        algorithms.push(AlgorithmRun {
            label: algo.label.clone(),
            trials,
        });
    }
    ExperimentRun {
        algorithms,
        failure: None,
    }
}
