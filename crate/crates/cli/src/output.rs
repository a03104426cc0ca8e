//! Result files: long-form trials CSV, aggregate CSV, metadata sidecar and the
//! optional observed-reward diagnostic.
//!
//! CSVs use `,` separators, `.` decimals, LF line endings and a header row.
//! Arms are numbered from 1, trials from 0 (trial `i` uses the `i`-th seed
//! derived from the master seed). Floats use Rust's shortest round-trip form.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;

use crucb_core::harness::{
    aggregate, max_admissible_alpha, regret_bound_linear_term, regret_bound_sublinear, BoundVariant,
};

use crate::config::{ExperimentConfig, RawConfig, RegretKind};
use crate::runner::{AlgorithmRun, ExperimentRun};

pub const TRIALS_FILE: &str = "trials.csv";
pub const AGGREGATE_FILE: &str = "aggregate.csv";
pub const METADATA_FILE: &str = "metadata.json";
pub const DIAGNOSTIC_FILE: &str = "observed_regret_diagnostic.csv";

const DIAGNOSTIC_NOTE: &str = "cumulative sum of optimal true reward minus observed reward; \
     not a performance measure, it can be negative under contamination";

fn csv_writer(path: &Path) -> csv::Result<csv::Writer<fs::File>> {
    csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_path(path)
}

fn num(x: f64) -> String {
    format!("{x}")
}

pub fn write_trials_csv(path: &Path, cfg: &ExperimentConfig, run: &ExperimentRun) -> anyhow::Result<()> {
    let with_realized = cfg.regret.includes_realized();
    let mut w = csv_writer(path)?;
    let mut header = vec!["algorithm", "trial", "seed", "t", "arm", "contaminated", "pseudo_regret"];
    if with_realized {
        header.push("realized_regret");
    }
    w.write_record(&header)?;
    for algo in &run.algorithms {
        for trial in &algo.trials {
            let log = &trial.log;
            for i in 0..log.horizon() {
                let mut row = vec![
                    algo.label.clone(),
                    trial.trial.to_string(),
                    trial.seed.to_string(),
                    (i + 1).to_string(),
                    (log.actions[i] + 1).to_string(),
                    u8::from(log.contaminated[i]).to_string(),
                    num(trial.pseudo.values()[i]),
                ];
                if let Some(r) = &trial.realized {
                    row.push(num(r.values()[i]));
                }
                w.write_record(&row)?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn complete(cfg: &ExperimentConfig, algo: &AlgorithmRun) -> bool {
    algo.trials.len() == cfg.trials
}

pub fn write_aggregate_csv(path: &Path, cfg: &ExperimentConfig, run: &ExperimentRun) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["algorithm", "t", "mean_regret", "std_regret"])?;
    for algo in run.algorithms.iter().filter(|a| complete(cfg, a)) {
        let traces: Vec<_> = algo.trials.iter().map(|t| t.aggregated(cfg.regret).clone()).collect();
        let curve = aggregate(&traces)?;
        for (i, (m, s)) in curve.mean.iter().zip(&curve.std).enumerate() {
            w.write_record([algo.label.clone(), (i + 1).to_string(), num(*m), num(*s)])?;
        }
    }
    w.flush()?;
    Ok(())
}

pub fn write_diagnostic_csv(path: &Path, run: &ExperimentRun) -> anyhow::Result<()> {
    let mut w = csv_writer(path)?;
    w.write_record(["algorithm", "trial", "seed", "t", "observed_regret"])?;
    for algo in &run.algorithms {
        for trial in &algo.trials {
            if let Some(d) = &trial.diagnostic {
                for (i, v) in d.values().iter().enumerate() {
                    w.write_record([
                        algo.label.clone(),
                        trial.trial.to_string(),
                        trial.seed.to_string(),
                        (i + 1).to_string(),
                        num(*v),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize)]
struct InstanceSummary {
    means: Vec<f64>,
    gaps: Vec<f64>,
    delta_min: f64,
    max_sigma_sg: f64,
    bound_b: Option<f64>,
}

#[derive(Debug, Serialize)]
struct AdmissibleAlpha {
    variant: String,
    value: Option<f64>,
}

#[derive(Debug, Serialize)]
struct AlgorithmSummary {
    label: String,
    kind: String,
    alpha: f64,
    sigma0: f64,
    trials_completed: usize,
    mean_final_regret: Option<f64>,
    contaminations: usize,
    clipped_observations: usize,
    regret_bound_sublinear: Option<f64>,
    regret_bound_linear_term: Option<f64>,
    max_admissible_alpha: Option<f64>,
}

#[derive(Debug, Serialize)]
struct Metadata {
    version: String,
    timestamp_unix: u64,
    status: String,
    error: Option<String>,
    config: RawConfig,
    regret_definition: String,
    aggregate_regret: String,
    aggregate_std: String,
    arm_numbering: String,
    trial_numbering: String,
    eq2_diagnostic: Option<String>,
    exp3_family_clipping: String,
    instance: InstanceSummary,
    max_admissible_alpha: Vec<AdmissibleAlpha>,
    algorithms: Vec<AlgorithmSummary>,
}

fn common_bound(cfg: &ExperimentConfig) -> Option<f64> {
    cfg.instance
        .arms()
        .iter()
        .map(|a| a.bound_b)
        .try_fold(0.0f64, |acc, b| b.map(|b| acc.max(b)))
}

fn summarize(cfg: &ExperimentConfig, run: &ExperimentRun) -> Vec<AlgorithmSummary> {
    let k = cfg.num_arms();
    let horizon = cfg.horizon();
    let gaps = cfg.instance.gaps();
    cfg.algorithms
        .iter()
        .map(|algo| {
            let policy = &algo.policy;
            let done = run.algorithms.iter().find(|r| r.label == algo.label);
            let trials = done.map_or(&[][..], |r| &r.trials[..]);
            let crucb = policy.kind.robust_mean();
            let variant = match crucb {
                Some(crucb_core::estimators::RobustMean::Trimmed) => Some(BoundVariant::Trimmed),
                Some(crucb_core::estimators::RobustMean::Shorth) => Some(BoundVariant::Shorth),
                None => None,
            };
            AlgorithmSummary {
                label: algo.label.clone(),
                kind: policy.kind.id().to_string(),
                alpha: policy.alpha,
                sigma0: policy.sigma0,
                trials_completed: trials.len(),
                mean_final_regret: (!trials.is_empty() && trials.len() == cfg.trials).then(|| {
                    trials.iter().map(|t| t.aggregated(cfg.regret).last()).sum::<f64>() / trials.len() as f64
                }),
                contaminations: trials.iter().map(|t| t.log.contaminations()).sum(),
                clipped_observations: trials.iter().map(|t| t.log.clipped).sum(),
                regret_bound_sublinear: crucb
                    .and_then(|_| regret_bound_sublinear(k, horizon, policy.sigma0, &gaps).ok()),
                regret_bound_linear_term: crucb
                    .and_then(|_| regret_bound_linear_term(k, horizon, policy.sigma0, policy.alpha).ok()),
                max_admissible_alpha: variant.and_then(|v| {
                    max_admissible_alpha(cfg.instance.delta_min(), policy.sigma0, horizon, v, None).ok()
                }),
            }
        })
        .collect()
}

pub fn write_metadata(path: &Path, cfg: &ExperimentConfig, run: &ExperimentRun) -> anyhow::Result<()> {
    let bound_b = common_bound(cfg);
    let sigma = cfg.instance.max_sigma();
    let admissible = BoundVariant::ALL
        .iter()
        .map(|&v| AdmissibleAlpha {
            variant: v.id().to_string(),
            value: max_admissible_alpha(cfg.instance.delta_min(), sigma, cfg.horizon(), v, bound_b).ok(),
        })
        .collect();
    let meta = Metadata {
        version: env!("CARGO_PKG_VERSION").to_string(),
        timestamp_unix: SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0),
        status: if run.is_complete() { "complete" } else { "failed" }.to_string(),
        error: run.failure.clone(),
        config: cfg.to_raw(),
        regret_definition: match cfg.regret {
            RegretKind::Pseudo => "pseudo: cumulative sum of the gap of the played arm",
            RegretKind::Realized => "realized: cumulative sum of r_best(t) - r_played(t) over true rewards",
            RegretKind::Both => {
                "pseudo (aggregated) and realized: gap sum, and cumulative r_best(t) - r_played(t) over true rewards"
            }
        }
        .to_string(),
        aggregate_regret: match cfg.regret {
            RegretKind::Realized => "realized",
            _ => "pseudo",
        }
        .to_string(),
        aggregate_std: "population standard deviation across trials".to_string(),
        arm_numbering: "1-based".to_string(),
        trial_numbering: "0-based, trial i uses the i-th derived seed".to_string(),
        eq2_diagnostic: cfg.diagnostic_eq2.then(|| DIAGNOSTIC_NOTE.to_string()),
        exp3_family_clipping: format!(
            "observations clipped to [{}, {}] before loss normalisation for EXP3, EXP3++ and TsallisInf",
            cfg.reward_range.lo, cfg.reward_range.hi
        ),
        instance: InstanceSummary {
            means: cfg.instance.means(),
            gaps: cfg.instance.gaps(),
            delta_min: cfg.instance.delta_min(),
            max_sigma_sg: sigma,
            bound_b,
        },
        max_admissible_alpha: admissible,
        algorithms: summarize(cfg, run),
    };
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, &meta)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Writes every output file into `dir`, creating it if needed.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, run: &ExperimentRun) -> anyhow::Result<()> {
    fs::create_dir_all(dir)?;
    write_trials_csv(&dir.join(TRIALS_FILE), cfg, run)?;
    write_aggregate_csv(&dir.join(AGGREGATE_FILE), cfg, run)?;
    if cfg.diagnostic_eq2 {
        write_diagnostic_csv(&dir.join(DIAGNOSTIC_FILE), run)?;
    }
    write_metadata(&dir.join(METADATA_FILE), cfg, run)?;
    Ok(())
}
