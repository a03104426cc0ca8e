//! Game loop, uncontaminated regret and aggregation over trials.
//!
//! A trial draws the reward table from its seed and then, for `t = 1..=T`,
//! lets the learner pick an arm, the adversary replace (or not) the true reward,
//! and the learner observe the result. Everything random derives from the trial
//! seed, so a trial is a pure function of `(instance, policy, adversary, seed)`
//! and trials can run in any order or in parallel.

mod bounds;

pub use bounds::{
    max_admissible_alpha, regret_bound_linear_term, regret_bound_sublinear, BoundVariant,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::adversaries::{AdversaryConfig, AdversaryContext, BudgetPolicy};
use crate::environment::{draw_table, BanditInstance, RewardTable};
use crate::error::{domain, Error, Result};
use crate::policies::{Policy, PolicyConfig};
use crate::seeding::{substream, ADVERSARY_STREAM};

/// Everything that happened in one trial. Index `i` holds round `t = i + 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialLog {
    pub seed: u64,
    pub actions: Vec<usize>,
    pub true_rewards: Vec<f64>,
    pub observed: Vec<f64>,
    pub contaminated: Vec<bool>,
    pub counts: Vec<usize>,
    /// Observations clipped into the reward range by a weight policy.
    pub clipped: usize,
}

impl TrialLog {
    pub fn horizon(&self) -> usize {
        self.actions.len()
    }

    pub fn contaminations(&self) -> usize {
        self.contaminated.iter().filter(|&&c| c).count()
    }
}

/// Runs one game. The reward table is drawn from `seed`.
pub fn run_trial(
    instance: &BanditInstance,
    policy: &PolicyConfig,
    adversary: &AdversaryConfig,
    seed: u64,
) -> Result<TrialLog> {
    let table = draw_table(instance, seed);
    run_trial_on_table(&table, policy, adversary, seed)
}

/// Runs one game on a given table; `seed` drives the adversary and policy streams.
pub fn run_trial_on_table(
    table: &RewardTable,
    policy_config: &PolicyConfig,
    adversary: &AdversaryConfig,
    seed: u64,
) -> Result<TrialLog> {
    let instance = table.instance();
    let k = instance.num_arms();
    let horizon = instance.horizon();
    let optimal_arm = instance.optimal_arm();
    if !matches!(adversary.kind, crate::adversaries::AdversaryKind::None) {
        adversary.caps.validate_for(table)?;
    }

    let mut policy = Policy::new(*policy_config, k, seed)?;
    let mut adversary_rng = substream(seed, ADVERSARY_STREAM, 0);

    let mut log = TrialLog {
        seed,
        actions: Vec::with_capacity(horizon),
        true_rewards: Vec::with_capacity(horizon),
        observed: Vec::with_capacity(horizon),
        contaminated: Vec::with_capacity(horizon),
        counts: vec![0; k],
        clipped: 0,
    };
    let mut contaminations = vec![0usize; k];
    let mut history: Vec<Vec<f64>> = vec![Vec::new(); k];

    for t in 1..=horizon {
        let arm = policy
            .select_action()
            .map_err(|e| trial_error(seed, t, policy_config, e))?;
        let true_reward = table.reward(arm, t);
        let decision = {
            let mut ctx = AdversaryContext {
                t,
                arm,
                true_reward,
                table,
                pulls: &log.counts,
                contaminations: &contaminations,
                observed: &history,
                optimal_arm,
                rng: &mut adversary_rng,
            };
            adversary.decide(&mut ctx)?
        };
        if !decision.value.is_finite() {
            return domain(format!("adversary produced non-finite value at t = {t}"));
        }
        let observed = if decision.contaminate { decision.value } else { true_reward };
        policy
            .update(arm, observed)
            .map_err(|e| trial_error(seed, t, policy_config, e))?;

        log.counts[arm] += 1;
        if decision.contaminate {
            contaminations[arm] += 1;
        }
        history[arm].push(observed);
        log.actions.push(arm);
        log.true_rewards.push(true_reward);
        log.observed.push(observed);
        log.contaminated.push(decision.contaminate);
    }
    log.clipped = policy.clipped();
    Ok(log)
}

fn trial_error(seed: u64, t: usize, policy: &PolicyConfig, e: Error) -> Error {
    let msg = format!("trial seed {seed}, round {t}, policy {}: {e}", policy.kind);
    match e {
        Error::Domain(_) => Error::Domain(msg),
        Error::Config(_) => Error::Config(msg),
        Error::Numerical(_) => Error::Numerical(msg),
    }
}

/// Runs one trial per seed in parallel; results keep the order of `seeds`.
pub fn run_trials(
    instance: &BanditInstance,
    policy: &PolicyConfig,
    adversary: &AdversaryConfig,
    seeds: &[u64],
) -> Result<Vec<TrialLog>> {
    seeds
        .par_iter()
        .map(|&seed| run_trial(instance, policy, adversary, seed))
        .collect()
}

/// First `(arm, t)` at which `c_a(t) > ε·N_a(t)`, if any.
pub fn audit_budget(log: &TrialLog, num_arms: usize, budget: &BudgetPolicy) -> Option<(usize, usize)> {
    let mut pulls = vec![0usize; num_arms];
    let mut contaminated = vec![0usize; num_arms];
    for (i, (&arm, &flag)) in log.actions.iter().zip(&log.contaminated).enumerate() {
        pulls[arm] += 1;
        contaminated[arm] += usize::from(flag);
        if !budget.permits(contaminated[arm], pulls[arm]) {
            return Some((arm, i + 1));
        }
    }
    None
}

/// Cumulative regret, one value per round.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegretTrace(pub Vec<f64>);

impl RegretTrace {
    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Regret after the last round (zero for an empty trace).
    pub fn last(&self) -> f64 {
        self.0.last().copied().unwrap_or(0.0)
    }
}

fn cumulative(increments: impl Iterator<Item = f64>) -> RegretTrace {
    let mut acc = 0.0;
    RegretTrace(
        increments
            .map(|d| {
                acc += d;
                acc
            })
            .collect(),
    )
}

/// Pseudo-regret: cumulative gap of the played arms.
pub fn pseudo_regret(log: &TrialLog, instance: &BanditInstance) -> RegretTrace {
    let gaps = instance.gaps();
    cumulative(log.actions.iter().map(|&a| gaps[a]))
}

/// Realised uncontaminated regret `Σ r_{a*}(t) − r_{A_t}(t)` on true rewards only.
pub fn realized_uncontaminated_regret(log: &TrialLog, table: &RewardTable) -> RegretTrace {
    let best = table.instance().optimal_arm();
    cumulative(
        log.actions
            .iter()
            .enumerate()
            .map(|(i, &a)| table.reward(best, i + 1) - table.reward(a, i + 1)),
    )
}

/// Diagnostic `Σ r_{a*}(t) − x_{A_t}(t)` comparing true optimal rewards with
/// observed ones. Not a performance measure: it can go negative and the
/// adversary controls it.
pub fn observed_regret_diagnostic(log: &TrialLog, table: &RewardTable) -> RegretTrace {
    let best = table.instance().optimal_arm();
    cumulative(
        log.observed
            .iter()
            .enumerate()
            .map(|(i, &x)| table.reward(best, i + 1) - x),
    )
}

/// Per-round mean and population standard deviation across trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateCurve {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub trials: usize,
}

pub fn aggregate(traces: &[RegretTrace]) -> Result<AggregateCurve> {
    let Some(first) = traces.first() else {
        return domain("aggregate of zero traces");
    };
    let len = first.len();
    if let Some(bad) = traces.iter().find(|tr| tr.len() != len) {
        return domain(format!("trace lengths differ: {} vs {len}", bad.len()));
    }
    let n = traces.len() as f64;
    let mut mean = Vec::with_capacity(len);
    let mut std = Vec::with_capacity(len);
    for i in 0..len {
        let m = traces.iter().map(|tr| tr.0[i]).sum::<f64>() / n;
        let var = traces.iter().map(|tr| (tr.0[i] - m).powi(2)).sum::<f64>() / n;
        mean.push(m);
        std.push(var.sqrt());
    }
    Ok(AggregateCurve {
        mean,
        std,
        trials: traces.len(),
    })
}
