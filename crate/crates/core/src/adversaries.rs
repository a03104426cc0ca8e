//! Full-knowledge adversaries.
//!
//! Each round the adversary sees the chosen arm, its true reward, the whole
//! reward table and the learner's history, and decides whether to replace the
//! true reward. Contamination is tracked as a flag per observation: a
//! contaminated value may coincide with the true one and still counts.
//!
//! Contaminated values follow the "malicious" scheme: uniform on a range that
//! pulls the optimal arm down and the suboptimal arms up. For an arm with reward
//! bound `b` the defaults are `[0, 0.2·b]` for the optimal arm and `[0.9·b, b]`
//! for suboptimal arms (`[0, 2]` and `[9, 10]` for binomial(10, ·)).

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::environment::RewardTable;
use crate::error::{domain, Error, Result};
use crate::seeding::SimRng;

/// Closed interval `[lo, hi]` of contaminated values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub lo: f64,
    pub hi: f64,
}

impl ValueRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
            return Err(Error::Config(format!("invalid contamination range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn point(c: f64) -> Result<Self> {
        Self::new(c, c)
    }

    fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.lo == self.hi {
            self.lo
        } else {
            self.lo + (self.hi - self.lo) * rng.random::<f64>()
        }
    }
}

/// Contamination ranges; `None` falls back to the defaults derived from the
/// arm's reward bound.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct ContaminationCaps {
    pub optimal: Option<ValueRange>,
    pub suboptimal: Option<ValueRange>,
}

pub const DEFAULT_OPTIMAL_CAP_FRACTION: f64 = 0.2;
pub const DEFAULT_SUBOPTIMAL_FLOOR_FRACTION: f64 = 0.9;

impl ContaminationCaps {
    /// Range used for `arm` given its role and reward bound.
    pub fn range_for(&self, is_optimal: bool, bound_b: Option<f64>) -> Result<ValueRange> {
        let explicit = if is_optimal { self.optimal } else { self.suboptimal };
        if let Some(r) = explicit {
            return Ok(r);
        }
        let b = bound_b.ok_or_else(|| {
            Error::Config(
                "arm has no reward bound; contamination ranges must be given explicitly".into(),
            )
        })?;
        if is_optimal {
            ValueRange::new(0.0, DEFAULT_OPTIMAL_CAP_FRACTION * b)
        } else {
            ValueRange::new(DEFAULT_SUBOPTIMAL_FLOOR_FRACTION * b, b)
        }
    }

    /// Checks that every arm of the table's instance has a usable range.
    pub fn validate_for(&self, table: &RewardTable) -> Result<()> {
        let inst = table.instance();
        let best = inst.optimal_arm();
        for (a, arm) in inst.arms().iter().enumerate() {
            self.range_for(a == best, arm.bound_b)?;
        }
        Ok(())
    }
}

/// What the adversary sees when deciding round `t`.
///
/// `pulls` and `contaminations` are the counts *before* the current pull.
pub struct AdversaryContext<'a> {
    pub t: usize,
    pub arm: usize,
    pub true_reward: f64,
    pub table: &'a RewardTable,
    pub pulls: &'a [usize],
    pub contaminations: &'a [usize],
    pub observed: &'a [Vec<f64>],
    pub optimal_arm: usize,
    pub rng: &'a mut SimRng,
}

impl AdversaryContext<'_> {
    pub fn is_optimal(&self) -> bool {
        self.arm == self.optimal_arm
    }

    /// 1-based index of the current pull of the chosen arm.
    pub fn pull_number(&self) -> usize {
        self.pulls[self.arm] + 1
    }

    fn bound(&self) -> Option<f64> {
        self.table.instance().arms()[self.arm].bound_b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdversaryDecision {
    pub contaminate: bool,
    pub value: f64,
}

impl AdversaryDecision {
    pub fn pass(true_reward: f64) -> Self {
        Self {
            contaminate: false,
            value: true_reward,
        }
    }

    pub fn replace(value: f64) -> Self {
        Self {
            contaminate: true,
            value,
        }
    }
}

/// Malicious contaminated value for the chosen arm.
pub fn malicious_value(ctx: &mut AdversaryContext<'_>, caps: &ContaminationCaps) -> Result<f64> {
    let range = caps.range_for(ctx.is_optimal(), ctx.bound())?;
    Ok(range.sample(ctx.rng))
}

/// Contaminates each round independently with probability `epsilon`.
pub fn bernoulli_adversary(
    ctx: &mut AdversaryContext<'_>,
    epsilon: f64,
    caps: &ContaminationCaps,
) -> Result<AdversaryDecision> {
    if !(0.0..=1.0).contains(&epsilon) {
        return domain(format!("contamination probability {epsilon} outside [0, 1]"));
    }
    if ctx.rng.random_bool(epsilon) {
        Ok(AdversaryDecision::replace(malicious_value(ctx, caps)?))
    } else {
        Ok(AdversaryDecision::pass(ctx.true_reward))
    }
}

/// Which pulls the front-cluster attack targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ClusterScope {
    /// The first `m` pulls of every arm.
    #[default]
    PerArm,
    /// The first `m` rounds of the game, whichever arm is played.
    Global,
}

/// Front-cluster attack: contaminates the first `m` pulls (per arm or global).
pub fn cluster_adversary(
    ctx: &mut AdversaryContext<'_>,
    m: usize,
    scope: ClusterScope,
    caps: &ContaminationCaps,
) -> Result<AdversaryDecision> {
    let position = match scope {
        ClusterScope::PerArm => ctx.pull_number(),
        ClusterScope::Global => ctx.t,
    };
    if position <= m {
        Ok(AdversaryDecision::replace(malicious_value(ctx, caps)?))
    } else {
        Ok(AdversaryDecision::pass(ctx.true_reward))
    }
}

/// Cluster size giving roughly an ε share of all rounds: `ceil(ε·T/K)` per arm.
pub fn default_cluster_size(epsilon: f64, horizon: usize, arms: usize) -> usize {
    (epsilon * horizon as f64 / arms as f64 - 1e-9).ceil().max(0.0) as usize
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BudgetMode {
    Enforced,
    #[default]
    Unconstrained,
}

/// Per-arm contamination budget `c_a(t) ≤ ε·N_a(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BudgetPolicy {
    pub mode: BudgetMode,
    pub epsilon: f64,
}

impl BudgetPolicy {
    pub fn unconstrained() -> Self {
        Self {
            mode: BudgetMode::Unconstrained,
            epsilon: 1.0,
        }
    }

    pub fn enforced(epsilon: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&epsilon) {
            return domain(format!("budget fraction {epsilon} outside [0, 1)"));
        }
        Ok(Self {
            mode: BudgetMode::Enforced,
            epsilon,
        })
    }

    /// Whether `contaminations` out of `pulls` respects the budget.
    pub fn permits(&self, contaminations: usize, pulls: usize) -> bool {
        match self.mode {
            BudgetMode::Unconstrained => true,
            BudgetMode::Enforced => contaminations as f64 <= self.epsilon * pulls as f64,
        }
    }
}

/// Downgrades a contamination to a pass-through when it would exceed the budget.
pub fn enforce_budget(
    decision: AdversaryDecision,
    ctx: &AdversaryContext<'_>,
    policy: &BudgetPolicy,
) -> AdversaryDecision {
    if !decision.contaminate {
        return decision;
    }
    let c = ctx.contaminations[ctx.arm] + 1;
    let n = ctx.pulls[ctx.arm] + 1;
    if policy.permits(c, n) {
        decision
    } else {
        AdversaryDecision::pass(ctx.true_reward)
    }
}

/// Contamination strategy.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum AdversaryKind {
    None,
    Bernoulli { epsilon: f64 },
    Cluster { size: usize, scope: ClusterScope },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdversaryConfig {
    pub kind: AdversaryKind,
    pub caps: ContaminationCaps,
    pub budget: BudgetPolicy,
}

impl AdversaryConfig {
    pub fn none() -> Self {
        Self {
            kind: AdversaryKind::None,
            caps: ContaminationCaps::default(),
            budget: BudgetPolicy::unconstrained(),
        }
    }

    pub fn bernoulli(epsilon: f64) -> Self {
        Self {
            kind: AdversaryKind::Bernoulli { epsilon },
            caps: ContaminationCaps::default(),
            budget: BudgetPolicy::unconstrained(),
        }
    }

    pub fn cluster(size: usize) -> Self {
        Self {
            kind: AdversaryKind::Cluster {
                size,
                scope: ClusterScope::PerArm,
            },
            caps: ContaminationCaps::default(),
            budget: BudgetPolicy::unconstrained(),
        }
    }

    pub fn with_budget(mut self, budget: BudgetPolicy) -> Self {
        self.budget = budget;
        self
    }

    pub fn with_caps(mut self, caps: ContaminationCaps) -> Self {
        self.caps = caps;
        self
    }

    /// Raw decision followed by budget enforcement.
    pub fn decide(&self, ctx: &mut AdversaryContext<'_>) -> Result<AdversaryDecision> {
        let raw = match self.kind {
            AdversaryKind::None => AdversaryDecision::pass(ctx.true_reward),
            AdversaryKind::Bernoulli { epsilon } => bernoulli_adversary(ctx, epsilon, &self.caps)?,
            AdversaryKind::Cluster { size, scope } => {
                cluster_adversary(ctx, size, scope, &self.caps)?
            }
        };
        Ok(enforce_budget(raw, ctx, &self.budget))
    }
}
