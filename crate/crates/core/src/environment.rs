//! Reward models and the pre-drawn reward table.
//!
//! All true rewards `r_a(t)` are drawn before play starts, so an adversary can
//! inspect past and future rewards alike. Each arm draws from its own substream
//! of the table seed; changing one arm's model never changes another arm's row.

use rand::Rng;
use rand_distr::{Binomial, Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::seeding::{substream, SimRng};

/// Distribution family of an arm.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase")]
pub enum RewardKind {
    Binomial { trials: u32, p: f64 },
    Gaussian { mu: f64, sigma: f64 },
    Bernoulli { p: f64 },
}

/// True reward distribution of one arm.
///
/// `sigma_sg` is the sub-Gaussian constant attributed to the arm. For bounded
/// families it defaults to half the support width (Hoeffding), for Gaussians
/// to the standard deviation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardModel {
    pub kind: RewardKind,
    pub sigma_sg: f64,
    pub bound_b: Option<f64>,
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        domain(format!("probability {p} outside [0, 1]"))
    }
}

impl RewardModel {
    pub fn binomial(trials: u32, p: f64) -> Result<Self> {
        if trials == 0 {
            return domain("binomial needs at least one trial");
        }
        check_probability(p)?;
        Ok(Self {
            kind: RewardKind::Binomial { trials, p },
            sigma_sg: f64::from(trials) / 2.0,
            bound_b: Some(f64::from(trials)),
        })
    }

    pub fn gaussian(mu: f64, sigma: f64) -> Result<Self> {
        if !mu.is_finite() || !(sigma > 0.0 && sigma.is_finite()) {
            return domain(format!("invalid gaussian parameters mu = {mu}, sigma = {sigma}"));
        }
        Ok(Self {
            kind: RewardKind::Gaussian { mu, sigma },
            sigma_sg: sigma,
            bound_b: None,
        })
    }

    pub fn bernoulli(p: f64) -> Result<Self> {
        check_probability(p)?;
        Ok(Self {
            kind: RewardKind::Bernoulli { p },
            sigma_sg: 0.5,
            bound_b: Some(1.0),
        })
    }

    /// Overrides the sub-Gaussian constant.
    pub fn with_sigma_sg(mut self, sigma_sg: f64) -> Result<Self> {
        if !(sigma_sg > 0.0 && sigma_sg.is_finite()) {
            return domain(format!("sub-Gaussian constant {sigma_sg} must be positive"));
        }
        self.sigma_sg = sigma_sg;
        Ok(self)
    }

    pub fn mean(&self) -> f64 {
        mean_of(self)
    }

    /// Lower end of the support, when the family is bounded.
    pub fn lower_bound(&self) -> Option<f64> {
        match self.kind {
            RewardKind::Gaussian { .. } => None,
            _ => Some(0.0),
        }
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            RewardKind::Binomial { trials, p } => Binomial::new(u64::from(trials), p)
                .expect("validated binomial parameters")
                .sample(rng) as f64,
            RewardKind::Gaussian { mu, sigma } => Normal::new(mu, sigma)
                .expect("validated gaussian parameters")
                .sample(rng),
            RewardKind::Bernoulli { p } => {
                if rng.random_bool(p) {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }
}

/// Mean of a reward model.
pub fn mean_of(model: &RewardModel) -> f64 {
    match model.kind {
        RewardKind::Binomial { trials, p } => f64::from(trials) * p,
        RewardKind::Gaussian { mu, .. } => mu,
        RewardKind::Bernoulli { p } => p,
    }
}

/// Suboptimality gaps `Δ_a = max_b μ_b − μ_a`. A tied optimum is rejected.
pub fn gaps(means: &[f64]) -> Result<Vec<f64>> {
    if means.is_empty() {
        return domain("gaps of an empty instance");
    }
    let best = means.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let at_best = means.iter().filter(|&&m| m == best).count();
    if at_best > 1 {
        return domain(format!("{at_best} arms share the optimal mean {best}"));
    }
    Ok(means.iter().map(|m| best - m).collect())
}

/// A K-armed instance played for `horizon` rounds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BanditInstance {
    arms: Vec<RewardModel>,
    horizon: usize,
}

impl BanditInstance {
    pub fn new(arms: Vec<RewardModel>, horizon: usize) -> Result<Self> {
        if arms.len() < 2 {
            return domain(format!("need at least two arms, got {}", arms.len()));
        }
        if horizon == 0 {
            return domain("horizon must be positive");
        }
        let means: Vec<f64> = arms.iter().map(mean_of).collect();
        gaps(&means)?;
        Ok(Self { arms, horizon })
    }

    /// The binomial instance used throughout the simulations: one arm with
    /// `p = 0.9` followed by `k − 1` arms with `p = 0.8`, 10 trials each.
    pub fn binomial_preset(k: usize, horizon: usize) -> Result<Self> {
        let mut arms = vec![RewardModel::binomial(10, 0.9)?];
        for _ in 1..k {
            arms.push(RewardModel::binomial(10, 0.8)?);
        }
        Self::new(arms, horizon)
    }

    pub fn arms(&self) -> &[RewardModel] {
        &self.arms
    }

    pub fn num_arms(&self) -> usize {
        self.arms.len()
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn means(&self) -> Vec<f64> {
        self.arms.iter().map(mean_of).collect()
    }

    pub fn gaps(&self) -> Vec<f64> {
        gaps(&self.means()).expect("unique optimum checked on construction")
    }

    pub fn optimal_arm(&self) -> usize {
        let g = self.gaps();
        g.iter().position(|&d| d == 0.0).expect("one arm has zero gap")
    }

    /// Smallest positive gap.
    pub fn delta_min(&self) -> f64 {
        self.gaps()
            .into_iter()
            .filter(|&d| d > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest sub-Gaussian constant over the arms.
    pub fn max_sigma(&self) -> f64 {
        self.arms.iter().map(|a| a.sigma_sg).fold(0.0, f64::max)
    }
}

/// Pre-drawn true rewards for every arm and round.
#[derive(Debug, Clone, PartialEq)]
pub struct RewardTable {
    rewards: Vec<Vec<f64>>,
    instance: BanditInstance,
    seed: u64,
}

impl RewardTable {
    /// True reward of `arm` at round `t` (1-based).
    pub fn reward(&self, arm: usize, t: usize) -> f64 {
        self.rewards[arm][t - 1]
    }

    /// Row of `arm`, indexed by `t − 1`.
    pub fn row(&self, arm: usize) -> &[f64] {
        &self.rewards[arm]
    }

    pub fn instance(&self) -> &BanditInstance {
        &self.instance
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Builds a table from explicit rows (tests and replay).
    pub fn from_rows(instance: BanditInstance, rows: Vec<Vec<f64>>, seed: u64) -> Result<Self> {
        if rows.len() != instance.num_arms()
            || rows.iter().any(|r| r.len() != instance.horizon())
        {
            return Err(Error::Domain("table shape does not match the instance".into()));
        }
        Ok(Self { rewards: rows, instance, seed })
    }
}

/// Draws the full K×T table; arm `a` uses substream `("table", a)` of `seed`.
pub fn draw_table(instance: &BanditInstance, seed: u64) -> RewardTable {
    let rewards = instance
        .arms()
        .iter()
        .enumerate()
        .map(|(a, model)| {
            let mut rng: SimRng = substream(seed, crate::seeding::TABLE_STREAM, a as u64);
            (0..instance.horizon()).map(|_| model.sample(&mut rng)).collect()
        })
        .collect();
    RewardTable {
        rewards,
        instance: instance.clone(),
        seed,
    }
}
