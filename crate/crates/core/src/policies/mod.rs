//! Bandit policies behind one select/update interface.
//!
//! Index policies (crUCB, UCB1, RUCB-MAB) play arms `0..K` in the first `K`
//! rounds and then the arm with the largest index, ties going to the lowest
//! arm. Weight policies (EXP3, EXP3++, 0.5-TsallisInf) sample from a
//! probability vector from the first round on. They assume bounded rewards:
//! observations are clipped into `reward_range` and turned into losses in
//! `[0, 1]`; every clip is counted.

mod index;
mod weights;

use std::fmt;
use std::str::FromStr;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};
use crate::estimators::RobustMean;
use crate::seeding::{substream, SimRng, POLICY_STREAM, TIE_BREAK_STREAM};

pub use index::{crucb_bonus, crucb_index, rucb_index, ucb1_index};
pub use weights::{exp3_learning_rate, exp3_probabilities, exp3pp_probabilities, tsallis_weights, EXP3PP_GAP_CONSTANT};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PolicyKind {
    CrucbTrimmed,
    CrucbShorth,
    Ucb1,
    Exp3,
    #[serde(rename = "exp3++")]
    Exp3PlusPlus,
    #[serde(rename = "tsallis-inf")]
    TsallisInf,
    RucbMab,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 7] = [
        PolicyKind::CrucbTrimmed,
        PolicyKind::CrucbShorth,
        PolicyKind::Ucb1,
        PolicyKind::Exp3,
        PolicyKind::Exp3PlusPlus,
        PolicyKind::TsallisInf,
        PolicyKind::RucbMab,
    ];

    /// Identifier used in configuration files.
    pub fn id(self) -> &'static str {
        match self {
            PolicyKind::CrucbTrimmed => "crucb-trimmed",
            PolicyKind::CrucbShorth => "crucb-shorth",
            PolicyKind::Ucb1 => "ucb1",
            PolicyKind::Exp3 => "exp3",
            PolicyKind::Exp3PlusPlus => "exp3++",
            PolicyKind::TsallisInf => "tsallis-inf",
            PolicyKind::RucbMab => "rucb-mab",
        }
    }

    /// Legend label.
    pub fn short_name(self) -> &'static str {
        match self {
            PolicyKind::CrucbTrimmed => "tUCB",
            PolicyKind::CrucbShorth => "sUCB",
            PolicyKind::Ucb1 => "UCB1",
            PolicyKind::Exp3 => "EXP3",
            PolicyKind::Exp3PlusPlus => "EXP3++",
            PolicyKind::TsallisInf => "TsallisInf",
            PolicyKind::RucbMab => "RUCB-MAB",
        }
    }

    pub fn is_index_policy(self) -> bool {
        matches!(
            self,
            PolicyKind::CrucbTrimmed | PolicyKind::CrucbShorth | PolicyKind::Ucb1 | PolicyKind::RucbMab
        )
    }

    /// The robust mean behind a crUCB variant.
    pub fn robust_mean(self) -> Option<RobustMean> {
        match self {
            PolicyKind::CrucbTrimmed => Some(RobustMean::Trimmed),
            PolicyKind::CrucbShorth => Some(RobustMean::Shorth),
            _ => None,
        }
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.id() == lower || k.short_name().to_ascii_lowercase() == lower)
            .ok_or_else(|| {
                let ids: Vec<&str> = PolicyKind::ALL.iter().map(|k| k.id()).collect();
                Error::Config(format!("unknown policy '{s}', expected one of {}", ids.join(", ")))
            })
    }
}

/// Reward interval used to turn rewards into `[0, 1]` losses.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RewardRange {
    pub lo: f64,
    pub hi: f64,
}

impl RewardRange {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(Error::Config(format!("invalid reward range [{lo}, {hi}]")));
        }
        Ok(Self { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// Clips `x` into range; the flag reports whether clipping happened.
    pub fn clip(&self, x: f64) -> (f64, bool) {
        if x < self.lo {
            (self.lo, true)
        } else if x > self.hi {
            (self.hi, true)
        } else {
            (x, false)
        }
    }

    /// Loss in `[0, 1]` of an in-range reward.
    pub fn loss(&self, x: f64) -> f64 {
        (self.hi - x) / self.width()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolicyConfig {
    pub kind: PolicyKind,
    /// Trim / shorth fraction (crUCB only).
    pub alpha: f64,
    /// Upper bound on the sub-Gaussian constant (crUCB and RUCB-MAB).
    pub sigma0: f64,
    pub reward_range: RewardRange,
    /// crUCB: use the full confidence radius (with its α bias term) as bonus.
    pub full_radius_bonus: bool,
    /// UCB1 multiplies `√(2 ln t / N)` by this; `None` means the range width.
    pub ucb1_scale: Option<f64>,
}

impl PolicyConfig {
    pub fn new(kind: PolicyKind, alpha: f64, sigma0: f64, reward_range: RewardRange) -> Result<Self> {
        let cfg = Self {
            kind,
            alpha,
            sigma0,
            reward_range,
            full_radius_bonus: false,
            ucb1_scale: None,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(est) = self.kind.robust_mean() {
            let limit = est.alpha_limit();
            if !(self.alpha >= 0.0 && self.alpha < limit) {
                return Err(Error::Config(format!(
                    "{} needs 0 <= alpha < {limit:.4}, got {}",
                    self.kind, self.alpha
                )));
            }
        }
        if !(self.sigma0 > 0.0 && self.sigma0.is_finite()) {
            return Err(Error::Config(format!("sigma0 must be positive, got {}", self.sigma0)));
        }
        if let Some(s) = self.ucb1_scale {
            if !(s > 0.0 && s.is_finite()) {
                return Err(Error::Config(format!("ucb1_scale must be positive, got {s}")));
            }
        }
        RewardRange::new(self.reward_range.lo, self.reward_range.hi)?;
        Ok(())
    }
}

/// Importance-weighted statistics of the EXP3 family.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightState {
    pub loss_estimates: Vec<f64>,
    pub probabilities: Vec<f64>,
    pub clipped: usize,
}

/// Sufficient statistics shared by every policy.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    rewards: Vec<Vec<f64>>,
    sorted: Vec<Vec<f64>>,
    counts: Vec<usize>,
    t: usize,
    weights: Option<WeightState>,
}

impl PolicyState {
    pub fn new(num_arms: usize, weighted: bool) -> Self {
        Self {
            rewards: vec![Vec::new(); num_arms],
            sorted: vec![Vec::new(); num_arms],
            counts: vec![0; num_arms],
            t: 0,
            weights: weighted.then(|| WeightState {
                loss_estimates: vec![0.0; num_arms],
                probabilities: vec![1.0 / num_arms as f64; num_arms],
                clipped: 0,
            }),
        }
    }

    /// State holding the given observations, with `t` equal to their total count.
    pub fn from_observations(observations: Vec<Vec<f64>>) -> Result<Self> {
        let mut state = Self::new(observations.len(), false);
        for (arm, xs) in observations.into_iter().enumerate() {
            for x in xs {
                state.record(arm, x)?;
            }
        }
        Ok(state)
    }

    /// Appends an observation of `arm`.
    pub fn record(&mut self, arm: usize, observed: f64) -> Result<()> {
        if !observed.is_finite() {
            return domain(format!("non-finite observation {observed} for arm {arm}"));
        }
        if arm >= self.counts.len() {
            return domain(format!("arm {arm} out of range"));
        }
        self.rewards[arm].push(observed);
        let sorted = &mut self.sorted[arm];
        let pos = sorted.partition_point(|&y| y <= observed);
        sorted.insert(pos, observed);
        self.counts[arm] += 1;
        self.t += 1;
        Ok(())
    }

    pub fn num_arms(&self) -> usize {
        self.counts.len()
    }

    /// Rounds played so far.
    pub fn rounds(&self) -> usize {
        self.t
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    /// Observations of `arm` in arrival order.
    pub fn rewards(&self, arm: usize) -> &[f64] {
        &self.rewards[arm]
    }

    /// Observations of `arm` in ascending order.
    pub fn sorted_rewards(&self, arm: usize) -> &[f64] {
        &self.sorted[arm]
    }

    pub fn weights(&self) -> Option<&WeightState> {
        self.weights.as_ref()
    }
}

/// A policy together with its state and private random streams.
#[derive(Debug, Clone)]
pub struct Policy {
    config: PolicyConfig,
    state: PolicyState,
    sampler: SimRng,
    tie_break: SimRng,
    last_action: Option<usize>,
}

impl Policy {
    /// `seed` is the trial seed; sampling and shorth tie-breaking use their
    /// own substreams of it.
    pub fn new(config: PolicyConfig, num_arms: usize, seed: u64) -> Result<Self> {
        config.validate()?;
        if num_arms < 2 {
            return domain("a policy needs at least two arms");
        }
        Ok(Self {
            config,
            state: PolicyState::new(num_arms, !config.kind.is_index_policy()),
            sampler: substream(seed, POLICY_STREAM, 0),
            tie_break: substream(seed, TIE_BREAK_STREAM, 0),
            last_action: None,
        })
    }

    pub fn config(&self) -> &PolicyConfig {
        &self.config
    }

    pub fn state(&self) -> &PolicyState {
        &self.state
    }

    /// Sampling distribution of the last selection (weight policies only).
    pub fn probabilities(&self) -> Option<&[f64]> {
        self.state.weights.as_ref().map(|w| w.probabilities.as_slice())
    }

    /// Chooses the arm for the next round.
    pub fn select_action(&mut self) -> Result<usize> {
        let k = self.state.num_arms();
        let t = self.state.rounds() + 1;
        let arm = if self.config.kind.is_index_policy() {
            if t <= k {
                t - 1
            } else {
                self.argmax_index(t)?
            }
        } else {
            let probs = self.weight_probabilities(t)?;
            let dist = WeightedIndex::new(&probs)
                .map_err(|e| Error::Numerical(format!("invalid sampling distribution: {e}")))?;
            let arm = dist.sample(&mut self.sampler);
            self.state.weights.as_mut().expect("weight state").probabilities = probs;
            arm
        };
        self.last_action = Some(arm);
        Ok(arm)
    }

    fn argmax_index(&mut self, t: usize) -> Result<usize> {
        let mut best = (0, f64::NEG_INFINITY);
        for arm in 0..self.state.num_arms() {
            let value = match self.config.kind {
                PolicyKind::CrucbTrimmed | PolicyKind::CrucbShorth => {
                    crucb_index(&self.state, arm, t, &self.config, &mut self.tie_break)?
                }
                PolicyKind::Ucb1 => ucb1_index(&self.state, arm, t, &self.config)?,
                PolicyKind::RucbMab => rucb_index(&self.state, arm, t, &self.config)?,
                _ => unreachable!("not an index policy"),
            };
            if value > best.1 {
                best = (arm, value);
            }
        }
        Ok(best.0)
    }

    fn weight_probabilities(&self, t: usize) -> Result<Vec<f64>> {
        let w = self.state.weights.as_ref().expect("weight state");
        match self.config.kind {
            PolicyKind::Exp3 => Ok(exp3_probabilities(&w.loss_estimates, t)),
            PolicyKind::Exp3PlusPlus => Ok(exp3pp_probabilities(&w.loss_estimates, t)),
            PolicyKind::TsallisInf => tsallis_weights(&w.loss_estimates, 1.0 / (t as f64).sqrt()),
            _ => unreachable!("not a weight policy"),
        }
    }

    /// Feeds back the observation for the arm chosen by the last
    /// [`select_action`](Self::select_action).
    pub fn update(&mut self, arm: usize, observed: f64) -> Result<()> {
        if self.last_action != Some(arm) {
            return domain(format!(
                "update for arm {arm}, but the last selected arm was {:?}",
                self.last_action
            ));
        }
        self.state.record(arm, observed)?;
        let range = self.config.reward_range;
        if let Some(w) = self.state.weights.as_mut() {
            let (x, clipped) = range.clip(observed);
            if clipped {
                w.clipped += 1;
            }
            w.loss_estimates[arm] += range.loss(x) / w.probabilities[arm];
        }
        self.last_action = None;
        Ok(())
    }

    /// Number of observations clipped into the reward range so far.
    pub fn clipped(&self) -> usize {
        self.state.weights.as_ref().map_or(0, |w| w.clipped)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn range() -> RewardRange {
        RewardRange::new(0.0, 10.0).unwrap()
    }

    fn config(kind: PolicyKind, alpha: f64) -> PolicyConfig {
        PolicyConfig::new(kind, alpha, 5.0, range()).unwrap()
    }

    #[test]
    fn kinds_parse_from_ids_and_labels() {
        for k in PolicyKind::ALL {
            assert_eq!(k.id().parse::<PolicyKind>().unwrap(), k);
            assert_eq!(k.short_name().parse::<PolicyKind>().unwrap(), k);
        }
        assert!("thompson".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn alpha_limits_are_checked() {
        assert!(PolicyConfig::new(PolicyKind::CrucbTrimmed, 0.6, 1.0, range()).is_err());
        assert!(PolicyConfig::new(PolicyKind::CrucbTrimmed, 0.45, 1.0, range()).is_ok());
        assert!(PolicyConfig::new(PolicyKind::CrucbShorth, 0.34, 1.0, range()).is_err());
        assert!(PolicyConfig::new(PolicyKind::Exp3, 0.9, 1.0, range()).is_ok());
        assert!(PolicyConfig::new(PolicyKind::Ucb1, 0.0, 0.0, range()).is_err());
        assert!(RewardRange::new(1.0, 1.0).is_err());
    }

    #[test]
    fn index_policies_play_each_arm_first() {
        for kind in [PolicyKind::CrucbTrimmed, PolicyKind::CrucbShorth, PolicyKind::Ucb1, PolicyKind::RucbMab] {
            let mut p = Policy::new(config(kind, 0.1), 5, 3).unwrap();
            for expected in 0..5 {
                let a = p.select_action().unwrap();
                assert_eq!(a, expected, "{kind}");
                p.update(a, 1.0).unwrap();
            }
        }
    }

    #[test]
    fn update_tracks_counts() {
        let mut p = Policy::new(config(PolicyKind::CrucbTrimmed, 0.1), 3, 3).unwrap();
        for i in 0..50 {
            let a = p.select_action().unwrap();
            let before = p.state().counts().to_vec();
            p.update(a, (i % 7) as f64).unwrap();
            let after = p.state().counts();
            for arm in 0..3 {
                let expected = before[arm] + usize::from(arm == a);
                assert_eq!(after[arm], expected);
                assert_eq!(p.state().rewards(arm).len(), after[arm]);
            }
        }
        assert_eq!(p.state().counts().iter().sum::<usize>(), 50);
        assert_eq!(p.state().rounds(), 50);
    }

    #[test]
    fn update_rejects_bad_input() {
        let mut p = Policy::new(config(PolicyKind::Ucb1, 0.0), 2, 3).unwrap();
        assert!(p.update(0, 1.0).is_err());
        let a = p.select_action().unwrap();
        assert!(p.update(1 - a, 1.0).is_err());
        assert!(p.update(a, f64::NAN).is_err());
        assert!(p.update(a, f64::INFINITY).is_err());
    }

    #[test]
    fn exp3_starts_uniform_and_skips_unplayed_arms() {
        let mut p = Policy::new(config(PolicyKind::Exp3, 0.0), 4, 9).unwrap();
        let a = p.select_action().unwrap();
        assert_eq!(p.probabilities().unwrap(), &[0.25; 4]);
        p.update(a, 3.0).unwrap();
        let losses = &p.state().weights().unwrap().loss_estimates;
        for (arm, &loss) in losses.iter().enumerate() {
            if arm == a {
                assert!((loss - 0.7 / 0.25).abs() < 1e-12);
            } else {
                assert_eq!(loss, 0.0);
            }
        }
    }

    #[test]
    fn weight_policies_clip_and_count() {
        let mut p = Policy::new(config(PolicyKind::TsallisInf, 0.0), 3, 1).unwrap();
        let a = p.select_action().unwrap();
        p.update(a, 1e6).unwrap();
        assert_eq!(p.clipped(), 1);
        let a = p.select_action().unwrap();
        p.update(a, 5.0).unwrap();
        assert_eq!(p.clipped(), 1);
        assert_eq!(p.state().rewards(a).last(), Some(&5.0));
    }

    #[test]
    fn sampling_distributions_stay_normalised() {
        for kind in [PolicyKind::Exp3, PolicyKind::Exp3PlusPlus, PolicyKind::TsallisInf] {
            let mut p = Policy::new(config(kind, 0.0), 5, 17).unwrap();
            for t in 0..400 {
                let a = p.select_action().unwrap();
                let probs = p.probabilities().unwrap();
                let total: f64 = probs.iter().sum();
                assert!((total - 1.0).abs() < 1e-9, "{kind}: sum {total}");
                assert!(probs.iter().all(|&q| q >= 0.0));
                let reward = if a == 0 { 9.0 } else { (t % 9) as f64 };
                p.update(a, reward).unwrap();
            }
        }
    }

    #[test]
    fn same_seed_same_actions() {
        for kind in PolicyKind::ALL {
            let run = |seed| {
                let mut p = Policy::new(config(kind, 0.1), 4, seed).unwrap();
                (0..200)
                    .map(|i| {
                        let a = p.select_action().unwrap();
                        p.update(a, ((i * 7 + a * 3) % 11) as f64).unwrap();
                        a
                    })
                    .collect::<Vec<_>>()
            };
            assert_eq!(run(5), run(5), "{kind}");
        }
    }
}
