use rand::Rng;

use super::{PolicyConfig, PolicyKind, PolicyState};
use crate::error::{domain, Result};
use crate::estimators::{mean, median_sorted};

fn check_index_args(state: &PolicyState, arm: usize, t: usize) -> Result<usize> {
    if arm >= state.num_arms() {
        return domain(format!("arm {arm} out of range"));
    }
    let n = state.counts()[arm];
    if n == 0 {
        return domain(format!("arm {arm} has no observations"));
    }
    if t < 2 || t < n {
        return domain(format!("index needs t >= max(2, N); t = {t}, N = {n}"));
    }
    Ok(n)
}

/// crUCB exploration bonus `σ₀/(1−2α) · √(4 ln t / N)`.
pub fn crucb_bonus(n: usize, t: usize, alpha: f64, sigma0: f64) -> f64 {
    sigma0 / (1.0 - 2.0 * alpha) * (4.0 * (t as f64).ln() / n as f64).sqrt()
}

/// crUCB index of `arm` at round `t`: robust mean plus bonus.
///
/// While the configured estimator is undefined for the arm's sample size (a
/// trim that would leave no points, an empty shorth window) the index is
/// `+∞`, so the arm is pulled again like an unplayed arm.
pub fn crucb_index<R: Rng + ?Sized>(
    state: &PolicyState,
    arm: usize,
    t: usize,
    config: &PolicyConfig,
    tie_break: &mut R,
) -> Result<f64> {
    let n = check_index_args(state, arm, t)?;
    let estimator = config
        .kind
        .robust_mean()
        .ok_or_else(|| crate::Error::Config(format!("{} is not a crUCB variant", config.kind)))?;
    let sorted = state.sorted_rewards(arm);
    if !estimator.defined_for(n, config.alpha) {
        return Ok(f64::INFINITY);
    }
    let center = estimator.estimate_sorted(sorted, config.alpha, tie_break)?;
    let bonus = if config.full_radius_bonus {
        estimator.radius(n, t, config.alpha, config.sigma0)?
    } else {
        crucb_bonus(n, t, config.alpha, config.sigma0)
    };
    Ok(center + bonus)
}

/// UCB1 index: empirical mean plus `scale · √(2 ln t / N)`.
pub fn ucb1_index(state: &PolicyState, arm: usize, t: usize, config: &PolicyConfig) -> Result<f64> {
    let n = check_index_args(state, arm, t)?;
    let scale = config.ucb1_scale.unwrap_or(config.reward_range.width());
    Ok(mean(state.rewards(arm))? + scale * (2.0 * (t as f64).ln() / n as f64).sqrt())
}

/// RUCB-MAB index: empirical median plus the crUCB bonus with `α = 0`.
pub fn rucb_index(state: &PolicyState, arm: usize, t: usize, config: &PolicyConfig) -> Result<f64> {
    let n = check_index_args(state, arm, t)?;
    debug_assert_eq!(config.kind, PolicyKind::RucbMab);
    Ok(median_sorted(state.sorted_rewards(arm)) + crucb_bonus(n, t, 0.0, config.sigma0))
}
