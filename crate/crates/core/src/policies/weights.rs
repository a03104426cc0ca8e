//! Sampling distributions of the EXP3 family.
//!
//! All three work on cumulative importance-weighted loss estimates `L̂_a`.
//! Schedules, with `t` the current round and `K` the number of arms:
//!
//! - EXP3: `p ∝ exp(−η_t L̂)`, `η_t = √(ln K / (t K))`.
//! - EXP3++: `η_t = β_t = ½ √(ln K / (t K))`; exploration
//!   `ε_a = min(1/(2K), β_t, ξ_a)` with `ξ_a = c·ln(max(t Δ̂_a², e)) / (t Δ̂_a²)`,
//!   `c = 18` and gap estimate `Δ̂_a = min(1, (L̂_a − min L̂)/(t − 1))`;
//!   `p_a = (1 − Σε) ρ_a + ε_a` with `ρ ∝ exp(−η_t L̂)`.
//! - 0.5-TsallisInf: `w_a = 4/(η_t (L̂_a − x))²` with `η_t = 1/√t` and the
//!   normaliser `x < min L̂` found by Newton's method.

use crate::error::{domain, Error, Result};

/// Gap-exploration constant of EXP3++.
pub const EXP3PP_GAP_CONSTANT: f64 = 18.0;

const NEWTON_MAX_ITER: usize = 100;
const NEWTON_TOL: f64 = 1e-12;

pub fn exp3_learning_rate(t: usize, k: usize) -> f64 {
    let k = k as f64;
    (k.ln() / (t as f64 * k)).sqrt()
}

fn gibbs(losses: &[f64], eta: f64) -> Vec<f64> {
    let min = losses.iter().cloned().fold(f64::INFINITY, f64::min);
    let raw: Vec<f64> = losses.iter().map(|l| (-eta * (l - min)).exp()).collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|r| r / total).collect()
}

/// EXP3 sampling distribution at round `t`.
pub fn exp3_probabilities(losses: &[f64], t: usize) -> Vec<f64> {
    gibbs(losses, exp3_learning_rate(t, losses.len()))
}

/// EXP3++ sampling distribution at round `t`.
pub fn exp3pp_probabilities(losses: &[f64], t: usize) -> Vec<f64> {
    let k = losses.len();
    let rate = 0.5 * exp3_learning_rate(t, k);
    let rho = gibbs(losses, rate);
    let min = losses.iter().cloned().fold(f64::INFINITY, f64::min);
    let tf = t as f64;
    let explore: Vec<f64> = losses
        .iter()
        .map(|l| {
            let gap = if t > 1 { ((l - min) / (tf - 1.0)).min(1.0) } else { 0.0 };
            let scaled = tf * gap * gap;
            let xi = if scaled > 0.0 {
                EXP3PP_GAP_CONSTANT * scaled.max(std::f64::consts::E).ln() / scaled
            } else {
                f64::INFINITY
            };
            (0.5 / k as f64).min(rate).min(xi)
        })
        .collect();
    let total_explore: f64 = explore.iter().sum();
    rho.iter()
        .zip(&explore)
        .map(|(r, e)| (1.0 - total_explore) * r + e)
        .collect()
}

/// 0.5-Tsallis-INF weights `w_a = 4/(η(L̂_a − x))²`, normalised to sum to one.
pub fn tsallis_weights(losses: &[f64], eta: f64) -> Result<Vec<f64>> {
    if !(eta > 0.0 && eta.is_finite()) {
        return domain(format!("learning rate {eta} must be positive"));
    }
    if losses.is_empty() {
        return domain("no arms");
    }
    let min = losses.iter().cloned().fold(f64::INFINITY, f64::min);
    let weight = |l: f64, x: f64| 4.0 / (eta * (l - x)).powi(2);

    // Start where the best arm alone has weight one; the sum is convex and
    // increasing in x, so Newton steps from the right stay right of the root.
    let mut x = min - 2.0 / eta;
    let mut converged = false;
    for _ in 0..NEWTON_MAX_ITER {
        let mut f = -1.0;
        let mut df = 0.0;
        for &l in losses {
            let w = weight(l, x);
            f += w;
            df += eta * w * w.sqrt();
        }
        if f.abs() < NEWTON_TOL {
            converged = true;
            break;
        }
        x -= f / df;
    }
    if !converged {
        return Err(Error::Numerical(
            "Tsallis-INF normaliser did not converge in 100 Newton steps".into(),
        ));
    }
    let w: Vec<f64> = losses.iter().map(|&l| weight(l, x)).collect();
    let total: f64 = w.iter().sum();
    Ok(w.into_iter().map(|v| v / total).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Root of `Σ 4/(η(L_a − x))² = 1` by bisection on `[min L − 2√K/η, min L)`.
    fn bisection_weights(losses: &[f64], eta: f64) -> Vec<f64> {
        let min = losses.iter().cloned().fold(f64::INFINITY, f64::min);
        let k = losses.len() as f64;
        let total = |x: f64| losses.iter().map(|l| 4.0 / (eta * (l - x)).powi(2)).sum::<f64>();
        let (mut lo, mut hi) = (min - 2.0 * k.sqrt() / eta, min - 1e-300);
        for _ in 0..400 {
            let mid = 0.5 * (lo + hi);
            if total(mid) > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let x = 0.5 * (lo + hi);
        losses.iter().map(|l| 4.0 / (eta * (l - x)).powi(2)).collect()
    }

    #[test]
    fn equal_losses_give_uniform_weights() {
        let w = tsallis_weights(&[3.0; 4], 0.7).unwrap();
        for v in w {
            assert!((v - 0.25).abs() < 1e-12);
        }
    }

    #[test]
    fn two_arm_example_matches_bisection() {
        let w = tsallis_weights(&[0.0, 10.0], 0.1).unwrap();
        let oracle = bisection_weights(&[0.0, 10.0], 0.1);
        assert!(w[0] > w[1]);
        for (a, b) in w.iter().zip(&oracle) {
            assert!((a - b).abs() < 1e-9, "{a} vs {b}");
        }
        assert!(tsallis_weights(&[0.0, 1.0], 0.0).is_err());
    }

    #[test]
    fn exp3_is_uniform_without_losses() {
        assert_eq!(exp3_probabilities(&[0.0; 5], 1), vec![0.2; 5]);
        let p = exp3pp_probabilities(&[0.0; 5], 1);
        for v in p {
            assert!((v - 0.2).abs() < 1e-15);
        }
    }

    #[test]
    fn exp3_prefers_low_loss() {
        let p = exp3_probabilities(&[0.0, 50.0, 100.0], 100);
        assert!(p[0] > p[1] && p[1] > p[2]);
        let q = exp3pp_probabilities(&[0.0, 50.0, 100.0], 100);
        assert!(q[0] > q[1] && q[1] >= q[2]);
        // every arm keeps at least its exploration share
        assert!(q.iter().all(|&v| v > 0.0));
    }

    proptest! {
        #[test]
        fn tsallis_matches_bisection(
            losses in prop::collection::vec(0.0f64..500.0, 2..8),
            eta in 0.01f64..2.0,
        ) {
            let w = tsallis_weights(&losses, eta).unwrap();
            let total: f64 = w.iter().sum();
            prop_assert!((total - 1.0).abs() < 1e-9);
            prop_assert!(w.iter().all(|&v| v > 0.0 && v < 1.0));
            let oracle = bisection_weights(&losses, eta);
            for (a, b) in w.iter().zip(&oracle) {
                prop_assert!((a - b).abs() < 1e-8);
            }
        }

        #[test]
        fn exp3_family_distributions_are_normalised(
            losses in prop::collection::vec(0.0f64..1e4, 2..8),
            t in 1usize..5000,
        ) {
            for p in [exp3_probabilities(&losses, t), exp3pp_probabilities(&losses, t)] {
                let total: f64 = p.iter().sum();
                prop_assert!((total - 1.0).abs() < 1e-9);
                prop_assert!(p.iter().all(|&v| v >= 0.0));
            }
        }
    }
}
