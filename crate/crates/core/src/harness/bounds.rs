//! Closed-form regret bounds and contamination thresholds.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{domain, Error, Result};

fn check_game(k: usize, horizon: usize, sigma0: f64) -> Result<()> {
    if k < 2 {
        return domain(format!("bound needs K > 1, got {k}"));
    }
    if horizon + 1 < k || horizon < 2 {
        return domain(format!("bound needs T >= max(K - 1, 2), got T = {horizon}, K = {k}"));
    }
    if !(sigma0 > 0.0 && sigma0.is_finite()) {
        return domain(format!("sigma0 = {sigma0} must be positive"));
    }
    Ok(())
}

/// Sublinear crUCB regret bound `8σ₀√(K T ln T) + 15 Σ_a Δ_a`, valid while α
/// stays under [`max_admissible_alpha`].
pub fn regret_bound_sublinear(k: usize, horizon: usize, sigma0: f64, gaps: &[f64]) -> Result<f64> {
    check_game(k, horizon, sigma0)?;
    if gaps.len() != k {
        return domain(format!("expected {k} gaps, got {}", gaps.len()));
    }
    let t = horizon as f64;
    Ok(8.0 * sigma0 * (k as f64 * t * t.ln()).sqrt() + 15.0 * gaps.iter().sum::<f64>())
}

/// Bound for any `α < 1/4`: the sublinear part plus the per-arm gap cap
/// `16 α σ₀ √(6 ln T)/(1 − 4α)` paid on every round.
pub fn regret_bound_linear_term(k: usize, horizon: usize, sigma0: f64, alpha: f64) -> Result<f64> {
    check_game(k, horizon, sigma0)?;
    if !(0.0..0.25).contains(&alpha) {
        return domain(format!("alpha = {alpha} outside [0, 1/4)"));
    }
    let t = horizon as f64;
    let sublinear = 8.0 * sigma0 * (k as f64 * t * t.ln()).sqrt();
    let gap_cap = 16.0 * alpha * sigma0 * (6.0 * t.ln()).sqrt() / (1.0 - 4.0 * alpha);
    Ok(sublinear + gap_cap * t)
}

/// Estimator / reward-model combination whose threshold is wanted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundVariant {
    /// Trimmed mean, sub-Gaussian rewards.
    Trimmed,
    /// Shorth mean, sub-Gaussian rewards.
    Shorth,
    /// Trimmed mean, rewards bounded by `b`.
    TrimmedBounded,
    /// Shorth mean, rewards bounded by `b`.
    ShorthBounded,
}

impl BoundVariant {
    pub const ALL: [BoundVariant; 4] = [
        BoundVariant::Trimmed,
        BoundVariant::Shorth,
        BoundVariant::TrimmedBounded,
        BoundVariant::ShorthBounded,
    ];

    pub fn id(self) -> &'static str {
        match self {
            BoundVariant::Trimmed => "trimmed",
            BoundVariant::Shorth => "shorth",
            BoundVariant::TrimmedBounded => "trimmed-bounded",
            BoundVariant::ShorthBounded => "shorth-bounded",
        }
    }
}

impl fmt::Display for BoundVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for BoundVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BoundVariant::ALL
            .into_iter()
            .find(|v| v.id() == s)
            .ok_or_else(|| Error::Domain(format!("unknown bound variant '{s}'")))
    }
}

/// Largest α for which the sublinear bound holds:
///
/// | variant           | threshold                         |
/// |-------------------|-----------------------------------|
/// | trimmed           | `Δ/(4(Δ + 4σ₀√(6 ln T)))`         |
/// | shorth            | `Δ/(4(Δ + 9σ₀√(6 ln T)))`         |
/// | trimmed, bounded  | `Δ/(4(Δ + 4b))`                   |
/// | shorth, bounded   | `Δ/(4(Δ + 9b))`                   |
pub fn max_admissible_alpha(
    delta_min: f64,
    sigma0: f64,
    horizon: usize,
    variant: BoundVariant,
    bound_b: Option<f64>,
) -> Result<f64> {
    if !(delta_min > 0.0 && delta_min.is_finite()) {
        return domain(format!("delta_min = {delta_min} must be positive"));
    }
    let scale = match variant {
        BoundVariant::Trimmed | BoundVariant::Shorth => {
            if !(sigma0 > 0.0 && sigma0.is_finite()) {
                return domain(format!("sigma0 = {sigma0} must be positive"));
            }
            if horizon < 2 {
                return domain("threshold needs T >= 2");
            }
            sigma0 * (6.0 * (horizon as f64).ln()).sqrt()
        }
        BoundVariant::TrimmedBounded | BoundVariant::ShorthBounded => match bound_b {
            Some(b) if b >= 0.0 && b.is_finite() => b,
            _ => return domain(format!("variant {variant} needs a reward bound b")),
        },
    };
    let factor = match variant {
        BoundVariant::Trimmed | BoundVariant::TrimmedBounded => 4.0,
        BoundVariant::Shorth | BoundVariant::ShorthBounded => 9.0,
    };
    Ok(delta_min / (4.0 * (delta_min + factor * scale)))
}
