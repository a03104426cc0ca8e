//! Named experiment presets on the K = 5, T = 1000 binomial instance.
//!
//! | id         | adversary | ε              | algorithms                                   |
//! |------------|-----------|----------------|----------------------------------------------|
//! | 1a, 1b, 1c | bernoulli | 0, 0.05, 0.1   | all seven, α = ε                             |
//! | 2a, 2b, 2c | none      | 0              | all seven, crUCB α = 0, 0.05, 0.1            |
//! | 3          | bernoulli | 0.05           | tUCB, sUCB with α ∈ {0, ε/2, ε, 2ε, 4ε}      |
//! | 4          | bernoulli | 0.05           | tUCB, sUCB with σ₀ ∈ {σ/4, σ/2, σ, 2σ}, α = ε |
//! | 6          | cluster   | 0.1            | all seven, α = ε                             |
//!
//! `σ` is the arms' sub-Gaussian constant (5 for binomial(10, ·)).

use crucb_core::policies::PolicyKind;

use crate::config::{RawAdversary, RawAlgorithm, RawConfig, DEFAULT_ARMS};
use crucb_core::environment::BanditInstance;

pub const PRESET_IDS: [&str; 9] = ["1a", "1b", "1c", "2a", "2b", "2c", "3", "4", "6"];

const SENSITIVITY_EPSILON: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
#[error("unknown preset '{id}', valid ids are {}", PRESET_IDS.join(", "))]
pub struct UnknownPreset {
    pub id: String,
}

fn adversary(kind: &str) -> Option<RawAdversary> {
    Some(RawAdversary {
        kind: Some(kind.into()),
        ..RawAdversary::default()
    })
}

fn all_algorithms(crucb_alpha: Option<f64>) -> Vec<RawAlgorithm> {
    PolicyKind::ALL
        .iter()
        .map(|&kind| RawAlgorithm {
            alpha: kind.robust_mean().and(crucb_alpha),
            ..RawAlgorithm::of_kind(kind)
        })
        .collect()
}

fn crucb_variant(kind: PolicyKind, label: String, alpha: f64, sigma0: Option<f64>) -> RawAlgorithm {
    RawAlgorithm {
        label: Some(label),
        alpha: Some(alpha),
        sigma0,
        ..RawAlgorithm::of_kind(kind)
    }
}

fn arm_sigma() -> f64 {
    BanditInstance::binomial_preset(DEFAULT_ARMS, 1)
        .expect("preset arms are valid")
        .max_sigma()
}

pub fn preset(id: &str) -> Result<RawConfig, UnknownPreset> {
    let base = RawConfig::default();
    let cfg = match id {
        "1a" | "1b" | "1c" => {
            let epsilon = match id {
                "1a" => 0.0,
                "1b" => 0.05,
                _ => 0.1,
            };
            RawConfig {
                epsilon: Some(epsilon),
                adversary: adversary("bernoulli"),
                algorithms: Some(all_algorithms(None)),
                ..base
            }
        }
        "2a" | "2b" | "2c" => {
            let alpha = match id {
                "2a" => 0.0,
                "2b" => 0.05,
                _ => 0.1,
            };
            RawConfig {
                epsilon: Some(0.0),
                adversary: adversary("none"),
                algorithms: Some(all_algorithms(Some(alpha))),
                ..base
            }
        }
        "3" => {
            let eps = SENSITIVITY_EPSILON;
            let mut algorithms = Vec::new();
            for kind in [PolicyKind::CrucbTrimmed, PolicyKind::CrucbShorth] {
                for alpha in [0.0, eps / 2.0, eps, 2.0 * eps, 4.0 * eps] {
                    let label = format!("{} alpha={alpha}", kind.short_name());
                    algorithms.push(crucb_variant(kind, label, alpha, None));
                }
            }
            RawConfig {
                epsilon: Some(eps),
                adversary: adversary("bernoulli"),
                algorithms: Some(algorithms),
                ..base
            }
        }
        "4" => {
            let eps = SENSITIVITY_EPSILON;
            let sigma = arm_sigma();
            let mut algorithms = Vec::new();
            for kind in [PolicyKind::CrucbTrimmed, PolicyKind::CrucbShorth] {
                for factor in [0.25, 0.5, 1.0, 2.0] {
                    let sigma0 = factor * sigma;
                    let label = format!("{} sigma0={sigma0}", kind.short_name());
                    algorithms.push(crucb_variant(kind, label, eps, Some(sigma0)));
                }
            }
            RawConfig {
                epsilon: Some(eps),
                adversary: adversary("bernoulli"),
                algorithms: Some(algorithms),
                ..base
            }
        }
        "6" => RawConfig {
            epsilon: Some(0.1),
            adversary: adversary("cluster"),
            algorithms: Some(all_algorithms(None)),
            ..base
        },
        _ => return Err(UnknownPreset { id: id.to_string() }),
    };
    Ok(cfg)
}
