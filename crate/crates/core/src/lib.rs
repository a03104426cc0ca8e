//! Simulation toolkit for stochastic multi-armed bandits whose observed rewards
//! may be replaced by an adversary (ε-contamination).
//!
//! The crate is organised bottom-up:
//!
//! - [`estimators`]: α-trimmed and α-shorth means, the empirical median, and the
//!   finite-sample confidence radii of the two robust means.
//! - [`environment`]: reward models, bandit instances and the pre-drawn reward table.
//! - [`adversaries`]: full-knowledge contamination strategies and the per-arm budget.
//! - [`policies`]: crUCB (trimmed and shorth variants) and the baselines UCB1,
//!   EXP3, EXP3++, 0.5-TsallisInf and RUCB-MAB.
//! - [`harness`]: the game loop, uncontaminated regret, aggregation and the
//!   closed-form regret bounds.
//!
//! Arms are 0-based everywhere in the API. Rounds `t` are 1-based, because
//! `log t` appears in every confidence bonus.

pub mod adversaries;
pub mod environment;
mod error;
pub mod estimators;
pub mod harness;
pub mod policies;
pub mod seeding;

pub use error::{Error, Result};
