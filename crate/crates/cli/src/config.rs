//! Experiment configuration.
//!
//! A config document (TOML, or the `config` object of a metadata sidecar) is
//! deserialized into [`RawConfig`], where every key is optional, and then
//! resolved into a validated [`ExperimentConfig`]. Resolution fills defaults and
//! checks every value before any trial runs. [`ExperimentConfig::to_raw`] gives
//! back a fully explicit document that resolves to the same experiment.

use std::collections::HashSet;
use std::fmt;
use std::path::PathBuf;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crucb_core::adversaries::{
    default_cluster_size, AdversaryConfig, AdversaryKind, BudgetMode, BudgetPolicy, ClusterScope,
    ContaminationCaps, ValueRange,
};
use crucb_core::environment::{BanditInstance, RewardKind, RewardModel};
use crucb_core::policies::{PolicyConfig, PolicyKind, RewardRange};

pub const DEFAULT_ARMS: usize = 5;
pub const DEFAULT_HORIZON: usize = 1000;
pub const DEFAULT_TRIALS: usize = 10;
pub const DEFAULT_MASTER_SEED: u64 = 0;
pub const DEFAULT_OUTPUT: &str = "results";

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("could not parse config: {0}")]
    Parse(String),
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
}

fn invalid<T>(path: impl Into<String>, message: impl Into<String>) -> Result<T, ConfigError> {
    Err(ConfigError::Invalid {
        path: path.into(),
        message: message.into(),
    })
}

/// Which regret trace is written.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RegretKind {
    #[default]
    Pseudo,
    Realized,
    Both,
}

impl RegretKind {
    pub fn includes_realized(self) -> bool {
        matches!(self, RegretKind::Realized | RegretKind::Both)
    }
}

impl fmt::Display for RegretKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RegretKind::Pseudo => "pseudo",
            RegretKind::Realized => "realized",
            RegretKind::Both => "both",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub master_seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regret: Option<RegretKind>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub diagnostic_eq2: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    /// Reward interval for loss normalisation and the default UCB1 scale.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reward_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub arms: Option<Vec<RawArm>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub adversary: Option<RawAdversary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algorithms: Option<Vec<RawAlgorithm>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawArm {
    pub family: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma: Option<f64>,
    /// Sub-Gaussian constant override.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma_sg: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAdversary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub kind: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub budget: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_size: Option<i64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cluster_scope: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub optimal_range: Option<[f64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub suboptimal_range: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawAlgorithm {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sigma0: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub full_radius_bonus: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ucb1_scale: Option<f64>,
}

impl RawAlgorithm {
    pub fn of_kind(kind: PolicyKind) -> Self {
        Self {
            kind: kind.id().to_string(),
            ..Self::default()
        }
    }
}

/// One configured algorithm and its legend label.
#[derive(Debug, Clone, PartialEq)]
pub struct Algorithm {
    pub label: String,
    pub policy: PolicyConfig,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub instance: BanditInstance,
    pub trials: usize,
    pub master_seed: u64,
    pub epsilon: f64,
    pub adversary: AdversaryConfig,
    pub algorithms: Vec<Algorithm>,
    pub regret: RegretKind,
    pub diagnostic_eq2: bool,
    pub output: PathBuf,
    pub threads: Option<usize>,
    pub reward_range: RewardRange,
}

impl RawConfig {
    pub fn from_toml(text: &str) -> Result<Self, ConfigError> {
        toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))
    }

    /// Reads the `config` object of a metadata sidecar.
    pub fn from_metadata_json(text: &str) -> Result<Self, ConfigError> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;
        let config = value
            .get("config")
            .cloned()
            .ok_or_else(|| ConfigError::Parse("metadata has no \"config\" object".into()))?;
        serde_json::from_value(config).map_err(|e| ConfigError::Parse(format!("config: {e}")))
    }

    /// Parses either format; JSON is recognised by a leading `{`.
    pub fn from_document(text: &str) -> Result<Self, ConfigError> {
        if text.trim_start().starts_with('{') {
            Self::from_metadata_json(text)
        } else {
            Self::from_toml(text)
        }
    }

    pub fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let horizon = positive(self.horizon, DEFAULT_HORIZON, "horizon")?;
        let trials = positive(self.trials, DEFAULT_TRIALS, "trials")?;
        let epsilon = self.epsilon.unwrap_or(0.0);
        if !(0.0..1.0).contains(&epsilon) {
            return invalid("epsilon", format!("must lie in [0, 1), got {epsilon}"));
        }

        let arms = match &self.arms {
            Some(arms) => {
                let models = arms
                    .iter()
                    .enumerate()
                    .map(|(i, a)| a.resolve(&format!("arms[{i}]")))
                    .collect::<Result<Vec<_>, _>>()?;
                if let Some(k) = self.k {
                    if k != models.len() as i64 {
                        return invalid("k", format!("is {k} but {} arms are listed", models.len()));
                    }
                }
                models
            }
            None => {
                let k = positive(self.k, DEFAULT_ARMS, "k")?;
                if k < 2 {
                    return invalid("k", format!("need at least two arms, got {k}"));
                }
                default_arms(k)
            }
        };
        if arms.len() < 2 {
            return invalid("k", format!("need at least two arms, got {}", arms.len()));
        }
        let instance = BanditInstance::new(arms, horizon).or_else(|e| invalid("arms", e.to_string()))?;

        let reward_range = match self.reward_range {
            Some([lo, hi]) => RewardRange::new(lo, hi).or_else(|e| invalid("reward_range", e.to_string()))?,
            None => default_reward_range(&instance)?,
        };

        let adversary = self
            .adversary
            .clone()
            .unwrap_or_default()
            .resolve(epsilon, &instance)?;

        let raw_algorithms = self
            .algorithms
            .clone()
            .unwrap_or_else(|| PolicyKind::ALL.iter().map(|&k| RawAlgorithm::of_kind(k)).collect());
        if raw_algorithms.is_empty() {
            return invalid("algorithms", "at least one algorithm is required");
        }
        let mut labels = HashSet::new();
        let mut algorithms = Vec::with_capacity(raw_algorithms.len());
        for (i, raw) in raw_algorithms.iter().enumerate() {
            let path = format!("algorithms[{i}]");
            let algo = raw.resolve(&path, epsilon, instance.max_sigma(), reward_range)?;
            if !labels.insert(algo.label.clone()) {
                return invalid(
                    format!("{path}.label"),
                    format!("duplicate label '{}'; give each algorithm a distinct label", algo.label),
                );
            }
            algorithms.push(algo);
        }

        if self.threads == Some(0) {
            return invalid("threads", "must be positive");
        }

        Ok(ExperimentConfig {
            instance,
            trials,
            master_seed: self.master_seed.unwrap_or(DEFAULT_MASTER_SEED),
            epsilon,
            adversary,
            algorithms,
            regret: self.regret.unwrap_or_default(),
            diagnostic_eq2: self.diagnostic_eq2.unwrap_or(false),
            output: PathBuf::from(self.output.clone().unwrap_or_else(|| DEFAULT_OUTPUT.into())),
            threads: self.threads,
            reward_range,
        })
    }
}

fn positive(value: Option<i64>, default: usize, path: &str) -> Result<usize, ConfigError> {
    match value {
        None => Ok(default),
        Some(v) if v > 0 => Ok(v as usize),
        Some(v) => invalid(path, format!("must be positive, got {v}")),
    }
}

fn default_arms(k: usize) -> Vec<RewardModel> {
    BanditInstance::binomial_preset(k, 1)
        .expect("preset arms are valid")
        .arms()
        .to_vec()
}

fn default_reward_range(instance: &BanditInstance) -> Result<RewardRange, ConfigError> {
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for arm in instance.arms() {
        match (arm.lower_bound(), arm.bound_b) {
            (Some(l), Some(b)) => {
                lo = lo.min(l);
                hi = hi.max(b);
            }
            _ => return invalid("reward_range", "required when an arm has unbounded rewards"),
        }
    }
    RewardRange::new(lo, hi).or_else(|e| invalid("reward_range", e.to_string()))
}

fn require<T: Copy>(value: Option<T>, path: &str, key: &str) -> Result<T, ConfigError> {
    value.map_or_else(|| invalid(format!("{path}.{key}"), "missing"), Ok)
}

impl RawArm {
    fn resolve(&self, path: &str) -> Result<RewardModel, ConfigError> {
        let check = |r: crucb_core::Result<RewardModel>| r.or_else(|e| invalid(path, e.to_string()));
        let allowed: &[&str] = match self.family.as_str() {
            "binomial" => &["trials", "p"],
            "gaussian" => &["mu", "sigma"],
            "bernoulli" => &["p"],
            other => {
                return invalid(
                    format!("{path}.family"),
                    format!("unknown family '{other}', expected binomial, gaussian or bernoulli"),
                )
            }
        };
        let present = [
            ("trials", self.trials.is_some()),
            ("p", self.p.is_some()),
            ("mu", self.mu.is_some()),
            ("sigma", self.sigma.is_some()),
        ];
        for (key, set) in present {
            if set && !allowed.contains(&key) {
                return invalid(format!("{path}.{key}"), format!("not a {} parameter", self.family));
            }
        }
        let model = match self.family.as_str() {
            "binomial" => check(RewardModel::binomial(
                require(self.trials, path, "trials")?,
                require(self.p, path, "p")?,
            ))?,
            "gaussian" => check(RewardModel::gaussian(
                require(self.mu, path, "mu")?,
                require(self.sigma, path, "sigma")?,
            ))?,
            _ => check(RewardModel::bernoulli(require(self.p, path, "p")?))?,
        };
        match self.sigma_sg {
            Some(s) => model
                .with_sigma_sg(s)
                .or_else(|e| invalid(format!("{path}.sigma_sg"), e.to_string())),
            None => Ok(model),
        }
    }

    fn from_model(model: &RewardModel) -> Self {
        let mut raw = match model.kind {
            RewardKind::Binomial { trials, p } => Self {
                family: "binomial".into(),
                trials: Some(trials),
                p: Some(p),
                ..Self::default()
            },
            RewardKind::Gaussian { mu, sigma } => Self {
                family: "gaussian".into(),
                mu: Some(mu),
                sigma: Some(sigma),
                ..Self::default()
            },
            RewardKind::Bernoulli { p } => Self {
                family: "bernoulli".into(),
                p: Some(p),
                ..Self::default()
            },
        };
        raw.sigma_sg = Some(model.sigma_sg);
        raw
    }
}

fn range(value: Option<[f64; 2]>, path: &str) -> Result<Option<ValueRange>, ConfigError> {
    value
        .map(|[lo, hi]| ValueRange::new(lo, hi).or_else(|e| invalid(path, e.to_string())))
        .transpose()
}

impl RawAdversary {
    fn resolve(&self, epsilon: f64, instance: &BanditInstance) -> Result<AdversaryConfig, ConfigError> {
        let default_kind = if epsilon > 0.0 { "bernoulli" } else { "none" };
        let kind = match self.kind.as_deref().unwrap_or(default_kind) {
            "none" => AdversaryKind::None,
            "bernoulli" => AdversaryKind::Bernoulli { epsilon },
            "cluster" => {
                let size = match self.cluster_size {
                    Some(m) if m >= 0 => m as usize,
                    Some(m) => return invalid("adversary.cluster_size", format!("must be non-negative, got {m}")),
                    None => default_cluster_size(epsilon, instance.horizon(), instance.num_arms()),
                };
                let scope = match self.cluster_scope.as_deref().unwrap_or("per-arm") {
                    "per-arm" => ClusterScope::PerArm,
                    "global" => ClusterScope::Global,
                    other => {
                        return invalid(
                            "adversary.cluster_scope",
                            format!("unknown scope '{other}', expected per-arm or global"),
                        )
                    }
                };
                AdversaryKind::Cluster { size, scope }
            }
            other => {
                return invalid(
                    "adversary.kind",
                    format!("unknown adversary '{other}', expected none, bernoulli or cluster"),
                )
            }
        };
        if !matches!(kind, AdversaryKind::Cluster { .. })
            && (self.cluster_size.is_some() || self.cluster_scope.is_some())
        {
            return invalid("adversary", "cluster_size and cluster_scope need kind = \"cluster\"");
        }
        let budget = match self.budget.as_deref().unwrap_or("unconstrained") {
            "unconstrained" => BudgetPolicy::unconstrained(),
            "enforced" => BudgetPolicy::enforced(epsilon).or_else(|e| invalid("adversary.budget", e.to_string()))?,
            other => {
                return invalid(
                    "adversary.budget",
                    format!("unknown budget '{other}', expected unconstrained or enforced"),
                )
            }
        };
        let caps = ContaminationCaps {
            optimal: range(self.optimal_range, "adversary.optimal_range")?,
            suboptimal: range(self.suboptimal_range, "adversary.suboptimal_range")?,
        };
        if !matches!(kind, AdversaryKind::None) {
            let best = instance.optimal_arm();
            for (a, arm) in instance.arms().iter().enumerate() {
                if let Err(e) = caps.range_for(a == best, arm.bound_b) {
                    let key = if a == best { "optimal_range" } else { "suboptimal_range" };
                    return invalid(format!("adversary.{key}"), e.to_string());
                }
            }
        }
        Ok(AdversaryConfig { kind, caps, budget })
    }

    fn from_config(adv: &AdversaryConfig) -> Self {
        let (kind, cluster_size, cluster_scope) = match adv.kind {
            AdversaryKind::None => ("none", None, None),
            AdversaryKind::Bernoulli { .. } => ("bernoulli", None, None),
            AdversaryKind::Cluster { size, scope } => (
                "cluster",
                Some(size as i64),
                Some(match scope {
                    ClusterScope::PerArm => "per-arm".to_string(),
                    ClusterScope::Global => "global".to_string(),
                }),
            ),
        };
        Self {
            kind: Some(kind.into()),
            budget: Some(
                match adv.budget.mode {
                    BudgetMode::Enforced => "enforced",
                    BudgetMode::Unconstrained => "unconstrained",
                }
                .into(),
            ),
            cluster_size,
            cluster_scope,
            optimal_range: adv.caps.optimal.map(|r| [r.lo, r.hi]),
            suboptimal_range: adv.caps.suboptimal.map(|r| [r.lo, r.hi]),
        }
    }
}

impl RawAlgorithm {
    fn resolve(
        &self,
        path: &str,
        epsilon: f64,
        default_sigma0: f64,
        reward_range: RewardRange,
    ) -> Result<Algorithm, ConfigError> {
        let kind: PolicyKind = self
            .kind
            .parse()
            .or_else(|e: crucb_core::Error| invalid(format!("{path}.kind"), e.to_string()))?;
        if kind.robust_mean().is_none() && (self.alpha.is_some_and(|a| a != 0.0) || self.full_radius_bonus == Some(true)) {
            return invalid(path, format!("alpha and full_radius_bonus only apply to crUCB, not {kind}"));
        }
        if kind != PolicyKind::Ucb1 && self.ucb1_scale.is_some() {
            return invalid(format!("{path}.ucb1_scale"), format!("only applies to ucb1, not {kind}"));
        }
        let alpha = if kind.robust_mean().is_some() {
            self.alpha.unwrap_or(epsilon)
        } else {
            0.0
        };
        let policy = PolicyConfig {
            kind,
            alpha,
            sigma0: self.sigma0.unwrap_or(default_sigma0),
            reward_range,
            full_radius_bonus: self.full_radius_bonus.unwrap_or(false),
            ucb1_scale: self.ucb1_scale,
        };
        if let Err(e) = policy.validate() {
            let key = if !(policy.sigma0 > 0.0 && policy.sigma0.is_finite()) {
                "sigma0"
            } else if self.ucb1_scale.is_some_and(|s| !(s > 0.0 && s.is_finite())) {
                "ucb1_scale"
            } else {
                "alpha"
            };
            return invalid(format!("{path}.{key}"), e.to_string());
        }
        let label = self.label.clone().unwrap_or_else(|| kind.short_name().to_string());
        if label.trim().is_empty() {
            return invalid(format!("{path}.label"), "must not be empty");
        }
        Ok(Algorithm { label, policy })
    }
}

impl ExperimentConfig {
    pub fn num_arms(&self) -> usize {
        self.instance.num_arms()
    }

    pub fn horizon(&self) -> usize {
        self.instance.horizon()
    }

    /// Fully explicit document resolving to this configuration.
    pub fn to_raw(&self) -> RawConfig {
        RawConfig {
            k: Some(self.num_arms() as i64),
            horizon: Some(self.horizon() as i64),
            trials: Some(self.trials as i64),
            master_seed: Some(self.master_seed),
            epsilon: Some(self.epsilon),
            regret: Some(self.regret),
            diagnostic_eq2: Some(self.diagnostic_eq2),
            output: Some(self.output.to_string_lossy().into_owned()),
            threads: self.threads,
            reward_range: Some([self.reward_range.lo, self.reward_range.hi]),
            arms: Some(self.instance.arms().iter().map(RawArm::from_model).collect()),
            adversary: Some(RawAdversary::from_config(&self.adversary)),
            algorithms: Some(
                self.algorithms
                    .iter()
                    .map(|a| RawAlgorithm {
                        kind: a.policy.kind.id().to_string(),
                        label: Some(a.label.clone()),
                        alpha: a.policy.kind.robust_mean().map(|_| a.policy.alpha),
                        sigma0: Some(a.policy.sigma0),
                        full_radius_bonus: a.policy.kind.robust_mean().map(|_| a.policy.full_radius_bonus),
                        ucb1_scale: a.policy.ucb1_scale,
                    })
                    .collect(),
            ),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn resolve(text: &str) -> Result<ExperimentConfig, ConfigError> {
        RawConfig::from_toml(text)?.resolve()
    }

    fn error_path(text: &str) -> String {
        match resolve(text) {
            Err(ConfigError::Invalid { path, .. }) => path,
            other => panic!("expected a validation error, got {other:?}"),
        }
    }

    #[test]
    fn empty_document_gives_the_binomial_preset() {
        let cfg = resolve("").unwrap();
        assert_eq!(cfg.num_arms(), 5);
        assert_eq!(cfg.horizon(), 1000);
        assert_eq!(cfg.trials, 10);
        assert_eq!(cfg.instance.means(), vec![9.0, 8.0, 8.0, 8.0, 8.0]);
        assert_eq!(cfg.instance.gaps(), vec![0.0, 1.0, 1.0, 1.0, 1.0]);
        assert_eq!(cfg.algorithms.len(), 7);
        assert_eq!(cfg.adversary.kind, AdversaryKind::None);
        assert_eq!(cfg.reward_range, RewardRange::new(0.0, 10.0).unwrap());
        for a in &cfg.algorithms {
            assert_eq!(a.policy.sigma0, 5.0);
            assert_eq!(a.policy.alpha, 0.0);
        }
    }

    #[test]
    fn epsilon_sets_alpha_and_the_default_adversary() {
        let cfg = resolve("epsilon = 0.05").unwrap();
        assert_eq!(cfg.adversary.kind, AdversaryKind::Bernoulli { epsilon: 0.05 });
        let t = cfg.algorithms.iter().find(|a| a.label == "tUCB").unwrap();
        assert_eq!(t.policy.alpha, 0.05);
        let u = cfg.algorithms.iter().find(|a| a.label == "UCB1").unwrap();
        assert_eq!(u.policy.alpha, 0.0);
    }

    #[test]
    fn validation_errors_name_the_key() {
        let doc = "[[algorithms]]\nkind = \"crucb-trimmed\"\nalpha = 0.6\n";
        assert_eq!(error_path(doc), "algorithms[0].alpha");
        let doc = "[[algorithms]]\nkind = \"ucb1\"\n[[algorithms]]\nkind = \"crucb-shorth\"\nalpha = 0.34\n";
        assert_eq!(error_path(doc), "algorithms[1].alpha");
        assert_eq!(error_path("horizon = -5"), "horizon");
        assert_eq!(error_path("trials = 0"), "trials");
        assert_eq!(error_path("epsilon = 1.5"), "epsilon");
        assert_eq!(error_path("k = 1"), "k");
        assert_eq!(error_path("[[algorithms]]\nkind = \"thompson\""), "algorithms[0].kind");
        assert_eq!(error_path("[[algorithms]]\nkind = \"exp3\"\n[[algorithms]]\nkind = \"EXP3\""), "algorithms[1].label");
        assert_eq!(error_path("[adversary]\nkind = \"sneaky\""), "adversary.kind");
        assert_eq!(error_path("[[arms]]\nfamily = \"binomial\"\np = 0.5\n[[arms]]\nfamily = \"binomial\"\ntrials = 10\np = 0.4"), "arms[0].trials");
        assert_eq!(error_path("k = 3\n[[arms]]\nfamily = \"bernoulli\"\np = 0.5\n[[arms]]\nfamily = \"bernoulli\"\np = 0.4"), "k");
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(matches!(resolve("horizont = 10"), Err(ConfigError::Parse(m)) if m.contains("horizont")));
        assert!(matches!(
            resolve("[[algorithms]]\nkind = \"ucb1\"\nbeta = 1"),
            Err(ConfigError::Parse(m)) if m.contains("beta")
        ));
    }

    #[test]
    fn gaussian_arms_need_explicit_ranges() {
        let arms = "[[arms]]\nfamily = \"gaussian\"\nmu = 1.0\nsigma = 1.0\n[[arms]]\nfamily = \"gaussian\"\nmu = 0.0\nsigma = 1.0\n";
        assert_eq!(error_path(arms), "reward_range");
        let with_range = format!("reward_range = [-5.0, 6.0]\nepsilon = 0.1\n{arms}");
        assert_eq!(error_path(&with_range), "adversary.optimal_range");
        let full = format!(
            "reward_range = [-5.0, 6.0]\nepsilon = 0.1\n[adversary]\noptimal_range = [-3.0, -2.0]\nsuboptimal_range = [2.0, 3.0]\n{arms}"
        );
        let cfg = resolve(&full).unwrap();
        assert_eq!(cfg.instance.max_sigma(), 1.0);
    }

    #[test]
    fn cluster_size_defaults_from_epsilon() {
        let cfg = resolve("epsilon = 0.1\n[adversary]\nkind = \"cluster\"").unwrap();
        assert_eq!(
            cfg.adversary.kind,
            AdversaryKind::Cluster { size: 20, scope: ClusterScope::PerArm }
        );
        let cfg = resolve("epsilon = 0.1\n[adversary]\nkind = \"cluster\"\ncluster_size = 3\ncluster_scope = \"global\"").unwrap();
        assert_eq!(cfg.adversary.kind, AdversaryKind::Cluster { size: 3, scope: ClusterScope::Global });
        assert_eq!(error_path("[adversary]\nkind = \"bernoulli\"\ncluster_size = 3"), "adversary");
    }

    #[test]
    fn explicit_form_resolves_to_the_same_config() {
        let doc = r#"
            horizon = 200
            trials = 3
            master_seed = 99
            epsilon = 0.1
            regret = "both"
            [adversary]
            kind = "cluster"
            budget = "enforced"
            suboptimal_range = [8.5, 10.0]
            [[arms]]
            family = "binomial"
            trials = 10
            p = 0.9
            [[arms]]
            family = "bernoulli"
            p = 0.3
            sigma_sg = 0.7
            [[algorithms]]
            kind = "crucb-shorth"
            label = "s"
            alpha = 0.2
            full_radius_bonus = true
            [[algorithms]]
            kind = "ucb1"
            ucb1_scale = 2.5
        "#;
        let cfg = resolve(doc).unwrap();
        let raw = cfg.to_raw();
        assert_eq!(raw.resolve().unwrap(), cfg);
        let json = serde_json::to_string(&raw).unwrap();
        let back: RawConfig = serde_json::from_str(&json).unwrap();
        assert_eq!(back.resolve().unwrap(), cfg);
        let toml_text = toml::to_string(&raw).unwrap();
        assert_eq!(resolve(&toml_text).unwrap(), cfg);
    }

    #[test]
    fn metadata_documents_are_accepted() {
        let cfg = resolve("trials = 2").unwrap();
        let meta = serde_json::json!({ "version": "x", "config": cfg.to_raw() }).to_string();
        assert_eq!(RawConfig::from_document(&meta).unwrap().resolve().unwrap(), cfg);
        assert!(RawConfig::from_document("{\"version\": 1}").is_err());
    }
}
