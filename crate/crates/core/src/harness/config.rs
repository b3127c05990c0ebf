//! Experiment configuration: presets for the four reference experiments plus TOML overrides.
//!
//! A config file names an experiment and overrides any preset field:
//!
//! ```toml
//! experiment = "ci-chainbandit"
//! seeds = 4
//! lambdas = [0.0, 0.5, 0.8]
//!
//! [environment]
//! kind = "chain-bandit"
//! length = 4
//! ```
//!
//! `experiment = "custom"` additionally requires `task` and `environment`.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::environments::{
    chain_bandit, chainbandit_behavior_policy, chainbandit_eval_policy, grid_world, gridworld_behavior_policy,
    gridworld_eval_policy, ChainBanditSpec, Environment, GridWorldSpec,
};
use crate::error::{Error, Result};
use crate::harness::Method;
use crate::mdp::Policy;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentId {
    CiChainbandit,
    LearnChainbandit,
    CiGridworld,
    LearnGridworld,
    Custom,
}

impl ExperimentId {
    pub const PRESETS: [ExperimentId; 4] = [
        ExperimentId::CiChainbandit,
        ExperimentId::LearnChainbandit,
        ExperimentId::CiGridworld,
        ExperimentId::LearnGridworld,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            ExperimentId::CiChainbandit => "ci-chainbandit",
            ExperimentId::LearnChainbandit => "learn-chainbandit",
            ExperimentId::CiGridworld => "ci-gridworld",
            ExperimentId::LearnGridworld => "learn-gridworld",
            ExperimentId::Custom => "custom",
        }
    }
}

impl fmt::Display for ExperimentId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ExperimentId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Self::CiChainbandit, Self::LearnChainbandit, Self::CiGridworld, Self::LearnGridworld, Self::Custom]
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Config(format!("unknown experiment {s:?}")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Task {
    Ci,
    Learn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum EnvironmentConfig {
    ChainBandit(ChainBanditSpec),
    GridWorld(GridWorldSpec),
}

impl EnvironmentConfig {
    pub fn build(&self) -> Result<Environment> {
        match self {
            EnvironmentConfig::ChainBandit(spec) => chain_bandit(spec),
            EnvironmentConfig::GridWorld(spec) => grid_world(spec),
        }
    }

    pub fn default_behavior(&self) -> Result<Policy> {
        match self {
            EnvironmentConfig::ChainBandit(spec) => chainbandit_behavior_policy(spec),
            EnvironmentConfig::GridWorld(spec) => gridworld_behavior_policy(spec),
        }
    }

    /// Member `lambda` of the environment's evaluation-policy family.
    pub fn eval_policy(&self, lambda: f64) -> Result<Policy> {
        match self {
            EnvironmentConfig::ChainBandit(spec) => chainbandit_eval_policy(spec, lambda),
            EnvironmentConfig::GridWorld(spec) => gridworld_eval_policy(spec, lambda),
        }
    }
}

/// Inputs the harness cannot estimate for the shift-weighted combiner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Theorem1Config {
    pub kappa_theta: f64,
    pub kappa_delta: f64,
    pub delta_in: f64,
}

impl Default for Theorem1Config {
    fn default() -> Self {
        Self { kappa_theta: 0.05, kappa_delta: 0.05, delta_in: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub experiment: ExperimentId,
    pub task: Task,
    pub environment: EnvironmentConfig,
    /// Stationary behavioral action probabilities; the environment default when absent.
    pub behavior: Option<Vec<f64>>,
    /// Evaluation-policy grid for interval experiments.
    pub lambdas: Vec<f64>,
    /// Episode-count grid for learning experiments.
    pub episode_grid: Vec<usize>,
    /// Episodes per dataset for interval experiments.
    pub episodes: usize,
    /// Step `h` of the interval target.
    pub step: usize,
    pub delta: f64,
    pub beta: f64,
    pub seeds: usize,
    pub master_seed: u64,
    /// Holdout share of each dataset; 0 reuses the fitting data. Defaults to 0.5 when the
    /// combiner method is requested, else 0.
    pub holdout_fraction: Option<f64>,
    pub pooled: bool,
    pub methods: Vec<Method>,
    pub theorem1: Theorem1Config,
    pub out: Option<PathBuf>,
}

/// Optional-everything mirror of [`ExperimentConfig`] as read from a file.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigFile {
    experiment: Option<ExperimentId>,
    task: Option<Task>,
    environment: Option<EnvironmentConfig>,
    behavior: Option<Vec<f64>>,
    lambdas: Option<Vec<f64>>,
    episode_grid: Option<Vec<usize>>,
    episodes: Option<usize>,
    step: Option<usize>,
    delta: Option<f64>,
    beta: Option<f64>,
    seeds: Option<usize>,
    master_seed: Option<u64>,
    holdout_fraction: Option<f64>,
    pooled: Option<bool>,
    methods: Option<Vec<Method>>,
    theorem1: Option<Theorem1Config>,
    out: Option<PathBuf>,
}

/// `n + 1` evenly spaced points from `lo` to `hi`, computed as `lo + i (hi - lo) / n`.
pub fn linear_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..=n).map(|i| lo + (hi - lo) * i as f64 / n as f64).collect()
}

const LEARNING_GRID: [usize; 9] = [50, 100, 200, 500, 1000, 2000, 5000, 10000, 20000];

impl ExperimentConfig {
    /// Defaults for one of the four reference experiments.
    pub fn preset(id: ExperimentId) -> Result<Self> {
        let chain = EnvironmentConfig::ChainBandit(ChainBanditSpec::default());
        let grid = EnvironmentConfig::GridWorld(GridWorldSpec::default());
        let base = |task, environment, seeds, episodes, lambdas| ExperimentConfig {
            experiment: id,
            task,
            environment,
            behavior: None,
            lambdas,
            episode_grid: LEARNING_GRID.to_vec(),
            episodes,
            step: 2,
            delta: 0.05,
            beta: 1.0,
            seeds,
            master_seed: 0,
            holdout_fraction: None,
            pooled: true,
            methods: match task {
                Task::Ci => vec![Method::Standard, Method::Selective],
                Task::Learn => vec![Method::Spvi, Method::Pvi, Method::Psl],
            },
            theorem1: Theorem1Config::default(),
            out: None,
        };
        Ok(match id {
            ExperimentId::CiChainbandit => base(Task::Ci, chain, 10, 10_000, linear_grid(0.0, 1.0, 10)),
            ExperimentId::LearnChainbandit => base(Task::Learn, chain, 10, 10_000, linear_grid(0.0, 1.0, 10)),
            ExperimentId::CiGridworld => base(Task::Ci, grid, 5, 2000, linear_grid(0.0, 0.55, 11)),
            ExperimentId::LearnGridworld => base(Task::Learn, grid, 5, 2000, linear_grid(0.0, 0.55, 11)),
            ExperimentId::Custom => {
                return Err(Error::Config("custom experiments need a config file with task and environment".into()))
            }
        })
    }

    pub fn from_toml_str(text: &str) -> Result<Self> {
        let file: ConfigFile = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        let experiment = file.experiment.unwrap_or(ExperimentId::Custom);
        let mut config = match experiment {
            ExperimentId::Custom => {
                let task = file.task.ok_or_else(|| Error::Config("custom experiment needs `task`".into()))?;
                let environment = file
                    .environment
                    .clone()
                    .ok_or_else(|| Error::Config("custom experiment needs `[environment]`".into()))?;
                let template = match task {
                    Task::Ci => ExperimentId::CiChainbandit,
                    Task::Learn => ExperimentId::LearnChainbandit,
                };
                let mut config = Self::preset(template)?;
                config.experiment = ExperimentId::Custom;
                config.environment = environment;
                config
            }
            id => Self::preset(id)?,
        };
        if let Some(task) = file.task {
            if task != config.task {
                return Err(Error::Config(format!("experiment {experiment} does not run task {task:?}")));
            }
        }
        macro_rules! apply {
            ($($field:ident),*) => {$( if let Some(v) = file.$field { config.$field = v; } )*};
        }
        apply!(
            environment,
            lambdas,
            episode_grid,
            episodes,
            step,
            delta,
            beta,
            seeds,
            master_seed,
            pooled,
            methods,
            theorem1
        );
        if file.behavior.is_some() {
            config.behavior = file.behavior;
        }
        if file.holdout_fraction.is_some() {
            config.holdout_fraction = file.holdout_fraction;
        }
        if file.out.is_some() {
            config.out = file.out;
        }
        config.validate()?;
        Ok(config)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text =
            std::fs::read_to_string(path).map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn behavior_policy(&self) -> Result<Policy> {
        match &self.behavior {
            None => self.environment.default_behavior(),
            Some(probs) => {
                let env = self.environment.build()?;
                Policy::stationary(env.mdp.horizon(), env.mdp.num_states(), probs)
            }
        }
    }

    pub fn effective_holdout_fraction(&self) -> f64 {
        self.holdout_fraction.unwrap_or(if self.methods.contains(&Method::Theorem1) { 0.5 } else { 0.0 })
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let env = self.environment.build().map_err(|e| Error::Config(format!("environment: {e}")))?;
        self.behavior_policy().map_err(|e| Error::Config(format!("behavior policy: {e}")))?;
        if self.seeds == 0 {
            return bad("seeds must be at least 1".into());
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad(format!("delta {} not in (0, 1)", self.delta));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return bad(format!("beta {} must be nonnegative", self.beta));
        }
        if self.methods.is_empty() {
            return bad("methods must be nonempty".into());
        }
        match self.task {
            Task::Ci => {
                if self.lambdas.is_empty() {
                    return bad("lambda grid must be nonempty".into());
                }
                if self.episodes == 0 {
                    return bad("episodes must be at least 1".into());
                }
                if self.step == 0 || self.step > env.mdp.horizon() {
                    return bad(format!("step {} outside 1..={}", self.step, env.mdp.horizon()));
                }
                for lambda in &self.lambdas {
                    self.environment.eval_policy(*lambda).map_err(|e| Error::Config(format!("lambda: {e}")))?;
                }
                if let Some(m) = self.methods.iter().find(|m| !m.is_interval()) {
                    return bad(format!("method {m} is not an interval method"));
                }
                let fraction = self.effective_holdout_fraction();
                if !(0.0..1.0).contains(&fraction) {
                    return bad(format!("holdout fraction {fraction} not in [0, 1)"));
                }
                if fraction > 0.0 {
                    let held = (fraction * self.episodes as f64).round() as usize;
                    if held == 0 || held == self.episodes {
                        return bad(format!(
                            "holdout fraction {fraction} leaves an empty split of {} episodes",
                            self.episodes
                        ));
                    }
                } else if self.methods.contains(&Method::Theorem1) {
                    return bad("the theorem1 method needs a positive holdout fraction".into());
                }
                let t1 = &self.theorem1;
                if t1.kappa_theta < 0.0 || t1.kappa_delta < 0.0 || !(0.0..1.0).contains(&t1.delta_in) {
                    return bad(format!("invalid theorem1 settings {t1:?}"));
                }
            }
            Task::Learn => {
                if self.episode_grid.is_empty() {
                    return bad("episode grid must be nonempty".into());
                }
                if self.episode_grid.contains(&0) {
                    return bad("episode counts must be at least 1".into());
                }
                if let Some(m) = self.methods.iter().find(|m| m.is_interval()) {
                    return bad(format!("method {m} is not a learning method"));
                }
            }
        }
        Ok(())
    }
}
