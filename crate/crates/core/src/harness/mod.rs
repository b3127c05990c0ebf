//! Reference experiments: configuration, seeding, execution and CSV persistence.
//!
//! Each `(seed index, grid point)` pair is an independent work item with its own child seed
//!
//! ```text
//! child = splitmix64(master ^ splitmix64((seed_index << 32) | grid_index))
//! ```
//!
//! so results do not depend on scheduling. Work items run on the rayon pool and rows are
//! assembled in `(seed, grid value, method)` order.

mod config;
mod output;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::{linear_grid, EnvironmentConfig, ExperimentConfig, ExperimentId, Task, Theorem1Config};
pub use output::{emit_csv, parse_csv, read_csv, write_csv, CSV_HEADER};

use crate::confidence::{
    immediate_effect, selective_ci, standard_ci, state_weights, theorem1_estimate, IntervalEstimate, Theorem1Inputs,
};
use crate::error::{Error, Result};
use crate::estimation::{compute_bonuses, fit_tabular_model, induced_shift};
use crate::mdp::{alpha_true, sample_trajectories, Dataset, Policy, TabularMDP};
use crate::synthesis::{evaluate_policy_pess_opt, psl, pvi, spvi};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Standard,
    Selective,
    Theorem1,
    Spvi,
    Pvi,
    Psl,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Standard => "standard",
            Method::Selective => "selective",
            Method::Theorem1 => "theorem1",
            Method::Spvi => "spvi",
            Method::Pvi => "pvi",
            Method::Psl => "psl",
        }
    }

    pub fn is_interval(&self) -> bool {
        matches!(self, Method::Standard | Method::Selective | Method::Theorem1)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        [Method::Standard, Method::Selective, Method::Theorem1, Method::Spvi, Method::Pvi, Method::Psl]
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::Format(format!("unknown method {s:?}")))
    }
}

/// One CSV line. Interval rows fill `step`, `lambda`, the bounds and `alpha_true`;
/// learning rows fill `policy_value`. `episodes` is the dataset size `T` in both.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub experiment: ExperimentId,
    pub seed: usize,
    pub method: Method,
    pub step: Option<usize>,
    pub lambda: Option<f64>,
    pub episodes: usize,
    pub lower: Option<f64>,
    pub point: Option<f64>,
    pub upper: Option<f64>,
    pub alpha_true: Option<f64>,
    pub policy_value: Option<f64>,
}

impl ResultRow {
    fn interval(
        config: &ExperimentConfig,
        seed: usize,
        lambda: f64,
        ci: &IntervalEstimate,
        method: Method,
        alpha: f64,
    ) -> Self {
        Self {
            experiment: config.experiment,
            seed,
            method,
            step: Some(ci.step),
            lambda: Some(lambda),
            episodes: config.episodes,
            lower: Some(ci.lower),
            point: Some(ci.point),
            upper: Some(ci.upper),
            alpha_true: Some(alpha),
            policy_value: None,
        }
    }

    fn learning(config: &ExperimentConfig, seed: usize, episodes: usize, method: Method, value: f64) -> Self {
        Self {
            experiment: config.experiment,
            seed,
            method,
            step: None,
            lambda: None,
            episodes,
            lower: None,
            point: None,
            upper: None,
            alpha_true: None,
            policy_value: Some(value),
        }
    }

    pub fn width(&self) -> Option<f64> {
        Some(self.upper? - self.lower?)
    }

    pub fn covers_truth(&self) -> Option<bool> {
        let alpha = self.alpha_true?;
        Some(self.lower? <= alpha && alpha <= self.upper?)
    }
}

pub fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn child_seed(master: u64, seed_index: usize, grid_index: usize) -> u64 {
    splitmix64(master ^ splitmix64(((seed_index as u64) << 32) | grid_index as u64))
}

/// Runs the configured experiment and returns its rows in output order.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    match config.task {
        Task::Ci => run_ci_experiment(config),
        Task::Learn => run_learning_experiment(config),
    }
}

struct Setup {
    mdp: TabularMDP,
    pi_b: Policy,
}

fn setup(config: &ExperimentConfig) -> Result<Setup> {
    config.validate()?;
    Ok(Setup { mdp: config.environment.build()?.mdp, pi_b: config.behavior_policy()? })
}

fn work_items(seeds: usize, grid: usize) -> Vec<(usize, usize)> {
    (0..seeds).flat_map(|s| (0..grid).map(move |g| (s, g))).collect()
}

fn collect_rows(chunks: Result<Vec<Vec<ResultRow>>>) -> Result<Vec<ResultRow>> {
    Ok(chunks?.into_iter().flatten().collect())
}

pub fn run_ci_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if config.task != Task::Ci {
        return Err(Error::Config(format!("{} is not an interval experiment", config.experiment)));
    }
    let Setup { mdp, pi_b } = setup(config)?;
    let fraction = config.effective_holdout_fraction();
    let chunks = work_items(config.seeds, config.lambdas.len())
        .into_par_iter()
        .map(|(seed, g)| {
            let lambda = config.lambdas[g];
            let pi = config.environment.eval_policy(lambda)?;
            let data = sample_trajectories(&mdp, &pi_b, config.episodes, child_seed(config.master_seed, seed, g))?;
            let (fit, holdout) = if fraction > 0.0 { data.split_holdout(fraction)? } else { (data.clone(), data) };
            let alpha = alpha_true(&mdp, &pi, &pi_b, config.step)?;
            config
                .methods
                .iter()
                .map(|m| {
                    let ci = interval_for(config, *m, &fit, &holdout, &pi, &pi_b)?;
                    Ok(ResultRow::interval(config, seed, lambda, &ci, *m, alpha))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>();
    collect_rows(chunks)
}

fn interval_for(
    config: &ExperimentConfig,
    method: Method,
    fit: &Dataset,
    holdout: &Dataset,
    pi: &Policy,
    pi_b: &Policy,
) -> Result<IntervalEstimate> {
    let model = fit_tabular_model(fit, config.pooled, config.delta)?;
    let bonuses = compute_bonuses(&model, config.beta)?;
    let h = config.step;
    match method {
        Method::Standard => standard_ci(&model, &bonuses, pi, pi_b, h, holdout),
        Method::Selective => selective_ci(&model, &bonuses, pi, pi_b, h, holdout),
        Method::Theorem1 => {
            let t1 = &config.theorem1;
            let fit_weights = state_weights(fit, h)?;
            let theta = immediate_effect(&model, fit_weights.view(), pi, pi_b, h)?;
            let triple = evaluate_policy_pess_opt(&model, &bonuses, pi)?;
            let shift = induced_shift(&model, pi_b)?.with_kappa(t1.kappa_delta)?;
            let inputs =
                Theorem1Inputs::from_estimates(theta, t1.kappa_theta, &triple, &shift, h, config.delta, t1.delta_in)?;
            Ok(theorem1_estimate(&inputs, holdout, pi, h)?.interval)
        }
        other => Err(Error::Config(format!("{other} is not an interval method"))),
    }
}

pub fn run_learning_experiment(config: &ExperimentConfig) -> Result<Vec<ResultRow>> {
    if config.task != Task::Learn {
        return Err(Error::Config(format!("{} is not a learning experiment", config.experiment)));
    }
    let Setup { mdp, pi_b } = setup(config)?;
    let chunks = work_items(config.seeds, config.episode_grid.len())
        .into_par_iter()
        .map(|(seed, g)| {
            let episodes = config.episode_grid[g];
            let data = sample_trajectories(&mdp, &pi_b, episodes, child_seed(config.master_seed, seed, g))?;
            let model = fit_tabular_model(&data, config.pooled, config.delta)?;
            let bonuses = compute_bonuses(&model, config.beta)?;
            config
                .methods
                .iter()
                .map(|m| {
                    let learned = match m {
                        Method::Spvi => spvi(&model, &bonuses, &pi_b)?,
                        Method::Pvi => pvi(&model, &bonuses)?,
                        Method::Psl => psl(&model, &bonuses)?,
                        other => return Err(Error::Config(format!("{other} is not a learning method"))),
                    };
                    Ok(ResultRow::learning(config, seed, episodes, *m, mdp.policy_value(&learned.policy)?))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>();
    collect_rows(chunks)
}
