//! Selective uncertainty propagation for finite-horizon tabular offline RL.
//!
//! The crate is organised bottom-up:
//!
//! - [`mdp`]: tabular MDPs, policies, trajectories and exact dynamic-programming oracles.
//! - [`environments`]: the ChainBandit and GridWorld benchmarks plus their policy families.
//! - [`estimation`]: tabular model fitting, count-based bonuses and the induced shift model.
//! - [`synthesis`]: PVI, SPVI and PSL learners and pessimistic/optimistic policy evaluation.
//! - [`confidence`]: standard, selective and shift-weighted interval construction for the
//!   per-step treatment effect of deviating from the behavioral policy.
//! - [`harness`]: experiment configuration, seeding and CSV output used by the CLI.
//!
//! Steps are 1-based (`1..=H`) everywhere in the public API; arrays are indexed from zero.

pub mod confidence;
pub mod environments;
pub mod error;
pub mod estimation;
pub mod format;
pub mod harness;
pub mod mdp;
pub mod synthesis;

pub use confidence::{
    immediate_effect, less_empirical_estimate, selective_ci, selective_ci_weighted, standard_ci, standard_ci_weighted,
    state_weights, theorem1_estimate, CiMethod, IntervalEstimate, NextStepValues, RadiusTerms, Theorem1Estimate,
    Theorem1Inputs,
};
pub use environments::{
    chain_bandit, chainbandit_behavior_policy, chainbandit_eval_policy, grid_world, gridworld_behavior_policy,
    gridworld_eval_policy, ChainBanditSpec, Environment, GridWorldSpec, StartDistribution,
};
pub use error::{Error, Result};
pub use estimation::{
    compute_bonuses, fit_tabular_model, induced_shift, shift_under_policy, BonusTable, ModelEstimate, ShiftEstimate,
};
pub use mdp::{
    alpha_true, evaluate_policy_exact, optimal_policy, sample_trajectories, splice_policies, state_occupancy, Dataset,
    Policy, RewardNoise, StepRecord, TabularMDP, Trajectory, ValueTable,
};
pub use synthesis::{evaluate_policy_pess_opt, psl, pvi, spvi, LearnedPolicy, ValueTriple};
