//! Finite-horizon tabular MDPs, policies, trajectories and exact dynamic-programming oracles.

use ndarray::{Array1, Array2, Array3, Array4, ArrayView1, ArrayView2, ArrayView3, Axis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on probability vectors summing to one.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Values closer than this are treated as tied when taking an argmax.
pub const TIE_TOLERANCE: f64 = 1e-12;

pub(crate) fn check_distribution(row: ArrayView1<'_, f64>, what: impl FnOnce() -> String) -> Result<()> {
    if row.iter().any(|p| !p.is_finite() || *p < 0.0) {
        return Err(Error::Distribution(format!("{} has a negative or non-finite entry", what())));
    }
    let sum = row.sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::Distribution(format!("{} sums to {sum}", what())));
    }
    Ok(())
}

/// Index of the largest value; ties (within [`TIE_TOLERANCE`]) go to the lowest index.
pub(crate) fn argmax_lowest<I: IntoIterator<Item = f64>>(values: I) -> usize {
    let mut best = 0;
    let mut best_value = f64::NEG_INFINITY;
    for (i, v) in values.into_iter().enumerate() {
        if v > best_value + TIE_TOLERANCE {
            best = i;
            best_value = v;
        }
    }
    best
}

/// Default per-step value caps, `H - h + 1` for steps `1..=H` and zero at `H + 1`.
pub fn default_vmax(horizon: usize) -> Array1<f64> {
    Array1::from_iter((0..=horizon).map(|h| (horizon - h) as f64))
}

/// How realized rewards are drawn from the expected reward table.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardNoise {
    /// `r = R(x, a)`.
    #[default]
    Deterministic,
    /// `r ~ Bernoulli(R(x, a))`.
    Bernoulli,
}

/// Episodic MDP with dense state and action indices.
///
/// `rewards` has shape `[H, X, A]`, `transitions` has shape `[H, X, A, X]`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabularMDP {
    rewards: Array3<f64>,
    transitions: Array4<f64>,
    initial: Array1<f64>,
    reward_noise: RewardNoise,
}

impl TabularMDP {
    pub fn new(rewards: Array3<f64>, transitions: Array4<f64>, initial: Array1<f64>) -> Result<Self> {
        let (h, x, a) = rewards.dim();
        if h == 0 || x == 0 || a == 0 {
            return Err(Error::Dimension(format!("reward table has an empty axis: {:?}", rewards.dim())));
        }
        if transitions.dim() != (h, x, a, x) {
            return Err(Error::Dimension(format!(
                "transition table {:?} does not match rewards {:?}",
                transitions.dim(),
                rewards.dim()
            )));
        }
        if initial.len() != x {
            return Err(Error::Dimension(format!("initial distribution has {} entries for {x} states", initial.len())));
        }
        if let Some(r) = rewards.iter().find(|r| !(0.0..=1.0).contains(*r)) {
            return Err(Error::InvalidParameter(format!("reward {r} outside [0, 1]")));
        }
        for ((step, state, action), _) in rewards.indexed_iter() {
            let row = transitions.slice(ndarray::s![step, state, action, ..]);
            check_distribution(row, || format!("P[{}][{state}][{action}]", step + 1))?;
        }
        check_distribution(initial.view(), || "initial distribution".to_string())?;
        Ok(Self { rewards, transitions, initial, reward_noise: RewardNoise::Deterministic })
    }

    pub fn with_reward_noise(mut self, noise: RewardNoise) -> Self {
        self.reward_noise = noise;
        self
    }

    pub fn horizon(&self) -> usize {
        self.rewards.dim().0
    }

    pub fn num_states(&self) -> usize {
        self.rewards.dim().1
    }

    pub fn num_actions(&self) -> usize {
        self.rewards.dim().2
    }

    pub fn rewards(&self) -> &Array3<f64> {
        &self.rewards
    }

    pub fn transitions(&self) -> &Array4<f64> {
        &self.transitions
    }

    pub fn initial_distribution(&self) -> &Array1<f64> {
        &self.initial
    }

    pub fn reward_noise(&self) -> RewardNoise {
        self.reward_noise
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.rewards.dim()
    }

    /// Policy value `<initial, V_pi[1]>`.
    pub fn policy_value(&self, pi: &Policy) -> Result<f64> {
        let table = evaluate_policy_exact(self, pi)?;
        Ok(table.initial_value(&self.initial))
    }

    fn check_policy(&self, pi: &Policy) -> Result<()> {
        if pi.shape() != self.shape() {
            return Err(Error::Dimension(format!(
                "policy shape {:?} does not match MDP shape {:?}",
                pi.shape(),
                self.shape()
            )));
        }
        Ok(())
    }
}

/// Per-step stochastic action kernels, shape `[H, X, A]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    probs: Array3<f64>,
}

impl Policy {
    pub fn new(probs: Array3<f64>) -> Result<Self> {
        let (h, x, a) = probs.dim();
        if h == 0 || x == 0 || a == 0 {
            return Err(Error::Dimension(format!("policy table has an empty axis: {:?}", probs.dim())));
        }
        for step in 0..h {
            for state in 0..x {
                let row = probs.slice(ndarray::s![step, state, ..]);
                check_distribution(row, || format!("pi[{}][{state}]", step + 1))?;
            }
        }
        Ok(Self { probs })
    }

    /// Same action distribution at every state and step.
    pub fn stationary(horizon: usize, num_states: usize, action_probs: &[f64]) -> Result<Self> {
        let row = ArrayView1::from(action_probs);
        let probs = Array3::from_shape_fn((horizon, num_states, action_probs.len()), |(_, _, a)| row[a]);
        Self::new(probs)
    }

    /// One-hot policy from an `[H, X]` table of action indices.
    pub fn deterministic(actions: &Array2<usize>, num_actions: usize) -> Result<Self> {
        let (h, x) = actions.dim();
        if let Some(a) = actions.iter().find(|a| **a >= num_actions) {
            return Err(Error::Dimension(format!("action {a} out of range for {num_actions} actions")));
        }
        let probs = Array3::from_shape_fn(
            (h, x, num_actions),
            |(step, state, a)| {
                if actions[[step, state]] == a {
                    1.0
                } else {
                    0.0
                }
            },
        );
        Self::new(probs)
    }

    pub fn horizon(&self) -> usize {
        self.probs.dim().0
    }

    pub fn num_states(&self) -> usize {
        self.probs.dim().1
    }

    pub fn num_actions(&self) -> usize {
        self.probs.dim().2
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.probs.dim()
    }

    pub fn probs(&self) -> &Array3<f64> {
        &self.probs
    }

    /// Kernel `pi^(step)` as an `[X, A]` view. `step` is 1-based.
    pub fn kernel(&self, step: usize) -> ArrayView2<'_, f64> {
        self.probs.index_axis(Axis(0), step - 1)
    }

    /// `pi^(step)(. | state)`. `step` is 1-based.
    pub fn action_probs(&self, step: usize, state: usize) -> ArrayView1<'_, f64> {
        self.probs.slice(ndarray::s![step - 1, state, ..])
    }

    pub fn is_deterministic(&self) -> bool {
        self.probs.iter().all(|p| *p == 0.0 || *p == 1.0)
    }

    /// `sum_a pi^(step)(a|state) * per_action[a]`, 0-based step index.
    pub(crate) fn mix(&self, step_idx: usize, state: usize, per_action: ArrayView1<'_, f64>) -> f64 {
        self.probs.slice(ndarray::s![step_idx, state, ..]).dot(&per_action)
    }
}

/// `pi~_step = (pi_b^(1), ..., pi_b^(step-1), pi^(step), ..., pi^(H))` for `step` in `1..=H+1`.
pub fn splice_policies(pi_b: &Policy, pi: &Policy, step: usize) -> Result<Policy> {
    if pi_b.shape() != pi.shape() {
        return Err(Error::Dimension(format!(
            "cannot splice policies of shapes {:?} and {:?}",
            pi_b.shape(),
            pi.shape()
        )));
    }
    let horizon = pi.horizon();
    if step == 0 || step > horizon + 1 {
        return Err(Error::StepOutOfRange { step, max: horizon + 1 });
    }
    let mut probs = pi.probs.clone();
    for h in 0..step - 1 {
        probs.index_axis_mut(Axis(0), h).assign(&pi_b.probs.index_axis(Axis(0), h));
    }
    Ok(Policy { probs })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub state: usize,
    pub action: usize,
    pub reward: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub steps: Vec<StepRecord>,
}

/// Offline trajectories sampled from `D(pi_b)`, together with `pi_b` itself.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    trajectories: Vec<Trajectory>,
    behavior: Policy,
    seed: u64,
}

impl Dataset {
    pub fn new(trajectories: Vec<Trajectory>, behavior: Policy, seed: u64) -> Result<Self> {
        let (h, x, a) = behavior.shape();
        for (t, traj) in trajectories.iter().enumerate() {
            if traj.steps.len() != h {
                return Err(Error::Dimension(format!("trajectory {t} has {} steps, horizon is {h}", traj.steps.len())));
            }
            if let Some(bad) = traj.steps.iter().find(|s| s.state >= x || s.action >= a) {
                return Err(Error::Dimension(format!(
                    "trajectory {t} visits (state {}, action {}) outside {x} x {a}",
                    bad.state, bad.action
                )));
            }
        }
        Ok(Self { trajectories, behavior, seed })
    }

    pub fn trajectories(&self) -> &[Trajectory] {
        &self.trajectories
    }

    pub fn behavior(&self) -> &Policy {
        &self.behavior
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.trajectories.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trajectories.is_empty()
    }

    pub fn horizon(&self) -> usize {
        self.behavior.horizon()
    }

    pub fn num_states(&self) -> usize {
        self.behavior.num_states()
    }

    pub fn num_actions(&self) -> usize {
        self.behavior.num_actions()
    }

    /// States `x_t^(step)` for every trajectory, 1-based step.
    pub fn states_at(&self, step: usize) -> impl Iterator<Item = usize> + '_ {
        self.trajectories.iter().map(move |t| t.steps[step - 1].state)
    }

    /// Splits off the last `round(fraction * T)` trajectories as a holdout set.
    pub fn split_holdout(&self, fraction: f64) -> Result<(Dataset, Dataset)> {
        if !(fraction > 0.0 && fraction < 1.0) {
            return Err(Error::InvalidParameter(format!("holdout fraction {fraction} not in (0, 1)")));
        }
        let holdout = (fraction * self.len() as f64).round() as usize;
        if holdout == 0 || holdout == self.len() {
            return Err(Error::InvalidParameter(format!(
                "holdout fraction {fraction} leaves an empty split of {} trajectories",
                self.len()
            )));
        }
        let cut = self.len() - holdout;
        let fit = Dataset { trajectories: self.trajectories[..cut].to_vec(), ..self.clone_meta() };
        let rest = Dataset { trajectories: self.trajectories[cut..].to_vec(), ..self.clone_meta() };
        Ok((fit, rest))
    }

    fn clone_meta(&self) -> Dataset {
        Dataset { trajectories: Vec::new(), behavior: self.behavior.clone(), seed: self.seed }
    }
}

/// `V[h][x]` for `h = 1..=H+1` (row `h - 1`), with the terminal row identically zero.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTable {
    values: Array2<f64>,
    vmax: Array1<f64>,
}

impl ValueTable {
    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn vmax(&self) -> &Array1<f64> {
        &self.vmax
    }

    /// `V[step]` as a vector over states, 1-based.
    pub fn at_step(&self, step: usize) -> ArrayView1<'_, f64> {
        self.values.row(step - 1)
    }

    pub fn initial_value(&self, initial: &Array1<f64>) -> f64 {
        self.values.row(0).dot(initial)
    }
}

/// `out[x, a] = sum_x' rows[x, a, x'] * weights[x']`.
pub(crate) fn contract_last(rows: ArrayView3<'_, f64>, weights: ArrayView1<'_, f64>) -> Array2<f64> {
    let (x, a, _) = rows.dim();
    Array2::from_shape_fn((x, a), |(s, b)| rows.slice(ndarray::s![s, b, ..]).dot(&weights))
}

/// `sum_x' V[x'] P(x'|x,a)` for every `(x, a)` at a 0-based step.
pub(crate) fn expected_next(transitions: &Array4<f64>, step_idx: usize, next: ArrayView1<'_, f64>) -> Array2<f64> {
    contract_last(transitions.index_axis(Axis(0), step_idx), next)
}

/// Backward evaluation `V[h] = R(., pi) + P(.|., pi) V[h+1]`, starting from `V[H+1] = 0`.
pub fn evaluate_policy_exact(mdp: &TabularMDP, pi: &Policy) -> Result<ValueTable> {
    mdp.check_policy(pi)?;
    let (horizon, num_states, _) = mdp.shape();
    let mut values = Array2::zeros((horizon + 1, num_states));
    for h in (0..horizon).rev() {
        let q = &mdp.rewards.index_axis(Axis(0), h) + &expected_next(&mdp.transitions, h, values.row(h + 1));
        for x in 0..num_states {
            values[[h, x]] = pi.mix(h, x, q.row(x));
        }
    }
    Ok(ValueTable { values, vmax: default_vmax(horizon) })
}

/// Exact value iteration; returns the optimal deterministic policy and its values.
pub fn optimal_policy(mdp: &TabularMDP) -> (Policy, ValueTable) {
    let (horizon, num_states, num_actions) = mdp.shape();
    let mut values = Array2::zeros((horizon + 1, num_states));
    let mut actions = Array2::zeros((horizon, num_states));
    for h in (0..horizon).rev() {
        let q = &mdp.rewards.index_axis(Axis(0), h) + &expected_next(&mdp.transitions, h, values.row(h + 1));
        for x in 0..num_states {
            let best = argmax_lowest(q.row(x).iter().copied());
            actions[[h, x]] = best;
            values[[h, x]] = q[[x, best]];
        }
    }
    let policy = Policy::deterministic(&actions, num_actions).expect("argmax actions are in range");
    (policy, ValueTable { values, vmax: default_vmax(horizon) })
}

/// Marginal state distribution `d[h][x] = Pr(x^(h) = x)` under `D(pi)`, shape `[H, X]`.
pub fn state_occupancy(mdp: &TabularMDP, pi: &Policy) -> Result<Array2<f64>> {
    mdp.check_policy(pi)?;
    let (horizon, num_states, _) = mdp.shape();
    let mut occupancy = Array2::zeros((horizon, num_states));
    occupancy.row_mut(0).assign(&mdp.initial);
    for h in 0..horizon - 1 {
        let mut next = Array1::zeros(num_states);
        for x in 0..num_states {
            let mass = occupancy[[h, x]];
            if mass == 0.0 {
                continue;
            }
            for (a, p) in pi.probs.slice(ndarray::s![h, x, ..]).iter().enumerate() {
                if *p == 0.0 {
                    continue;
                }
                next.scaled_add(mass * p, &mdp.transitions.slice(ndarray::s![h, x, a, ..]));
            }
        }
        occupancy.row_mut(h + 1).assign(&next);
    }
    Ok(occupancy)
}

/// Ground-truth treatment effect `alpha^(step)_pi = E_{d_b[step]}[V_{pi~_step} - V_{pi~_{step+1}}]`.
pub fn alpha_true(mdp: &TabularMDP, pi: &Policy, pi_b: &Policy, step: usize) -> Result<f64> {
    let horizon = mdp.horizon();
    if step == 0 || step > horizon {
        return Err(Error::StepOutOfRange { step, max: horizon });
    }
    mdp.check_policy(pi)?;
    mdp.check_policy(pi_b)?;
    let deviate = evaluate_policy_exact(mdp, &splice_policies(pi_b, pi, step)?)?;
    let follow = evaluate_policy_exact(mdp, &splice_policies(pi_b, pi, step + 1)?)?;
    let occupancy = state_occupancy(mdp, pi_b)?;
    let diff = &deviate.at_step(step) - &follow.at_step(step);
    Ok(occupancy.row(step - 1).dot(&diff))
}

fn sample_index<R: Rng + ?Sized>(rng: &mut R, probs: ArrayView1<'_, f64>) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, p) in probs.iter().enumerate() {
        if *p > 0.0 {
            acc += p;
            last_positive = i;
            if u < acc {
                return i;
            }
        }
    }
    last_positive
}

/// Samples `episodes` independent trajectories of `pi` from a ChaCha8 stream seeded with `seed`.
pub fn sample_trajectories(mdp: &TabularMDP, pi: &Policy, episodes: usize, seed: u64) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let trajectories = sample_with_rng(mdp, pi, episodes, &mut rng)?;
    Dataset::new(trajectories, pi.clone(), seed)
}

/// Like [`sample_trajectories`] but drawing from a caller-owned generator.
pub fn sample_with_rng<R: Rng + ?Sized>(
    mdp: &TabularMDP,
    pi: &Policy,
    episodes: usize,
    rng: &mut R,
) -> Result<Vec<Trajectory>> {
    mdp.check_policy(pi)?;
    if episodes == 0 {
        return Err(Error::InvalidParameter("episode count must be at least 1".into()));
    }
    let horizon = mdp.horizon();
    let mut out = Vec::with_capacity(episodes);
    for _ in 0..episodes {
        let mut steps = Vec::with_capacity(horizon);
        let mut state = sample_index(rng, mdp.initial.view());
        for h in 0..horizon {
            let action = sample_index(rng, pi.probs.slice(ndarray::s![h, state, ..]));
            let expected = mdp.rewards[[h, state, action]];
            let reward = match mdp.reward_noise {
                RewardNoise::Deterministic => expected,
                RewardNoise::Bernoulli => {
                    if rng.random::<f64>() < expected {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
            steps.push(StepRecord { state, action, reward });
            if h + 1 < horizon {
                state = sample_index(rng, mdp.transitions.slice(ndarray::s![h, state, action, ..]));
            }
        }
        out.push(Trajectory { steps });
    }
    Ok(out)
}
