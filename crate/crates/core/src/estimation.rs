//! Tabular reward/transition models fitted from offline data, count-based bonuses and the
//! induced shift model.

use ndarray::{s, Array1, Array3, Array4, ArrayView1, Axis, Zip};

use crate::error::{Error, Result};
use crate::mdp::{check_distribution, default_vmax, Dataset, Policy, TabularMDP};

/// Fitted model, always stored per step. A pooled fit repeats the same tables at every step.
///
/// `counts[h][x][a]` is the number of visits used for rewards and bonuses;
/// `transition_counts[h][x][a]` the number of observed successors.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelEstimate {
    rewards: Array3<f64>,
    transitions: Array4<f64>,
    counts: Array3<u64>,
    transition_counts: Array3<u64>,
    pooled: bool,
    delta: f64,
}

impl ModelEstimate {
    /// Assembles a model from explicit tables, validating shapes and rows.
    pub fn from_parts(rewards: Array3<f64>, transitions: Array4<f64>, counts: Array3<u64>, delta: f64) -> Result<Self> {
        let (h, x, a) = rewards.dim();
        if transitions.dim() != (h, x, a, x) || counts.dim() != (h, x, a) {
            return Err(Error::Dimension(format!(
                "model tables disagree: rewards {:?}, transitions {:?}, counts {:?}",
                rewards.dim(),
                transitions.dim(),
                counts.dim()
            )));
        }
        check_delta(delta)?;
        for ((step, state, action), r) in rewards.indexed_iter() {
            if !(0.0..=1.0).contains(r) {
                return Err(Error::InvalidParameter(format!("R_hat {r} outside [0, 1]")));
            }
            check_distribution(transitions.slice(s![step, state, action, ..]), || {
                format!("P_hat[{}][{state}][{action}]", step + 1)
            })?;
        }
        let transition_counts = counts.clone();
        Ok(Self { rewards, transitions, counts, transition_counts, pooled: false, delta })
    }

    /// Reassembles a fitted model, e.g. after deserialisation.
    pub(crate) fn restore(
        rewards: Array3<f64>,
        transitions: Array4<f64>,
        counts: Array3<u64>,
        transition_counts: Array3<u64>,
        pooled: bool,
        delta: f64,
    ) -> Result<Self> {
        if transition_counts.dim() != counts.dim() {
            return Err(Error::Dimension(format!(
                "transition counts {:?} do not match counts {:?}",
                transition_counts.dim(),
                counts.dim()
            )));
        }
        let model = Self::from_parts(rewards, transitions, counts, delta)?;
        Ok(Self { transition_counts, pooled, ..model })
    }

    /// The true model of `mdp` with zero counts.
    pub fn exact(mdp: &TabularMDP, delta: f64) -> Result<Self> {
        let (h, x, a) = mdp.shape();
        Self::from_parts(mdp.rewards().clone(), mdp.transitions().clone(), Array3::zeros((h, x, a)), delta)
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

    pub fn shape(&self) -> (usize, usize, usize) {
        self.rewards.dim()
    }

    pub fn rewards(&self) -> &Array3<f64> {
        &self.rewards
    }

    pub fn transitions(&self) -> &Array4<f64> {
        &self.transitions
    }

    pub fn counts(&self) -> &Array3<u64> {
        &self.counts
    }

    pub fn transition_counts(&self) -> &Array3<u64> {
        &self.transition_counts
    }

    pub fn is_pooled(&self) -> bool {
        self.pooled
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn vmax(&self) -> Array1<f64> {
        default_vmax(self.horizon())
    }

    pub(crate) fn check_policy(&self, pi: &Policy) -> Result<()> {
        if pi.shape() != self.shape() {
            return Err(Error::Dimension(format!(
                "policy shape {:?} does not match model shape {:?}",
                pi.shape(),
                self.shape()
            )));
        }
        Ok(())
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidParameter(format!("delta {delta} not in (0, 1)")));
    }
    Ok(())
}

/// Empirical means of rewards and one-hot successor vectors.
///
/// Unvisited pairs fall back to `R_hat = 0` and a self-loop. With `pooled`, rewards and
/// counts merge steps `1..=H` and transitions merge steps `1..H` (the last step has no
/// observed successor).
pub fn fit_tabular_model(dataset: &Dataset, pooled: bool, delta: f64) -> Result<ModelEstimate> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_delta(delta)?;
    let (horizon, num_states, num_actions) = dataset.behavior().shape();
    let mut reward_sum = Array3::<f64>::zeros((horizon, num_states, num_actions));
    let mut visits = Array3::<u64>::zeros((horizon, num_states, num_actions));
    let mut successors = Array4::<u64>::zeros((horizon, num_states, num_actions, num_states));
    for traj in dataset.trajectories() {
        for (h, step) in traj.steps.iter().enumerate() {
            reward_sum[[h, step.state, step.action]] += step.reward;
            visits[[h, step.state, step.action]] += 1;
            if let Some(next) = traj.steps.get(h + 1) {
                successors[[h, step.state, step.action, next.state]] += 1;
            }
        }
    }
    if pooled {
        let total_reward = reward_sum.sum_axis(Axis(0));
        let total_visits = visits.sum_axis(Axis(0));
        let total_successors = successors.sum_axis(Axis(0));
        for h in 0..horizon {
            reward_sum.index_axis_mut(Axis(0), h).assign(&total_reward);
            visits.index_axis_mut(Axis(0), h).assign(&total_visits);
            successors.index_axis_mut(Axis(0), h).assign(&total_successors);
        }
    }

    let rewards =
        Zip::from(&reward_sum)
            .and(&visits)
            .map_collect(|sum, n| if *n == 0 { 0.0 } else { (sum / *n as f64).clamp(0.0, 1.0) });
    let transition_counts = successors.sum_axis(Axis(3));
    let mut transitions = Array4::<f64>::zeros((horizon, num_states, num_actions, num_states));
    for ((h, x, a), n) in transition_counts.indexed_iter() {
        let mut row = transitions.slice_mut(s![h, x, a, ..]);
        if *n == 0 {
            row[x] = 1.0;
        } else {
            let total = *n as f64;
            Zip::from(&mut row).and(successors.slice(s![h, x, a, ..])).for_each(|p, c| *p = *c as f64 / total);
        }
    }
    Ok(ModelEstimate { rewards, transitions, counts: visits, transition_counts, pooled, delta })
}

/// Per-step pessimism bonuses `b[h][x][a]`.
#[derive(Clone, Debug, PartialEq)]
pub struct BonusTable {
    values: Array3<f64>,
}

impl BonusTable {
    pub fn new(values: Array3<f64>) -> Result<Self> {
        if values.iter().any(|b| !b.is_finite() || *b < 0.0) {
            return Err(Error::InvalidParameter("bonuses must be finite and nonnegative".into()));
        }
        Ok(Self { values })
    }

    pub fn zeros(shape: (usize, usize, usize)) -> Self {
        Self { values: Array3::zeros(shape) }
    }

    pub fn values(&self) -> &Array3<f64> {
        &self.values
    }

    pub fn shape(&self) -> (usize, usize, usize) {
        self.values.dim()
    }

    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(&self.values * factor)
    }
}

/// `b(x,a) = beta * sqrt(ln(|X| |A| H / delta) / max(1, n(x,a)))`.
pub fn compute_bonuses(model: &ModelEstimate, beta: f64) -> Result<BonusTable> {
    if !(beta.is_finite() && beta >= 0.0) {
        return Err(Error::InvalidParameter(format!("bonus multiplier {beta} must be nonnegative")));
    }
    let (h, x, a) = model.shape();
    let log_term = ((x * a * h) as f64 / model.delta).ln();
    let values = model.counts.mapv(|n| beta * (log_term / n.max(1) as f64).sqrt());
    BonusTable::new(values)
}

/// Shift estimate `Delta_hat[h][x][a][x']` with its average-error bound.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftEstimate {
    shift: Array4<f64>,
    kappa_delta: f64,
}

impl ShiftEstimate {
    pub fn new(shift: Array4<f64>, kappa_delta: f64) -> Result<Self> {
        let (_, x, _, next) = shift.dim();
        if x != next {
            return Err(Error::Dimension(format!("shift table {:?} is not [H, X, A, X]", shift.dim())));
        }
        if !(kappa_delta.is_finite() && kappa_delta >= 0.0) {
            return Err(Error::InvalidParameter(format!("kappa_delta {kappa_delta} must be nonnegative")));
        }
        let est = Self { shift, kappa_delta };
        let worst = est.max_l1();
        if worst > 2.0 + 1e-12 {
            return Err(Error::InvalidParameter(format!("shift row has L1 norm {worst} > 2")));
        }
        Ok(est)
    }

    pub fn with_kappa(mut self, kappa_delta: f64) -> Result<Self> {
        if !(kappa_delta.is_finite() && kappa_delta >= 0.0) {
            return Err(Error::InvalidParameter(format!("kappa_delta {kappa_delta} must be nonnegative")));
        }
        self.kappa_delta = kappa_delta;
        Ok(self)
    }

    pub fn shift(&self) -> &Array4<f64> {
        &self.shift
    }

    pub fn kappa_delta(&self) -> f64 {
        self.kappa_delta
    }

    /// `Delta_hat^(step)(. | state, action)`, 1-based step.
    pub fn row(&self, step: usize, state: usize, action: usize) -> ArrayView1<'_, f64> {
        self.shift.slice(s![step - 1, state, action, ..])
    }

    /// `[X, A, X]` slice for one 1-based step.
    pub fn at_step(&self, step: usize) -> ndarray::ArrayView3<'_, f64> {
        self.shift.index_axis(Axis(0), step - 1)
    }

    /// Largest `||Delta_hat(. | x, a)||_1` over all steps and pairs.
    pub fn max_l1(&self) -> f64 {
        self.shift.lanes(Axis(3)).into_iter().map(|row| row.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max)
    }
}

/// `Delta_hat(.|x,a) = P_hat(.|x,a) - sum_a' pi_b(a'|x) P_hat(.|x,a')` at every step.
pub fn induced_shift(model: &ModelEstimate, pi_b: &Policy) -> Result<ShiftEstimate> {
    model.check_policy(pi_b)?;
    let (horizon, num_states, num_actions) = model.shape();
    let mut shift = model.transitions.clone();
    for h in 0..horizon {
        for x in 0..num_states {
            let rows = model.transitions.slice(s![h, x, .., ..]);
            let mixed = pi_b.probs().slice(s![h, x, ..]).dot(&rows);
            for a in 0..num_actions {
                let mut out = shift.slice_mut(s![h, x, a, ..]);
                out -= &mixed;
            }
        }
    }
    Ok(ShiftEstimate { shift, kappa_delta: 0.0 })
}

/// Policy-mixed shift row `Delta_hat^(step)(. | state, pi) = sum_a pi(a|state) Delta_hat(. | state, a)`.
pub fn shift_under_policy(shift: &ShiftEstimate, pi: &Policy, state: usize, step: usize) -> Result<Array1<f64>> {
    let (h, x, a, _) = shift.shift.dim();
    if pi.shape() != (h, x, a) {
        return Err(Error::Dimension(format!(
            "policy shape {:?} does not match shift shape {:?}",
            pi.shape(),
            shift.shift.dim()
        )));
    }
    if step == 0 || step > h {
        return Err(Error::StepOutOfRange { step, max: h });
    }
    if state >= x {
        return Err(Error::Dimension(format!("state {state} out of range for {x} states")));
    }
    Ok(pi.action_probs(step, state).dot(&shift.shift.slice(s![step - 1, state, .., ..])))
}
