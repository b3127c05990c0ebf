//! Dynamic-programming learners (PVI, SPVI, PSL) and pessimistic/optimistic evaluation of a
//! fixed policy on a fitted model.

use ndarray::{s, Array1, Array2, Array3, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::estimation::{induced_shift, BonusTable, ModelEstimate};
use crate::mdp::{argmax_lowest, contract_last, expected_next, Policy};

/// Pessimistic, standard and optimistic value estimates for steps `1..=H+1` (row `h - 1`).
///
/// Invariant: `0 <= V_p <= V <= V_o <= Vmax[h]` pointwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueTriple {
    pessimistic: Array2<f64>,
    value: Array2<f64>,
    optimistic: Array2<f64>,
    vmax: Array1<f64>,
}

impl ValueTriple {
    fn terminal(horizon: usize, num_states: usize, vmax: Array1<f64>) -> Self {
        let zeros = Array2::zeros((horizon + 1, num_states));
        Self { pessimistic: zeros.clone(), value: zeros.clone(), optimistic: zeros, vmax }
    }

    pub fn pessimistic(&self) -> &Array2<f64> {
        &self.pessimistic
    }

    pub fn value(&self) -> &Array2<f64> {
        &self.value
    }

    pub fn optimistic(&self) -> &Array2<f64> {
        &self.optimistic
    }

    pub fn vmax(&self) -> &Array1<f64> {
        &self.vmax
    }

    pub fn horizon(&self) -> usize {
        self.value.nrows() - 1
    }

    /// `(V_p, V, V_o)` at a 1-based step in `1..=H+1`.
    pub fn at_step(&self, step: usize) -> (ArrayView1<'_, f64>, ArrayView1<'_, f64>, ArrayView1<'_, f64>) {
        let i = step - 1;
        (self.pessimistic.row(i), self.value.row(i), self.optimistic.row(i))
    }

    /// Uncertainty width `Gamma = V_o - V_p` at a 1-based step.
    pub fn gamma(&self, step: usize) -> Array1<f64> {
        &self.optimistic.row(step - 1) - &self.pessimistic.row(step - 1)
    }

    /// Whether the ordering invariant holds everywhere, up to `tolerance`.
    pub fn is_ordered(&self, tolerance: f64) -> bool {
        self.pessimistic.indexed_iter().all(|((h, x), &p)| {
            let v = self.value[[h, x]];
            let o = self.optimistic[[h, x]];
            p >= -tolerance && p <= v + tolerance && v <= o + tolerance && o <= self.vmax[h] + tolerance
        })
    }
}

/// Output of a learner: a deterministic policy with its estimated values.
#[derive(Clone, Debug)]
pub struct LearnedPolicy {
    pub policy: Policy,
    /// `[H, X]` chosen action indices.
    pub actions: Array2<usize>,
    pub values: ValueTriple,
    /// `[H, X, A]` objective that was maximised at each step (`Q_p`, `Q_sp` or `R_hat - b`).
    pub scores: Array3<f64>,
}

/// Per-step Q tables shared by the learners and the fixed-policy evaluator.
struct StepBackup {
    /// `R_hat + P_hat V_hat[h+1]`
    standard: Array2<f64>,
    /// `R_hat + P_hat V_p[h+1] - b`
    pessimistic: Array2<f64>,
    /// `R_hat + P_hat V_o[h+1] + b`
    optimistic: Array2<f64>,
}

fn backup(model: &ModelEstimate, bonuses: &BonusTable, triple: &ValueTriple, h: usize) -> StepBackup {
    let reward = model.rewards().index_axis(Axis(0), h);
    let bonus = bonuses.values().index_axis(Axis(0), h);
    let transitions = model.transitions();
    StepBackup {
        standard: &reward + &expected_next(transitions, h, triple.value.row(h + 1)),
        pessimistic: &reward + &expected_next(transitions, h, triple.pessimistic.row(h + 1)) - bonus,
        optimistic: &reward + &expected_next(transitions, h, triple.optimistic.row(h + 1)) + bonus,
    }
}

/// Fills row `h` of `triple` for action distribution `weights[x]` at every state.
fn write_values(triple: &mut ValueTriple, q: &StepBackup, h: usize, weights: ArrayView2<'_, f64>) {
    let cap = triple.vmax[h];
    for x in 0..weights.nrows() {
        let w = weights.row(x);
        let pess = w.dot(&q.pessimistic.row(x)).max(0.0).min(cap);
        let opt = w.dot(&q.optimistic.row(x)).min(cap);
        let value = w.dot(&q.standard.row(x)).max(pess).min(opt);
        triple.pessimistic[[h, x]] = pess;
        triple.optimistic[[h, x]] = opt;
        triple.value[[h, x]] = value;
    }
}

fn check_inputs(model: &ModelEstimate, bonuses: &BonusTable) -> Result<()> {
    if model.shape() != bonuses.shape() {
        return Err(Error::Dimension(format!(
            "bonus table {:?} does not match model {:?}",
            bonuses.shape(),
            model.shape()
        )));
    }
    Ok(())
}

/// Pessimistic/optimistic propagation of a fixed (possibly stochastic) policy:
///
/// ```text
/// V_p[h](x) = max(0, R_hat(x,pi) + P_hat(.|x,pi) V_p[h+1] - b(x,pi))
/// V_o[h](x) = min(Vmax[h], R_hat(x,pi) + P_hat(.|x,pi) V_o[h+1] + b(x,pi))
/// V[h](x)   = min(V_o[h](x), max(V_p[h](x), Q_hat(x,pi)))
/// ```
pub fn evaluate_policy_pess_opt(model: &ModelEstimate, bonuses: &BonusTable, pi: &Policy) -> Result<ValueTriple> {
    check_inputs(model, bonuses)?;
    model.check_policy(pi)?;
    let (horizon, num_states, _) = model.shape();
    let mut triple = ValueTriple::terminal(horizon, num_states, model.vmax());
    for h in (0..horizon).rev() {
        let q = backup(model, bonuses, &triple, h);
        write_values(&mut triple, &q, h, pi.probs().index_axis(Axis(0), h));
    }
    debug_assert!(triple.is_ordered(1e-9));
    Ok(triple)
}

/// Backward induction choosing `argmax_a score(h, backup)[x, a]` at each step, with the
/// value triple of the chosen actions propagated to the previous step.
fn learn<F>(model: &ModelEstimate, bonuses: &BonusTable, mut score: F) -> Result<LearnedPolicy>
where
    F: FnMut(usize, &StepBackup, &ValueTriple) -> Array2<f64>,
{
    check_inputs(model, bonuses)?;
    let (horizon, num_states, num_actions) = model.shape();
    let mut triple = ValueTriple::terminal(horizon, num_states, model.vmax());
    let mut actions = Array2::<usize>::zeros((horizon, num_states));
    let mut scores = Array3::zeros((horizon, num_states, num_actions));
    for h in (0..horizon).rev() {
        let q = backup(model, bonuses, &triple, h);
        let objective = score(h, &q, &triple);
        let mut one_hot = Array2::zeros((num_states, num_actions));
        for x in 0..num_states {
            let best = argmax_lowest(objective.row(x).iter().copied());
            actions[[h, x]] = best;
            one_hot[[x, best]] = 1.0;
        }
        write_values(&mut triple, &q, h, one_hot.view());
        scores.index_axis_mut(Axis(0), h).assign(&objective);
    }
    debug_assert!(triple.is_ordered(1e-9));
    let policy = Policy::deterministic(&actions, num_actions)?;
    Ok(LearnedPolicy { policy, actions, values: triple, scores })
}

/// Pessimistic value iteration: maximise `Q_p = R_hat + P_hat V_p[h+1] - b`.
pub fn pvi(model: &ModelEstimate, bonuses: &BonusTable) -> Result<LearnedPolicy> {
    learn(model, bonuses, |_, q, _| q.pessimistic.clone())
}

/// Selectively pessimistic value iteration:
/// maximise `Q_sp = Q_hat - b - sum_x' |Delta_hat(x'|x,a)| (V_o[h+1](x') - V_p[h+1](x'))`
/// with `Delta_hat` the shift induced by `pi_b` on the fitted model.
pub fn spvi(model: &ModelEstimate, bonuses: &BonusTable, pi_b: &Policy) -> Result<LearnedPolicy> {
    let shift = induced_shift(model, pi_b)?;
    learn(model, bonuses, |h, q, triple| {
        let gamma = &triple.optimistic.row(h + 1) - &triple.pessimistic.row(h + 1);
        let penalty = contract_last(shift.shift().index_axis(Axis(0), h).mapv(f64::abs).view(), gamma.view());
        &q.standard - &bonuses.values().index_axis(Axis(0), h) - &penalty
    })
}

/// Pessimistic supervised learning: at each step independently maximise `R_hat - b`.
pub fn psl(model: &ModelEstimate, bonuses: &BonusTable) -> Result<LearnedPolicy> {
    learn(model, bonuses, |h, _, _| &model.rewards().index_axis(Axis(0), h) - &bonuses.values().index_axis(Axis(0), h))
}

/// `Q_hat` at a 1-based step for the standard value row of `triple` at `step + 1`.
pub(crate) fn q_standard(model: &ModelEstimate, triple: &ValueTriple, step: usize) -> Array2<f64> {
    let h = step - 1;
    &model.rewards().index_axis(Axis(0), h) + &expected_next(model.transitions(), h, triple.value.row(h + 1))
}

/// `b` at a 1-based step as an `[X, A]` view.
pub(crate) fn bonus_at(bonuses: &BonusTable, step: usize) -> ArrayView2<'_, f64> {
    bonuses.values().slice(s![step - 1, .., ..])
}
