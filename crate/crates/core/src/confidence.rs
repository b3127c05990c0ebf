//! Confidence intervals for the per-step treatment effect `alpha^(h)_pi` of deviating from the
//! behavioral policy at step `h` after committing to `pi` for every later step.
//!
//! Three constructions are provided:
//!
//! - [`standard_ci`]: difference of pessimistic/optimistic values of the spliced policies
//!   `pi~_h` and `pi~_{h+1}`; all next-step uncertainty is propagated.
//! - [`selective_ci`]: bonus-penalised Q values where next-step uncertainty `Gamma` only enters
//!   through `|Delta_hat|`, so bandit-like states propagate nothing.
//! - [`theorem1_estimate`]: the general combiner of a contextual-bandit estimate, next-step
//!   value bounds and a shift estimate, evaluated on a holdout set.
//!
//! Every empirical average over holdout states `x_t^(h)` is a weighted sum over states, so the
//! `*_weighted` variants accept any state distribution (empirical or exact occupancy).

use std::fmt;
use std::str::FromStr;

use ndarray::{s, Array1, Array3, ArrayView1, Axis};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::{induced_shift, BonusTable, ModelEstimate, ShiftEstimate};
use crate::mdp::{contract_last, splice_policies, Dataset, Policy};
use crate::synthesis::{bonus_at, evaluate_policy_pess_opt, q_standard, ValueTriple};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CiMethod {
    Standard,
    Selective,
    Theorem1,
}

impl CiMethod {
    pub fn as_str(&self) -> &'static str {
        match self {
            CiMethod::Standard => "standard",
            CiMethod::Selective => "selective",
            CiMethod::Theorem1 => "theorem1",
        }
    }
}

impl fmt::Display for CiMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CiMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(CiMethod::Standard),
            "selective" => Ok(CiMethod::Selective),
            "theorem1" => Ok(CiMethod::Theorem1),
            other => Err(Error::InvalidParameter(format!("unknown interval method {other:?}"))),
        }
    }
}

/// `(lower, point, upper)` for `alpha^(step)_pi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntervalEstimate {
    pub lower: f64,
    pub point: f64,
    pub upper: f64,
    pub method: CiMethod,
    pub step: usize,
    /// Number of holdout trajectories behind the empirical averages (0 for exact weights).
    pub episodes: usize,
    pub delta: f64,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }
}

/// Empirical distribution of `x_t^(step)` over the holdout trajectories.
pub fn state_weights(holdout: &Dataset, step: usize) -> Result<Array1<f64>> {
    if holdout.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_step(step, holdout.horizon())?;
    let mut weights = Array1::zeros(holdout.num_states());
    for x in holdout.states_at(step) {
        weights[x] += 1.0;
    }
    weights /= holdout.len() as f64;
    Ok(weights)
}

fn check_step(step: usize, horizon: usize) -> Result<()> {
    if step == 0 || step > horizon {
        return Err(Error::StepOutOfRange { step, max: horizon });
    }
    Ok(())
}

fn check_weights(weights: ArrayView1<'_, f64>, num_states: usize) -> Result<()> {
    if weights.len() != num_states {
        return Err(Error::Dimension(format!("{} state weights for {num_states} states", weights.len())));
    }
    crate::mdp::check_distribution(weights, || "state weights".to_string())
}

/// `E_w[R_hat(x, pi) - R_hat(x, pi_b)]` at a 1-based step.
///
/// With the true reward table and exact occupancy this is the immediate effect `theta`.
pub fn immediate_effect(
    model: &ModelEstimate,
    weights: ArrayView1<'_, f64>,
    pi: &Policy,
    pi_b: &Policy,
    step: usize,
) -> Result<f64> {
    model.check_policy(pi)?;
    model.check_policy(pi_b)?;
    check_step(step, model.horizon())?;
    check_weights(weights, model.num_states())?;
    let rewards = model.rewards().index_axis(Axis(0), step - 1);
    let diff = &pi.kernel(step) - &pi_b.kernel(step);
    Ok((0..model.num_states()).map(|x| weights[x] * diff.row(x).dot(&rewards.row(x))).sum())
}

/// Standard propagation interval on holdout states.
pub fn standard_ci(
    model: &ModelEstimate,
    bonuses: &BonusTable,
    pi: &Policy,
    pi_b: &Policy,
    step: usize,
    holdout: &Dataset,
) -> Result<IntervalEstimate> {
    let weights = state_weights(holdout, step)?;
    standard_ci_weighted(model, bonuses, pi, pi_b, step, weights.view(), holdout.len())
}

/// ```text
/// lower = E_w[V_p(pi~_h)(x) - V_o(pi~_{h+1})(x)]
/// upper = E_w[V_o(pi~_h)(x) - V_p(pi~_{h+1})(x)]
/// ```
/// with the point estimate at the midpoint.
pub fn standard_ci_weighted(
    model: &ModelEstimate,
    bonuses: &BonusTable,
    pi: &Policy,
    pi_b: &Policy,
    step: usize,
    weights: ArrayView1<'_, f64>,
    episodes: usize,
) -> Result<IntervalEstimate> {
    check_step(step, model.horizon())?;
    check_weights(weights, model.num_states())?;
    let deviate = evaluate_policy_pess_opt(model, bonuses, &splice_policies(pi_b, pi, step)?)?;
    let follow = evaluate_policy_pess_opt(model, bonuses, &splice_policies(pi_b, pi, step + 1)?)?;
    let (dev_p, _, dev_o) = deviate.at_step(step);
    let (fol_p, _, fol_o) = follow.at_step(step);
    let lower = weights.dot(&(&dev_p - &fol_o));
    let upper = weights.dot(&(&dev_o - &fol_p));
    Ok(IntervalEstimate {
        lower,
        point: 0.5 * (lower + upper),
        upper,
        method: CiMethod::Standard,
        step,
        episodes,
        delta: model.delta(),
    })
}

/// Selective interval on holdout states.
pub fn selective_ci(
    model: &ModelEstimate,
    bonuses: &BonusTable,
    pi: &Policy,
    pi_b: &Policy,
    step: usize,
    holdout: &Dataset,
) -> Result<IntervalEstimate> {
    let weights = state_weights(holdout, step)?;
    selective_ci_weighted(model, bonuses, pi, pi_b, step, weights.view(), holdout.len())
}

/// With `(V_p, V_hat, V_o)` of `pi` propagated on the model down to step `h + 1`,
/// `Q_hat = R_hat + P_hat V_hat[h+1]`, `Gamma = V_o[h+1] - V_p[h+1]` and
/// `pen(x,a) = b(x,a) + sum_x' |Delta_hat(x'|x,a)| Gamma(x')`:
///
/// ```text
/// lower = E_w[Q_hat(x, pi) - pen(x, pi) - Q_hat(x, pi_b)]
/// upper = E_w[Q_hat(x, pi) + pen(x, pi) - Q_hat(x, pi_b)]
/// ```
/// where `f(x, pi)` is the `pi^(h)`-weighted average over actions.
pub fn selective_ci_weighted(
    model: &ModelEstimate,
    bonuses: &BonusTable,
    pi: &Policy,
    pi_b: &Policy,
    step: usize,
    weights: ArrayView1<'_, f64>,
    episodes: usize,
) -> Result<IntervalEstimate> {
    check_step(step, model.horizon())?;
    check_weights(weights, model.num_states())?;
    model.check_policy(pi_b)?;
    let triple = evaluate_policy_pess_opt(model, bonuses, pi)?;
    let shift = induced_shift(model, pi_b)?;
    let q = q_standard(model, &triple, step);
    let gamma = triple.gamma(step + 1);
    let penalty = &bonus_at(bonuses, step) + &contract_last(shift.at_step(step).mapv(f64::abs).view(), gamma.view());
    let mut lower = 0.0;
    let mut upper = 0.0;
    for (x, w) in weights.iter().enumerate() {
        if *w == 0.0 {
            continue;
        }
        let pi_x = pi.action_probs(step, x);
        let effect = pi_x.dot(&q.row(x)) - pi_b.action_probs(step, x).dot(&q.row(x));
        let pen = pi_x.dot(&penalty.row(x));
        lower += w * (effect - pen);
        upper += w * (effect + pen);
    }
    Ok(IntervalEstimate {
        lower,
        point: 0.5 * (lower + upper),
        upper,
        method: CiMethod::Selective,
        step,
        episodes,
        delta: model.delta(),
    })
}

/// Next-step value estimates `(V_p, V_hat, V_o)` at step `h + 1`.
#[derive(Clone, Debug, PartialEq)]
pub struct NextStepValues {
    pub pessimistic: Array1<f64>,
    pub value: Array1<f64>,
    pub optimistic: Array1<f64>,
}

impl NextStepValues {
    pub fn gamma(&self) -> Array1<f64> {
        &self.optimistic - &self.pessimistic
    }

    /// All three equal to `values` (zero uncertainty).
    pub fn exact(values: Array1<f64>) -> Self {
        Self { pessimistic: values.clone(), value: values.clone(), optimistic: values }
    }
}

/// Inputs to the shift-weighted combiner at one step `h`.
#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Inputs {
    /// Estimate of the immediate effect `theta^(h)`.
    pub theta_hat: f64,
    /// Radius with `|theta - theta_hat| <= kappa_theta`.
    pub kappa_theta: f64,
    pub next_values: NextStepValues,
    /// `Delta_hat^(h)` as `[X, A, X]`.
    pub shift: Array3<f64>,
    /// Average L1 error bound on the policy-mixed shift.
    pub kappa_delta: f64,
    pub delta: f64,
    pub delta_in: f64,
    /// `Vmax^(h+1)`.
    pub vmax_next: f64,
}

impl Theorem1Inputs {
    /// Picks the step-`h + 1` values from `triple` and the step-`h` rows from `shift`.
    pub fn from_estimates(
        theta_hat: f64,
        kappa_theta: f64,
        triple: &ValueTriple,
        shift: &ShiftEstimate,
        step: usize,
        delta: f64,
        delta_in: f64,
    ) -> Result<Self> {
        check_step(step, triple.horizon())?;
        let (p, v, o) = triple.at_step(step + 1);
        let inputs = Self {
            theta_hat,
            kappa_theta,
            next_values: NextStepValues { pessimistic: p.to_owned(), value: v.to_owned(), optimistic: o.to_owned() },
            shift: shift.at_step(step).to_owned(),
            kappa_delta: shift.kappa_delta(),
            delta,
            delta_in,
            vmax_next: triple.vmax()[step],
        };
        inputs.validate()?;
        Ok(inputs)
    }

    pub fn num_states(&self) -> usize {
        self.shift.dim().0
    }

    pub fn validate(&self) -> Result<()> {
        let (x, a, next) = self.shift.dim();
        if x != next || a == 0 {
            return Err(Error::Dimension(format!("shift {:?} is not [X, A, X]", self.shift.dim())));
        }
        let nv = &self.next_values;
        if [nv.pessimistic.len(), nv.value.len(), nv.optimistic.len()].iter().any(|n| *n != x) {
            return Err(Error::Dimension(format!("next-step values do not cover {x} states")));
        }
        for (name, k) in [("kappa_theta", self.kappa_theta), ("kappa_delta", self.kappa_delta)] {
            if !(k.is_finite() && k >= 0.0) {
                return Err(Error::InvalidParameter(format!("{name} = {k} must be nonnegative")));
            }
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return Err(Error::InvalidParameter(format!("delta {} not in (0, 1)", self.delta)));
        }
        if !(0.0..1.0).contains(&self.delta_in) {
            return Err(Error::InvalidParameter(format!("delta_in {} not in [0, 1)", self.delta_in)));
        }
        if !(self.vmax_next.is_finite() && self.vmax_next >= 0.0) {
            return Err(Error::InvalidParameter(format!("vmax {} must be nonnegative", self.vmax_next)));
        }
        const TOL: f64 = 1e-12;
        for i in 0..x {
            let (p, v, o) = (nv.pessimistic[i], nv.value[i], nv.optimistic[i]);
            if !(p >= -TOL && p <= v + TOL && v <= o + TOL && o <= self.vmax_next + TOL) {
                return Err(Error::InvalidParameter(format!(
                    "next-step values at state {i} violate 0 <= V_p <= V <= V_o <= Vmax ({p}, {v}, {o})"
                )));
            }
        }
        for row in self.shift.lanes(Axis(2)) {
            let l1: f64 = row.iter().map(|d| d.abs()).sum();
            if l1 > 2.0 + TOL {
                return Err(Error::InvalidParameter(format!("shift row has L1 norm {l1} > 2")));
            }
        }
        Ok(())
    }

    /// `Delta_hat(. | x, pi^(step))` for every state, shape `[X, X]`.
    fn mixed_shift(&self, pi: &Policy, step: usize) -> Result<ndarray::Array2<f64>> {
        let x = self.num_states();
        if pi.num_states() != x || pi.num_actions() != self.shift.dim().1 {
            return Err(Error::Dimension(format!(
                "policy shape {:?} does not match shift {:?}",
                pi.shape(),
                self.shift.dim()
            )));
        }
        check_step(step, pi.horizon())?;
        Ok(ndarray::Array2::from_shape_fn((x, x), |(s, n)| {
            pi.action_probs(step, s).dot(&self.shift.slice(s![s, .., n]))
        }))
    }
}

/// The four nonnegative terms of the combiner's radius.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadiusTerms {
    /// `kappa_theta`
    pub bandit: f64,
    /// `Vmax^(h+1) * kappa_delta`
    pub shift_error: f64,
    /// `6 Vmax^(h+1) sqrt(ln(4/delta) / (2T))`
    pub sampling: f64,
    /// `(1/T) sum_t sum_x' |Delta_hat(x'|x_t, pi)| Gamma(x')`
    pub propagation: f64,
}

impl RadiusTerms {
    pub fn total(&self) -> f64 {
        self.bandit + self.shift_error + self.sampling + self.propagation
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Theorem1Estimate {
    pub interval: IntervalEstimate,
    pub radius: RadiusTerms,
}

/// Shift-weighted combiner on a holdout set independent of the inputs:
///
/// ```text
/// alpha_hat = theta_hat + (1/T) sum_t sum_x' V_hat(x') Delta_hat(x'|x_t, pi)
/// L = kappa_theta + Vmax kappa_delta + 6 Vmax sqrt(ln(4/delta)/(2T))
///     + (1/T) sum_t sum_x' |Delta_hat(x'|x_t, pi)| Gamma(x')
/// ```
/// and the interval `[alpha_hat - L, alpha_hat + L]`.
pub fn theorem1_estimate(
    inputs: &Theorem1Inputs,
    holdout: &Dataset,
    pi: &Policy,
    step: usize,
) -> Result<Theorem1Estimate> {
    inputs.validate()?;
    if holdout.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mixed = inputs.mixed_shift(pi, step)?;
    let gamma = inputs.next_values.gamma();
    let t = holdout.len() as f64;
    let (mut drift, mut propagation) = (0.0, 0.0);
    for x in holdout.states_at(step) {
        let row = mixed.row(x);
        drift += row.dot(&inputs.next_values.value);
        propagation += row.iter().zip(gamma.iter()).map(|(d, g)| d.abs() * g).sum::<f64>();
    }
    let point = inputs.theta_hat + drift / t;
    let radius = RadiusTerms {
        bandit: inputs.kappa_theta,
        shift_error: inputs.vmax_next * inputs.kappa_delta,
        sampling: 6.0 * inputs.vmax_next * ((4.0 / inputs.delta).ln() / (2.0 * t)).sqrt(),
        propagation: propagation / t,
    };
    let l = radius.total();
    Ok(Theorem1Estimate {
        interval: IntervalEstimate {
            lower: point - l,
            point,
            upper: point + l,
            method: CiMethod::Theorem1,
            step,
            episodes: holdout.len(),
            delta: inputs.delta,
        },
        radius,
    })
}

/// Population version of the combiner with the holdout average replaced by the exact state
/// distribution at `step`. Returns `(alpha_tilde, L_tilde)`.
pub fn less_empirical_estimate(
    inputs: &Theorem1Inputs,
    occupancy: ArrayView1<'_, f64>,
    pi: &Policy,
    step: usize,
) -> Result<(f64, f64)> {
    inputs.validate()?;
    check_weights(occupancy, inputs.num_states())?;
    let mixed = inputs.mixed_shift(pi, step)?;
    let gamma = inputs.next_values.gamma();
    let drift = occupancy.dot(&mixed.dot(&inputs.next_values.value));
    let propagation = occupancy.dot(&mixed.mapv(f64::abs).dot(&gamma));
    let alpha = inputs.theta_hat + drift;
    let radius = inputs.kappa_theta + inputs.vmax_next * inputs.kappa_delta + propagation;
    Ok((alpha, radius))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environments::{chain_bandit, chainbandit_behavior_policy, chainbandit_eval_policy, ChainBanditSpec};
    use crate::estimation::{compute_bonuses, fit_tabular_model};
    use crate::mdp::{alpha_true, evaluate_policy_exact, sample_trajectories, state_occupancy, TabularMDP};
    use approx::assert_abs_diff_eq;

    fn setup() -> (ChainBanditSpec, TabularMDP, Policy) {
        let spec = ChainBanditSpec::default();
        (spec, chain_bandit(&spec).unwrap().mdp, chainbandit_behavior_policy(&spec).unwrap())
    }

    #[test]
    fn method_names_round_trip() {
        for m in [CiMethod::Standard, CiMethod::Selective, CiMethod::Theorem1] {
            assert_eq!(m.as_str().parse::<CiMethod>().unwrap(), m);
        }
        assert!("other".parse::<CiMethod>().is_err());
    }

    #[test]
    fn empty_holdout_is_an_error() {
        let (_, mdp, pi_b) = setup();
        let model = ModelEstimate::exact(&mdp, 0.05).unwrap();
        let empty = Dataset::new(vec![], pi_b.clone(), 0).unwrap();
        let zero = BonusTable::zeros(model.shape());
        assert!(matches!(standard_ci(&model, &zero, &pi_b, &pi_b, 2, &empty), Err(Error::EmptyDataset)));
        assert!(matches!(selective_ci(&model, &zero, &pi_b, &pi_b, 2, &empty), Err(Error::EmptyDataset)));
    }

    #[test]
    fn exact_model_zero_bonus_collapses_to_alpha() {
        let (spec, mdp, pi_b) = setup();
        let model = ModelEstimate::exact(&mdp, 0.05).unwrap();
        let zero = BonusTable::zeros(model.shape());
        let occupancy = state_occupancy(&mdp, &pi_b).unwrap();
        for lambda in [0.0, 0.3, 0.8, 1.0] {
            let pi = chainbandit_eval_policy(&spec, lambda).unwrap();
            for h in 1..=3 {
                let alpha = alpha_true(&mdp, &pi, &pi_b, h).unwrap();
                let w = occupancy.row(h - 1);
                let std = standard_ci_weighted(&model, &zero, &pi, &pi_b, h, w, 0).unwrap();
                let sel = selective_ci_weighted(&model, &zero, &pi, &pi_b, h, w, 0).unwrap();
                for ci in [std, sel] {
                    assert!(ci.width().abs() < 1e-10, "{ci:?}");
                    assert_abs_diff_eq!(ci.point, alpha, epsilon = 1e-10);
                }
            }
        }
    }

    #[test]
    fn selective_brackets_alpha_with_exact_model_and_positive_bonus() {
        let (spec, mdp, pi_b) = setup();
        let model = ModelEstimate::exact(&mdp, 0.05).unwrap();
        let bonuses = BonusTable::new(Array3::from_elem(model.shape(), 0.07)).unwrap();
        let occupancy = state_occupancy(&mdp, &pi_b).unwrap();
        for lambda in [0.0, 0.5, 0.8, 1.0] {
            let pi = chainbandit_eval_policy(&spec, lambda).unwrap();
            for h in 1..=3 {
                let alpha = alpha_true(&mdp, &pi, &pi_b, h).unwrap();
                let ci = selective_ci_weighted(&model, &bonuses, &pi, &pi_b, h, occupancy.row(h - 1), 0).unwrap();
                assert!(ci.lower <= alpha + 1e-12 && alpha <= ci.upper + 1e-12, "{lambda} {h} {ci:?} {alpha}");
                let std = standard_ci_weighted(&model, &bonuses, &pi, &pi_b, h, occupancy.row(h - 1), 0).unwrap();
                assert!(std.contains(alpha), "{std:?} {alpha}");
            }
        }
    }

    #[test]
    fn selective_without_shift_has_bonus_width() {
        // every action shares its transition row: width is exactly 2 E_w[b(x, pi)]
        let transitions =
            ndarray::Array4::from_shape_fn((3, 3, 2, 3), |(_, x, _, n)| if (x + 1) % 3 == n { 1.0 } else { 0.0 });
        let model = ModelEstimate::from_parts(
            Array3::from_shape_fn((3, 3, 2), |(_, x, a)| 0.2 * (x + a) as f64),
            transitions,
            Array3::from_shape_fn((3, 3, 2), |(_, x, a)| (3 + x + a) as u64),
            0.05,
        )
        .unwrap();
        let bonuses = compute_bonuses(&model, 1.0).unwrap();
        let pi_b = Policy::stationary(3, 3, &[0.5, 0.5]).unwrap();
        let pi = Policy::stationary(3, 3, &[0.9, 0.1]).unwrap();
        let w = ndarray::arr1(&[0.2, 0.3, 0.5]);
        let ci = selective_ci_weighted(&model, &bonuses, &pi, &pi_b, 2, w.view(), 0).unwrap();
        let expected: f64 =
            (0..3).map(|x| w[x] * pi.action_probs(2, x).dot(&bonuses.values().slice(s![1, x, ..]))).sum();
        assert_abs_diff_eq!(ci.width(), 2.0 * expected, epsilon = 1e-12);
    }

    #[test]
    fn selective_width_grows_with_beta() {
        let (spec, mdp, pi_b) = setup();
        let data = sample_trajectories(&mdp, &pi_b, 500, 4).unwrap();
        let model = fit_tabular_model(&data, true, 0.05).unwrap();
        let pi = chainbandit_eval_policy(&spec, 0.4).unwrap();
        let mut last = -1.0;
        for beta in [0.0, 0.5, 1.0, 2.0] {
            let b = compute_bonuses(&model, beta).unwrap();
            let ci = selective_ci(&model, &b, &pi, &pi_b, 2, &data).unwrap();
            assert!(ci.width() >= last);
            assert!(ci.lower <= ci.point && ci.point <= ci.upper);
            last = ci.width();
        }
    }

    fn exact_inputs(mdp: &TabularMDP, pi: &Policy, pi_b: &Policy, h: usize) -> Theorem1Inputs {
        let model = ModelEstimate::exact(mdp, 0.05).unwrap();
        let occupancy = state_occupancy(mdp, pi_b).unwrap();
        let theta = immediate_effect(&model, occupancy.row(h - 1), pi, pi_b, h).unwrap();
        let values = evaluate_policy_exact(mdp, pi).unwrap();
        let shift = induced_shift(&model, pi_b).unwrap();
        Theorem1Inputs {
            theta_hat: theta,
            kappa_theta: 0.0,
            next_values: NextStepValues::exact(values.at_step(h + 1).to_owned()),
            shift: shift.at_step(h).to_owned(),
            kappa_delta: 0.0,
            delta: 0.05,
            delta_in: 0.0,
            vmax_next: values.vmax()[h],
        }
    }

    #[test]
    fn less_empirical_is_exact_with_exact_inputs() {
        let (spec, mdp, pi_b) = setup();
        let occupancy = state_occupancy(&mdp, &pi_b).unwrap();
        for lambda in [0.0, 0.2, 0.8, 1.0] {
            let pi = chainbandit_eval_policy(&spec, lambda).unwrap();
            for h in 1..=3 {
                let inputs = exact_inputs(&mdp, &pi, &pi_b, h);
                let (alpha_tilde, l_tilde) = less_empirical_estimate(&inputs, occupancy.row(h - 1), &pi, h).unwrap();
                assert_abs_diff_eq!(alpha_tilde, alpha_true(&mdp, &pi, &pi_b, h).unwrap(), epsilon = 1e-12);
                assert_eq!(l_tilde, 0.0);
            }
        }
    }

    #[test]
    fn zero_shift_radius_is_bandit_plus_sampling() {
        let (spec, mdp, pi_b) = setup();
        let pi = chainbandit_eval_policy(&spec, 0.1).unwrap();
        let mut inputs = exact_inputs(&mdp, &pi, &pi_b, 2);
        inputs.shift.fill(0.0);
        inputs.kappa_theta = 0.03;
        inputs.kappa_delta = 0.0;
        inputs.next_values.optimistic.mapv_inplace(|v| (v + 0.2f64).min(1.0));
        let data = sample_trajectories(&mdp, &pi_b, 400, 1).unwrap();
        let est = theorem1_estimate(&inputs, &data, &pi, 2).unwrap();
        let expected = 0.03 + 6.0 * inputs.vmax_next * ((4.0f64 / 0.05).ln() / 800.0).sqrt();
        assert_eq!(est.interval.width() / 2.0, est.radius.total());
        assert_eq!(est.radius.total(), expected);
        assert_eq!(est.radius.propagation, 0.0);
        assert_eq!(est.radius.shift_error, 0.0);
        assert_eq!(est.interval.point, inputs.theta_hat);
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let (spec, mdp, pi_b) = setup();
        let pi = chainbandit_eval_policy(&spec, 0.1).unwrap();
        let data = sample_trajectories(&mdp, &pi_b, 10, 1).unwrap();
        let good = exact_inputs(&mdp, &pi, &pi_b, 2);
        let mut bad = good.clone();
        bad.kappa_theta = -1.0;
        assert!(theorem1_estimate(&bad, &data, &pi, 2).is_err());
        let mut bad = good.clone();
        bad.next_values.pessimistic[0] = bad.next_values.value[0] + 0.5;
        assert!(theorem1_estimate(&bad, &data, &pi, 2).is_err());
        let mut bad = good.clone();
        bad.shift[[0, 0, 0]] = 3.0;
        assert!(theorem1_estimate(&bad, &data, &pi, 2).is_err());
        let empty = Dataset::new(vec![], pi_b.clone(), 0).unwrap();
        assert!(matches!(theorem1_estimate(&good, &empty, &pi, 2), Err(Error::EmptyDataset)));
    }
}
