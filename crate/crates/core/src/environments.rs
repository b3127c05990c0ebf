//! ChainBandit and GridWorld benchmark MDPs and the policy families evaluated on them.

use ndarray::{Array1, Array3, Array4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mdp::{Policy, TabularMDP};

/// A constructed MDP together with human-readable labels for its indices.
#[derive(Clone, Debug)]
pub struct Environment {
    pub mdp: TabularMDP,
    pub state_labels: Vec<String>,
    pub action_labels: Vec<String>,
}

/// Two parallel chains of length `length`; the episode horizon equals the length.
///
/// Top-chain states are `(i, 0)`, bottom-chain states `(i, 1)`, `i = 1..=length`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChainBanditSpec {
    pub length: usize,
    /// Reward for `a1`/`a2` in the top chain.
    pub top_keep: f64,
    /// Reward for dropping to the bottom chain with `a3`.
    pub top_drop: f64,
    /// Reward for every action in the bottom chain.
    pub bottom: f64,
}

impl Default for ChainBanditSpec {
    fn default() -> Self {
        Self { length: 3, top_keep: 0.5, top_drop: 0.9, bottom: 0.1 }
    }
}

impl ChainBanditSpec {
    pub fn with_length(length: usize) -> Self {
        Self { length, ..Self::default() }
    }

    pub fn num_states(&self) -> usize {
        2 * self.length
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::Environment(msg));
        if self.length == 0 {
            return fail("chain length must be positive".into());
        }
        for (name, v) in [("top_keep", self.top_keep), ("top_drop", self.top_drop), ("bottom", self.bottom)] {
            if !(0.0..=1.0).contains(&v) {
                return fail(format!("{name} = {v} outside [0, 1]"));
            }
        }
        if self.top_drop <= self.top_keep {
            return fail(format!("top_drop > top_keep violated ({} <= {})", self.top_drop, self.top_keep));
        }
        let stay = self.length as f64 * self.top_keep;
        let drop = self.top_drop + (self.length - 1) as f64 * self.bottom;
        if stay <= drop {
            return fail(format!("length * top_keep > top_drop + (length - 1) * bottom violated ({stay} <= {drop})"));
        }
        if self.bottom >= self.top_keep {
            return fail(format!("bottom < top_keep violated ({} >= {})", self.bottom, self.top_keep));
        }
        Ok(())
    }

    pub fn top_state(&self, column: usize) -> usize {
        column - 1
    }

    pub fn bottom_state(&self, column: usize) -> usize {
        self.length + column - 1
    }
}

/// Builds ChainBandit.
///
/// In the top chain `a1`/`a2` advance along the top and `a3` drops to the next bottom
/// state. Bottom states are bandit states: every action advances along the bottom with the
/// same reward. The last column cannot advance, so every action self-loops there; rewards
/// are the same as in every other column.
pub fn chain_bandit(spec: &ChainBanditSpec) -> Result<Environment> {
    spec.validate()?;
    let l = spec.length;
    let n = spec.num_states();
    let mut rewards = Array3::zeros((l, n, 3));
    let mut transitions = Array4::zeros((l, n, 3, n));
    for h in 0..l {
        for column in 1..=l {
            let top = spec.top_state(column);
            let bottom = spec.bottom_state(column);
            for a in 0..3 {
                let (top_next, bottom_next) = if column < l {
                    let next = if a == 2 { spec.bottom_state(column + 1) } else { spec.top_state(column + 1) };
                    (next, spec.bottom_state(column + 1))
                } else {
                    (top, bottom)
                };
                transitions[[h, top, a, top_next]] = 1.0;
                rewards[[h, top, a]] = if a == 2 { spec.top_drop } else { spec.top_keep };
                transitions[[h, bottom, a, bottom_next]] = 1.0;
                rewards[[h, bottom, a]] = spec.bottom;
            }
        }
    }
    let mut initial = Array1::zeros(n);
    initial[spec.top_state(1)] = 1.0;
    let mdp = TabularMDP::new(rewards, transitions, initial)?;
    let state_labels =
        (0..n).map(|s| if s < l { format!("({},0)", s + 1) } else { format!("({},1)", s - l + 1) }).collect();
    Ok(Environment { mdp, state_labels, action_labels: vec!["a1".into(), "a2".into(), "a3".into()] })
}

/// `(a1, a2, a3) = (0.1, 0.1, 0.8)` at every state and step.
pub fn chainbandit_behavior_policy(spec: &ChainBanditSpec) -> Result<Policy> {
    Policy::stationary(spec.length, spec.num_states(), &[0.1, 0.1, 0.8])
}

/// `((1 - lambda)/2, (1 - lambda)/2, lambda)` at every state and step.
pub fn chainbandit_eval_policy(spec: &ChainBanditSpec, lambda: f64) -> Result<Policy> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("ChainBandit lambda {lambda} outside [0, 1]")));
    }
    let keep = (1.0 - lambda) / 2.0;
    Policy::stationary(spec.length, spec.num_states(), &[keep, keep, lambda])
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StartDistribution {
    /// Point mass on `start`.
    #[default]
    Fixed,
    /// Uniform over every cell.
    Uniform,
}

/// Grid with 1-indexed `(column, row)` coordinates; `up` increases the row.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridWorldSpec {
    pub width: usize,
    pub height: usize,
    pub start: (usize, usize),
    pub goal: (usize, usize),
    pub horizon: usize,
    pub start_distribution: StartDistribution,
}

impl Default for GridWorldSpec {
    fn default() -> Self {
        Self {
            width: 8,
            height: 3,
            start: (1, 1),
            goal: (2, 2),
            horizon: 3,
            start_distribution: StartDistribution::Fixed,
        }
    }
}

pub const GRID_ACTIONS: [&str; 4] = ["left", "right", "up", "down"];

impl GridWorldSpec {
    pub fn num_states(&self) -> usize {
        self.width * self.height
    }

    pub fn state_index(&self, (column, row): (usize, usize)) -> usize {
        (row - 1) * self.width + (column - 1)
    }

    pub fn coordinates(&self, state: usize) -> (usize, usize) {
        (state % self.width + 1, state / self.width + 1)
    }

    pub fn validate(&self) -> Result<()> {
        if self.width == 0 || self.height == 0 || self.horizon == 0 {
            return Err(Error::Environment("width, height and horizon must be positive".into()));
        }
        let inside = |(c, r): (usize, usize)| (1..=self.width).contains(&c) && (1..=self.height).contains(&r);
        if !inside(self.start) {
            return Err(Error::Environment(format!("start {:?} outside the grid", self.start)));
        }
        if !inside(self.goal) {
            return Err(Error::Environment(format!("goal {:?} outside the grid", self.goal)));
        }
        if self.start == self.goal {
            return Err(Error::Environment("start and goal coincide".into()));
        }
        Ok(())
    }

    fn step(&self, state: usize, action: usize) -> usize {
        let (c, r) = self.coordinates(state);
        let moved = match action {
            0 => (c.saturating_sub(1).max(1), r),
            1 => ((c + 1).min(self.width), r),
            2 => (c, (r + 1).min(self.height)),
            _ => (c, r.saturating_sub(1).max(1)),
        };
        self.state_index(moved)
    }
}

/// Builds GridWorld: moves are clipped at the boundary, the goal is absorbing, and the
/// reward is one exactly on the transition into the goal.
pub fn grid_world(spec: &GridWorldSpec) -> Result<Environment> {
    spec.validate()?;
    let n = spec.num_states();
    let goal = spec.state_index(spec.goal);
    let mut rewards = Array3::zeros((spec.horizon, n, 4));
    let mut transitions = Array4::zeros((spec.horizon, n, 4, n));
    for h in 0..spec.horizon {
        for s in 0..n {
            for a in 0..4 {
                let next = if s == goal { goal } else { spec.step(s, a) };
                transitions[[h, s, a, next]] = 1.0;
                if next == goal && s != goal {
                    rewards[[h, s, a]] = 1.0;
                }
            }
        }
    }
    let initial = match spec.start_distribution {
        StartDistribution::Fixed => {
            let mut d = Array1::zeros(n);
            d[spec.state_index(spec.start)] = 1.0;
            d
        }
        StartDistribution::Uniform => Array1::from_elem(n, 1.0 / n as f64),
    };
    let mdp = TabularMDP::new(rewards, transitions, initial)?;
    let state_labels = (0..n).map(|s| format!("{:?}", spec.coordinates(s))).collect();
    Ok(Environment { mdp, state_labels, action_labels: GRID_ACTIONS.iter().map(|s| s.to_string()).collect() })
}

/// `(left, right, up, down) = (0.20, 0.10, 0.50, 0.20)` everywhere.
pub fn gridworld_behavior_policy(spec: &GridWorldSpec) -> Result<Policy> {
    Policy::stationary(spec.horizon, spec.num_states(), &[0.20, 0.10, 0.50, 0.20])
}

/// `(0.25, 0.20, 0.55 - lambda, lambda)` everywhere; `lambda` is the down probability.
pub fn gridworld_eval_policy(spec: &GridWorldSpec, lambda: f64) -> Result<Policy> {
    if !(0.0..=0.55).contains(&lambda) {
        return Err(Error::InvalidParameter(format!("GridWorld lambda {lambda} outside [0, 0.55]")));
    }
    Policy::stationary(spec.horizon, spec.num_states(), &[0.25, 0.20, 0.55 - lambda, lambda])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mdp::{evaluate_policy_exact, optimal_policy};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;

    #[test]
    fn chain_bandit_shape() {
        let env = chain_bandit(&ChainBanditSpec::with_length(4)).unwrap();
        assert_eq!(env.mdp.shape(), (4, 8, 3));
        assert_eq!(env.mdp.initial_distribution()[0], 1.0);
        assert_eq!(env.state_labels[0], "(1,0)");
        assert_eq!(env.state_labels[4], "(1,1)");
    }

    #[test]
    fn chain_bandit_rejects_each_violated_inequality() {
        let base = ChainBanditSpec::default();
        let err = chain_bandit(&ChainBanditSpec { top_drop: 0.4, ..base }).unwrap_err();
        assert!(err.to_string().contains("top_drop > top_keep"));
        let err = chain_bandit(&ChainBanditSpec { top_drop: 1.0, bottom: 0.3, ..base }).unwrap_err();
        assert!(err.to_string().contains("length * top_keep"));
        // bottom < top_keep follows from the first two, so it never fires on its own
        assert!(chain_bandit(&ChainBanditSpec { length: 0, ..base }).is_err());
    }

    #[test]
    fn chain_bandit_hand_computed_values() {
        let spec = ChainBanditSpec::default();
        let env = chain_bandit(&spec).unwrap();
        let always_a1 = Policy::stationary(3, 6, &[1.0, 0.0, 0.0]).unwrap();
        assert_abs_diff_eq!(env.mdp.policy_value(&always_a1).unwrap(), 1.5, epsilon = 1e-12);
        // a3 at step 1, then anything in the bottom chain
        let mut actions = Array2::zeros((3, 6));
        actions[[0, 0]] = 2;
        let drop_first = Policy::deterministic(&actions, 3).unwrap();
        assert_abs_diff_eq!(env.mdp.policy_value(&drop_first).unwrap(), 1.1, epsilon = 1e-12);
        // keep along the top, drop at the last step
        let mut actions = Array2::zeros((3, 6));
        actions[[2, spec.top_state(3)]] = 2;
        let drop_last = Policy::deterministic(&actions, 3).unwrap();
        assert_abs_diff_eq!(env.mdp.policy_value(&drop_last).unwrap(), 1.9, epsilon = 1e-12);
    }

    #[test]
    fn a3_strictly_worse_at_the_start() {
        let env = chain_bandit(&ChainBanditSpec::default()).unwrap();
        let (_, values) = optimal_policy(&env.mdp);
        let next = values.at_step(2);
        let q = |a: usize| {
            let row: ndarray::ArrayView1<f64> = env.mdp.transitions().slice(ndarray::s![0, 0, a, ..]);
            env.mdp.rewards()[[0, 0, a]] + row.dot(&next)
        };
        assert!(q(2) < q(0));
        assert_abs_diff_eq!(q(0), 1.9, epsilon = 1e-12);
        assert_abs_diff_eq!(q(2), 1.1, epsilon = 1e-12);
    }

    #[test]
    fn a3_optimal_only_at_the_last_step() {
        // lengths 1 and 2 violate the reward inequalities under the default rewards
        assert!(chain_bandit(&ChainBanditSpec::with_length(2)).is_err());
        for length in 3..=6 {
            let spec = ChainBanditSpec::with_length(length);
            let env = chain_bandit(&spec).unwrap();
            let (policy, values) = optimal_policy(&env.mdp);
            for h in 1..length {
                assert_eq!(policy.action_probs(h, spec.top_state(h))[2], 0.0, "L={length} h={h}");
            }
            assert_eq!(policy.action_probs(length, spec.top_state(length))[2], 1.0);
            let optimum = (length - 1) as f64 * spec.top_keep + spec.top_drop;
            assert_abs_diff_eq!(values.initial_value(env.mdp.initial_distribution()), optimum, epsilon = 1e-12);
        }
    }

    #[test]
    fn bottom_rows_are_action_independent() {
        let spec = ChainBanditSpec::with_length(4);
        let env = chain_bandit(&spec).unwrap();
        let p = env.mdp.transitions();
        for h in 0..4 {
            for column in 1..=4 {
                let s = spec.bottom_state(column);
                for a in 1..3 {
                    assert_eq!(p.slice(ndarray::s![h, s, a, ..]), p.slice(ndarray::s![h, s, 0, ..]));
                }
            }
        }
    }

    #[test]
    fn chainbandit_policy_family() {
        let spec = ChainBanditSpec::default();
        let at_behavior = chainbandit_eval_policy(&spec, 0.8).unwrap();
        let behavior = chainbandit_behavior_policy(&spec).unwrap();
        assert_abs_diff_eq!(at_behavior.probs(), behavior.probs(), epsilon = 1e-15);
        assert_eq!(chainbandit_eval_policy(&spec, 0.0).unwrap().action_probs(1, 0).to_vec(), vec![0.5, 0.5, 0.0]);
        assert_eq!(chainbandit_eval_policy(&spec, 1.0).unwrap().action_probs(2, 3).to_vec(), vec![0.0, 0.0, 1.0]);
        assert!(chainbandit_eval_policy(&spec, 1.01).is_err());
        assert!(chainbandit_eval_policy(&spec, -0.1).is_err());
    }

    #[test]
    fn grid_world_layout() {
        let spec = GridWorldSpec::default();
        let env = grid_world(&spec).unwrap();
        assert_eq!(env.mdp.num_states(), 24);
        let goal = spec.state_index(spec.goal);
        let p = env.mdp.transitions();
        for a in 0..4 {
            assert_eq!(p[[0, goal, a, goal]], 1.0);
            assert_eq!(env.mdp.rewards()[[0, goal, a]], 0.0);
        }
        // every row is a point mass
        for row in p.lanes(ndarray::Axis(3)) {
            assert_eq!(row.iter().filter(|v| **v == 1.0).count(), 1);
        }
        // clipped at the left/bottom corner
        let start = spec.state_index((1, 1));
        assert_eq!(p[[0, start, 0, start]], 1.0);
        assert_eq!(p[[0, start, 3, start]], 1.0);
        assert_eq!(p[[0, start, 2, spec.state_index((1, 2))]], 1.0);
    }

    /// Enumerates every action sequence from the start and returns the best return.
    fn best_path_return(env: &Environment, spec: &GridWorldSpec) -> f64 {
        fn go(env: &Environment, state: usize, h: usize, horizon: usize) -> f64 {
            if h == horizon {
                return 0.0;
            }
            (0..4)
                .map(|a| {
                    let next = env
                        .mdp
                        .transitions()
                        .slice(ndarray::s![h, state, a, ..])
                        .iter()
                        .position(|p| *p == 1.0)
                        .unwrap();
                    env.mdp.rewards()[[h, state, a]] + go(env, next, h + 1, horizon)
                })
                .fold(f64::NEG_INFINITY, f64::max)
        }
        go(env, spec.state_index(spec.start), 0, spec.horizon)
    }

    #[test]
    fn grid_world_optimal_value_matches_enumeration() {
        let spec = GridWorldSpec::default();
        let env = grid_world(&spec).unwrap();
        let brute = best_path_return(&env, &spec);
        assert_eq!(brute, 1.0);
        let (pi, _) = optimal_policy(&env.mdp);
        let exact = evaluate_policy_exact(&env.mdp, &pi).unwrap();
        assert_abs_diff_eq!(exact.initial_value(env.mdp.initial_distribution()), brute, epsilon = 1e-12);
    }

    #[test]
    fn grid_world_validation_and_uniform_start() {
        let base = GridWorldSpec::default();
        assert!(grid_world(&GridWorldSpec { goal: (1, 1), ..base }).is_err());
        assert!(grid_world(&GridWorldSpec { start: (9, 1), ..base }).is_err());
        let env = grid_world(&GridWorldSpec { start_distribution: StartDistribution::Uniform, ..base }).unwrap();
        assert_abs_diff_eq!(env.mdp.initial_distribution()[5], 1.0 / 24.0, epsilon = 1e-15);
    }

    #[test]
    fn gridworld_policy_family() {
        let spec = GridWorldSpec::default();
        let b = gridworld_behavior_policy(&spec).unwrap();
        assert_abs_diff_eq!(b.action_probs(1, 0).sum(), 1.0, epsilon = 1e-15);
        assert_eq!(
            gridworld_eval_policy(&spec, 0.55).unwrap().action_probs(1, 0).to_vec(),
            vec![0.25, 0.20, 0.0, 0.55]
        );
        let p = gridworld_eval_policy(&spec, 0.10).unwrap();
        assert_abs_diff_eq!(p.action_probs(3, 7)[2], 0.45, epsilon = 1e-15);
        assert!(gridworld_eval_policy(&spec, 0.56).is_err());
    }
}
