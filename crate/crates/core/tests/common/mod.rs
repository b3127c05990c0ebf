#![allow(dead_code)]

use ndarray::{Array1, Array3, Array4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use selprop::{Policy, TabularMDP};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random nonnegative weights normalised to one, with roughly a third of the entries zeroed.
pub fn random_simplex<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let mut w: Vec<f64> = (0..n).map(|_| if rng.random::<f64>() < 0.33 { 0.0 } else { rng.random::<f64>() }).collect();
    if w.iter().all(|v| *v == 0.0) {
        w[rng.random_range(0..n)] = 1.0;
    }
    let total: f64 = w.iter().sum();
    w.iter().map(|v| v / total).collect()
}

pub fn random_mdp<R: Rng>(rng: &mut R, horizon: usize, states: usize, actions: usize) -> TabularMDP {
    let rewards = Array3::from_shape_fn((horizon, states, actions), |_| rng.random::<f64>());
    let mut transitions = Array4::zeros((horizon, states, actions, states));
    for h in 0..horizon {
        for x in 0..states {
            for a in 0..actions {
                for (n, p) in random_simplex(rng, states).into_iter().enumerate() {
                    transitions[[h, x, a, n]] = p;
                }
            }
        }
    }
    let initial = Array1::from(random_simplex(rng, states));
    TabularMDP::new(rewards, transitions, initial).unwrap()
}

/// Fully supported random policy (every action has positive probability).
pub fn random_policy<R: Rng>(rng: &mut R, horizon: usize, states: usize, actions: usize) -> Policy {
    let mut probs = Array3::from_shape_fn((horizon, states, actions), |_| 0.05 + rng.random::<f64>());
    for h in 0..horizon {
        for x in 0..states {
            let total: f64 = (0..actions).map(|a| probs[[h, x, a]]).sum();
            for a in 0..actions {
                probs[[h, x, a]] /= total;
            }
        }
    }
    Policy::new(probs).unwrap()
}

/// Expected return by explicit enumeration of every state-action path.
pub fn enumerate_return(mdp: &TabularMDP, probs: &Array3<f64>) -> f64 {
    fn walk(mdp: &TabularMDP, probs: &Array3<f64>, h: usize, x: usize) -> f64 {
        if h == mdp.horizon() {
            return 0.0;
        }
        let mut total = 0.0;
        for a in 0..mdp.num_actions() {
            let pa = probs[[h, x, a]];
            if pa == 0.0 {
                continue;
            }
            let mut future = 0.0;
            for n in 0..mdp.num_states() {
                let pn = mdp.transitions()[[h, x, a, n]];
                if pn > 0.0 {
                    future += pn * walk(mdp, probs, h + 1, n);
                }
            }
            total += pa * (mdp.rewards()[[h, x, a]] + future);
        }
        total
    }
    (0..mdp.num_states())
        .map(|x| {
            let p0 = mdp.initial_distribution()[x];
            if p0 == 0.0 {
                0.0
            } else {
                p0 * walk(mdp, probs, 0, x)
            }
        })
        .sum()
}

/// Behavioral rows before 1-based `step`, evaluation rows from `step` on.
pub fn manual_splice(pi_b: &Policy, pi: &Policy, step: usize) -> Array3<f64> {
    let mut probs = pi.probs().clone();
    for h in 0..step.saturating_sub(1).min(pi.horizon()) {
        probs.index_axis_mut(ndarray::Axis(0), h).assign(&pi_b.probs().index_axis(ndarray::Axis(0), h));
    }
    probs
}

/// Per-step effect through whole-episode returns of the two spliced policies.
pub fn enumerate_alpha(mdp: &TabularMDP, pi: &Policy, pi_b: &Policy, step: usize) -> f64 {
    enumerate_return(mdp, &manual_splice(pi_b, pi, step)) - enumerate_return(mdp, &manual_splice(pi_b, pi, step + 1))
}
