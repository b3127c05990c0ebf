//! Python bindings for `selprop`. Arrays cross the boundary as float64/int64 numpy arrays and
//! steps stay 1-based.

use numpy::{
    IntoPyArray, PyArray1, PyArray2, PyArray3, PyArray4, PyReadonlyArray1, PyReadonlyArray2, PyReadonlyArray3,
    PyReadonlyArray4,
};
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use selprop_core::harness::{self, ExperimentConfig, ExperimentId, ResultRow, Task};
use selprop_core::{format, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Io(io) => PyIOError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait OrPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> OrPy<T> for selprop_core::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(err)
    }
}

#[pyclass(name = "TabularMDP", module = "selprop", frozen)]
#[derive(Clone)]
struct PyMdp(selprop_core::TabularMDP);

#[pymethods]
impl PyMdp {
    /// `rewards [H, X, A]`, `transitions [H, X, A, X]`, `initial [X]`.
    #[new]
    fn new(
        rewards: PyReadonlyArray3<'_, f64>,
        transitions: PyReadonlyArray4<'_, f64>,
        initial: PyReadonlyArray1<'_, f64>,
    ) -> PyResult<Self> {
        selprop_core::TabularMDP::new(
            rewards.as_array().to_owned(),
            transitions.as_array().to_owned(),
            initial.as_array().to_owned(),
        )
        .py_err()
        .map(Self)
    }

    #[getter]
    fn horizon(&self) -> usize {
        self.0.horizon()
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.0.num_states()
    }

    #[getter]
    fn num_actions(&self) -> usize {
        self.0.num_actions()
    }

    #[getter]
    fn rewards<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray3<f64>> {
        self.0.rewards().clone().into_pyarray(py)
    }

    #[getter]
    fn transitions<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray4<f64>> {
        self.0.transitions().clone().into_pyarray(py)
    }

    #[getter]
    fn initial<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        self.0.initial_distribution().clone().into_pyarray(py)
    }

    fn policy_value(&self, pi: &PyPolicy) -> PyResult<f64> {
        self.0.policy_value(&pi.0).py_err()
    }

    fn to_json(&self) -> PyResult<String> {
        format::to_json(&self.0).py_err()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        format::from_json(text).py_err().map(Self)
    }

    fn __repr__(&self) -> String {
        let (h, x, a) = self.0.shape();
        format!("TabularMDP(H={h}, X={x}, A={a})")
    }
}

#[pyclass(name = "Policy", module = "selprop", frozen)]
#[derive(Clone)]
struct PyPolicy(selprop_core::Policy);

#[pymethods]
impl PyPolicy {
    /// `probs [H, X, A]`, each row a distribution over actions.
    #[new]
    fn new(probs: PyReadonlyArray3<'_, f64>) -> PyResult<Self> {
        selprop_core::Policy::new(probs.as_array().to_owned()).py_err().map(Self)
    }

    #[staticmethod]
    fn stationary(horizon: usize, num_states: usize, action_probs: Vec<f64>) -> PyResult<Self> {
        selprop_core::Policy::stationary(horizon, num_states, &action_probs).py_err().map(Self)
    }

    /// `actions [H, X]` of action indices.
    #[staticmethod]
    fn deterministic(actions: PyReadonlyArray2<'_, i64>, num_actions: usize) -> PyResult<Self> {
        let actions = actions.as_array();
        if actions.iter().any(|&a| a < 0) {
            return Err(PyValueError::new_err("negative action index"));
        }
        let actions = actions.mapv(|a| a as usize);
        selprop_core::Policy::deterministic(&actions, num_actions).py_err().map(Self)
    }

    #[getter]
    fn probs<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray3<f64>> {
        self.0.probs().clone().into_pyarray(py)
    }

    #[getter]
    fn shape(&self) -> (usize, usize, usize) {
        self.0.shape()
    }

    fn is_deterministic(&self) -> bool {
        self.0.is_deterministic()
    }

    fn to_json(&self) -> PyResult<String> {
        format::to_json(&self.0).py_err()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        format::from_json(text).py_err().map(Self)
    }

    fn __repr__(&self) -> String {
        let (h, x, a) = self.0.shape();
        format!("Policy(H={h}, X={x}, A={a})")
    }
}

type TrajectoryArrays<'py> = (Bound<'py, PyArray2<i64>>, Bound<'py, PyArray2<i64>>, Bound<'py, PyArray2<f64>>);

#[pyclass(name = "Dataset", module = "selprop", frozen)]
#[derive(Clone)]
struct PyDataset(selprop_core::Dataset);

#[pymethods]
impl PyDataset {
    fn __len__(&self) -> usize {
        self.0.len()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed()
    }

    #[getter]
    fn behavior(&self) -> PyPolicy {
        PyPolicy(self.0.behavior().clone())
    }

    /// `(states, actions, rewards)`, each `[T, H]`.
    fn arrays<'py>(&self, py: Python<'py>) -> TrajectoryArrays<'py> {
        let shape = (self.0.len(), self.0.horizon());
        let at = |t: usize, h: usize| self.0.trajectories()[t].steps[h];
        let states = numpy::ndarray::Array2::from_shape_fn(shape, |(t, h)| at(t, h).state as i64);
        let actions = numpy::ndarray::Array2::from_shape_fn(shape, |(t, h)| at(t, h).action as i64);
        let rewards = numpy::ndarray::Array2::from_shape_fn(shape, |(t, h)| at(t, h).reward);
        (states.into_pyarray(py), actions.into_pyarray(py), rewards.into_pyarray(py))
    }

    fn split_holdout(&self, fraction: f64) -> PyResult<(PyDataset, PyDataset)> {
        let (fit, holdout) = self.0.split_holdout(fraction).py_err()?;
        Ok((Self(fit), Self(holdout)))
    }

    fn to_json(&self) -> PyResult<String> {
        format::to_json(&self.0).py_err()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        format::from_json(text).py_err().map(Self)
    }

    fn __repr__(&self) -> String {
        format!("Dataset(T={}, H={}, seed={})", self.0.len(), self.0.horizon(), self.0.seed())
    }
}

#[pyclass(name = "ModelEstimate", module = "selprop", frozen)]
#[derive(Clone)]
struct PyModel(selprop_core::ModelEstimate);

#[pymethods]
impl PyModel {
    /// The true model of `mdp` with infinite counts.
    #[staticmethod]
    #[pyo3(signature = (mdp, delta=0.05))]
    fn exact(mdp: &PyMdp, delta: f64) -> PyResult<Self> {
        selprop_core::ModelEstimate::exact(&mdp.0, delta).py_err().map(Self)
    }

    #[getter]
    fn rewards<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray3<f64>> {
        self.0.rewards().clone().into_pyarray(py)
    }

    #[getter]
    fn transitions<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray4<f64>> {
        self.0.transitions().clone().into_pyarray(py)
    }

    #[getter]
    fn counts<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray3<u64>> {
        self.0.counts().clone().into_pyarray(py)
    }

    #[getter]
    fn vmax<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        self.0.vmax().into_pyarray(py)
    }

    #[getter]
    fn pooled(&self) -> bool {
        self.0.is_pooled()
    }

    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta()
    }

    fn to_json(&self) -> PyResult<String> {
        format::to_json(&self.0).py_err()
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        format::from_json(text).py_err().map(Self)
    }
}

#[pyclass(name = "BonusTable", module = "selprop", frozen)]
#[derive(Clone)]
struct PyBonuses(selprop_core::BonusTable);

#[pymethods]
impl PyBonuses {
    #[new]
    fn new(values: PyReadonlyArray3<'_, f64>) -> PyResult<Self> {
        selprop_core::BonusTable::new(values.as_array().to_owned()).py_err().map(Self)
    }

    #[staticmethod]
    fn zeros(horizon: usize, num_states: usize, num_actions: usize) -> Self {
        Self(selprop_core::BonusTable::zeros((horizon, num_states, num_actions)))
    }

    #[getter]
    fn values<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray3<f64>> {
        self.0.values().clone().into_pyarray(py)
    }

    fn scaled(&self, factor: f64) -> PyResult<Self> {
        self.0.scaled(factor).py_err().map(Self)
    }
}

#[pyclass(name = "ShiftEstimate", module = "selprop", frozen)]
#[derive(Clone)]
struct PyShift(selprop_core::ShiftEstimate);

#[pymethods]
impl PyShift {
    /// `shift [H, X, A, X]` with `Delta_hat(x' | x, a)` at each step.
    #[new]
    #[pyo3(signature = (shift, kappa_delta=0.0))]
    fn new(shift: PyReadonlyArray4<'_, f64>, kappa_delta: f64) -> PyResult<Self> {
        selprop_core::ShiftEstimate::new(shift.as_array().to_owned(), kappa_delta).py_err().map(Self)
    }

    #[getter]
    fn shift<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray4<f64>> {
        self.0.shift().clone().into_pyarray(py)
    }

    #[getter]
    fn kappa_delta(&self) -> f64 {
        self.0.kappa_delta()
    }

    fn with_kappa(&self, kappa_delta: f64) -> PyResult<Self> {
        self.0.clone().with_kappa(kappa_delta).py_err().map(Self)
    }

    fn max_l1(&self) -> f64 {
        self.0.max_l1()
    }
}

#[pyclass(name = "ValueTriple", module = "selprop", frozen)]
#[derive(Clone)]
struct PyTriple(selprop_core::ValueTriple);

#[pymethods]
impl PyTriple {
    /// `[H + 1, X]`; the last row is zero.
    #[getter]
    fn pessimistic<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray2<f64>> {
        self.0.pessimistic().clone().into_pyarray(py)
    }

    #[getter]
    fn value<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray2<f64>> {
        self.0.value().clone().into_pyarray(py)
    }

    #[getter]
    fn optimistic<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray2<f64>> {
        self.0.optimistic().clone().into_pyarray(py)
    }

    #[getter]
    fn vmax<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray1<f64>> {
        self.0.vmax().clone().into_pyarray(py)
    }

    fn gamma<'py>(&self, py: Python<'py>, step: usize) -> PyResult<Bound<'py, PyArray1<f64>>> {
        if step == 0 || step > self.0.horizon() + 1 {
            return Err(err(Error::StepOutOfRange { step, max: self.0.horizon() + 1 }));
        }
        Ok(self.0.gamma(step).into_pyarray(py))
    }

    #[pyo3(signature = (tolerance=1e-9))]
    fn is_ordered(&self, tolerance: f64) -> bool {
        self.0.is_ordered(tolerance)
    }
}

#[pyclass(name = "LearnedPolicy", module = "selprop", frozen)]
struct PyLearned(selprop_core::LearnedPolicy);

#[pymethods]
impl PyLearned {
    #[getter]
    fn policy(&self) -> PyPolicy {
        PyPolicy(self.0.policy.clone())
    }

    #[getter]
    fn actions<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray2<i64>> {
        self.0.actions.mapv(|a| a as i64).into_pyarray(py)
    }

    #[getter]
    fn values(&self) -> PyTriple {
        PyTriple(self.0.values.clone())
    }

    #[getter]
    fn scores<'py>(&self, py: Python<'py>) -> Bound<'py, PyArray3<f64>> {
        self.0.scores.clone().into_pyarray(py)
    }
}

#[pyclass(name = "IntervalEstimate", module = "selprop", frozen, get_all)]
#[derive(Clone)]
struct PyInterval {
    lower: f64,
    point: f64,
    upper: f64,
    method: String,
    step: usize,
    episodes: usize,
    delta: f64,
}

impl From<selprop_core::IntervalEstimate> for PyInterval {
    fn from(ci: selprop_core::IntervalEstimate) -> Self {
        Self {
            lower: ci.lower,
            point: ci.point,
            upper: ci.upper,
            method: ci.method.to_string(),
            step: ci.step,
            episodes: ci.episodes,
            delta: ci.delta,
        }
    }
}

#[pymethods]
impl PyInterval {
    fn width(&self) -> f64 {
        self.upper - self.lower
    }

    fn contains(&self, value: f64) -> bool {
        self.lower <= value && value <= self.upper
    }

    fn __repr__(&self) -> String {
        format!(
            "IntervalEstimate(method={}, step={}, lower={}, point={}, upper={})",
            self.method, self.step, self.lower, self.point, self.upper
        )
    }
}

#[pyfunction]
#[pyo3(signature = (length=3, top_keep=0.5, top_drop=0.9, bottom=0.1))]
fn chain_bandit(length: usize, top_keep: f64, top_drop: f64, bottom: f64) -> PyResult<(PyMdp, PyPolicy)> {
    let spec = selprop_core::ChainBanditSpec { length, top_keep, top_drop, bottom };
    let env = selprop_core::chain_bandit(&spec).py_err()?;
    Ok((PyMdp(env.mdp), PyPolicy(selprop_core::chainbandit_behavior_policy(&spec).py_err()?)))
}

#[pyfunction]
#[pyo3(signature = (lam, length=3))]
fn chainbandit_eval_policy(lam: f64, length: usize) -> PyResult<PyPolicy> {
    selprop_core::chainbandit_eval_policy(&selprop_core::ChainBanditSpec::with_length(length), lam)
        .py_err()
        .map(PyPolicy)
}

fn grid_spec(uniform_start: bool) -> selprop_core::GridWorldSpec {
    selprop_core::GridWorldSpec {
        start_distribution: if uniform_start {
            selprop_core::StartDistribution::Uniform
        } else {
            selprop_core::StartDistribution::Fixed
        },
        ..Default::default()
    }
}

/// The default 8 x 3 grid and its behavioral policy.
#[pyfunction]
#[pyo3(signature = (uniform_start=false))]
fn grid_world(uniform_start: bool) -> PyResult<(PyMdp, PyPolicy)> {
    let spec = grid_spec(uniform_start);
    let env = selprop_core::grid_world(&spec).py_err()?;
    Ok((PyMdp(env.mdp), PyPolicy(selprop_core::gridworld_behavior_policy(&spec).py_err()?)))
}

#[pyfunction]
#[pyo3(signature = (lam, uniform_start=false))]
fn gridworld_eval_policy(lam: f64, uniform_start: bool) -> PyResult<PyPolicy> {
    selprop_core::gridworld_eval_policy(&grid_spec(uniform_start), lam).py_err().map(PyPolicy)
}

#[pyfunction]
fn sample_trajectories(py: Python<'_>, mdp: &PyMdp, pi: &PyPolicy, episodes: usize, seed: u64) -> PyResult<PyDataset> {
    py.detach(|| selprop_core::sample_trajectories(&mdp.0, &pi.0, episodes, seed)).py_err().map(PyDataset)
}

#[pyfunction]
#[pyo3(signature = (dataset, pooled=true, delta=0.05))]
fn fit_tabular_model(dataset: &PyDataset, pooled: bool, delta: f64) -> PyResult<PyModel> {
    selprop_core::fit_tabular_model(&dataset.0, pooled, delta).py_err().map(PyModel)
}

#[pyfunction]
#[pyo3(signature = (model, beta=1.0))]
fn compute_bonuses(model: &PyModel, beta: f64) -> PyResult<PyBonuses> {
    selprop_core::compute_bonuses(&model.0, beta).py_err().map(PyBonuses)
}

#[pyfunction]
fn induced_shift(model: &PyModel, pi_b: &PyPolicy) -> PyResult<PyShift> {
    selprop_core::induced_shift(&model.0, &pi_b.0).py_err().map(PyShift)
}

/// Exact values `[H + 1, X]`.
#[pyfunction]
fn evaluate_policy_exact<'py>(py: Python<'py>, mdp: &PyMdp, pi: &PyPolicy) -> PyResult<Bound<'py, PyArray2<f64>>> {
    Ok(selprop_core::evaluate_policy_exact(&mdp.0, &pi.0).py_err()?.values().clone().into_pyarray(py))
}

#[pyfunction]
fn optimal_policy<'py>(py: Python<'py>, mdp: &PyMdp) -> (PyPolicy, Bound<'py, PyArray2<f64>>) {
    let (pi, values) = selprop_core::optimal_policy(&mdp.0);
    (PyPolicy(pi), values.values().clone().into_pyarray(py))
}

/// Probability of each state at each step, `[H, X]`.
#[pyfunction]
fn state_occupancy<'py>(py: Python<'py>, mdp: &PyMdp, pi: &PyPolicy) -> PyResult<Bound<'py, PyArray2<f64>>> {
    Ok(selprop_core::state_occupancy(&mdp.0, &pi.0).py_err()?.into_pyarray(py))
}

#[pyfunction]
fn splice_policies(pi_b: &PyPolicy, pi: &PyPolicy, step: usize) -> PyResult<PyPolicy> {
    selprop_core::splice_policies(&pi_b.0, &pi.0, step).py_err().map(PyPolicy)
}

#[pyfunction]
fn alpha_true(mdp: &PyMdp, pi: &PyPolicy, pi_b: &PyPolicy, step: usize) -> PyResult<f64> {
    selprop_core::alpha_true(&mdp.0, &pi.0, &pi_b.0, step).py_err()
}

#[pyfunction]
fn evaluate_policy_pess_opt(model: &PyModel, bonuses: &PyBonuses, pi: &PyPolicy) -> PyResult<PyTriple> {
    selprop_core::evaluate_policy_pess_opt(&model.0, &bonuses.0, &pi.0).py_err().map(PyTriple)
}

#[pyfunction]
fn pvi(model: &PyModel, bonuses: &PyBonuses) -> PyResult<PyLearned> {
    selprop_core::pvi(&model.0, &bonuses.0).py_err().map(PyLearned)
}

#[pyfunction]
fn spvi(model: &PyModel, bonuses: &PyBonuses, pi_b: &PyPolicy) -> PyResult<PyLearned> {
    selprop_core::spvi(&model.0, &bonuses.0, &pi_b.0).py_err().map(PyLearned)
}

#[pyfunction]
fn psl(model: &PyModel, bonuses: &PyBonuses) -> PyResult<PyLearned> {
    selprop_core::psl(&model.0, &bonuses.0).py_err().map(PyLearned)
}

#[pyfunction]
fn standard_ci(
    model: &PyModel,
    bonuses: &PyBonuses,
    pi: &PyPolicy,
    pi_b: &PyPolicy,
    step: usize,
    holdout: &PyDataset,
) -> PyResult<PyInterval> {
    selprop_core::standard_ci(&model.0, &bonuses.0, &pi.0, &pi_b.0, step, &holdout.0).py_err().map(Into::into)
}

#[pyfunction]
fn selective_ci(
    model: &PyModel,
    bonuses: &PyBonuses,
    pi: &PyPolicy,
    pi_b: &PyPolicy,
    step: usize,
    holdout: &PyDataset,
) -> PyResult<PyInterval> {
    selprop_core::selective_ci(&model.0, &bonuses.0, &pi.0, &pi_b.0, step, &holdout.0).py_err().map(Into::into)
}

/// Shift-weighted combiner. Returns the interval and a dict with the four radius terms.
#[pyfunction]
#[pyo3(signature = (theta_hat, kappa_theta, triple, shift, holdout, pi, step, delta=0.05, delta_in=0.0))]
#[allow(clippy::too_many_arguments)]
fn theorem1_estimate<'py>(
    py: Python<'py>,
    theta_hat: f64,
    kappa_theta: f64,
    triple: &PyTriple,
    shift: &PyShift,
    holdout: &PyDataset,
    pi: &PyPolicy,
    step: usize,
    delta: f64,
    delta_in: f64,
) -> PyResult<(PyInterval, Bound<'py, PyDict>)> {
    let inputs = selprop_core::Theorem1Inputs::from_estimates(
        theta_hat,
        kappa_theta,
        &triple.0,
        &shift.0,
        step,
        delta,
        delta_in,
    )
    .py_err()?;
    let est = selprop_core::theorem1_estimate(&inputs, &holdout.0, &pi.0, step).py_err()?;
    let radius = PyDict::new(py);
    radius.set_item("bandit", est.radius.bandit)?;
    radius.set_item("shift_error", est.radius.shift_error)?;
    radius.set_item("sampling", est.radius.sampling)?;
    radius.set_item("propagation", est.radius.propagation)?;
    Ok((est.interval.into(), radius))
}

fn row_dict<'py>(py: Python<'py>, row: &ResultRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("experiment", row.experiment.as_str())?;
    d.set_item("seed", row.seed)?;
    d.set_item("method", row.method.as_str())?;
    d.set_item("h", row.step)?;
    d.set_item("lambda", row.lambda)?;
    d.set_item("T", row.episodes)?;
    d.set_item("lower", row.lower)?;
    d.set_item("point", row.point)?;
    d.set_item("upper", row.upper)?;
    d.set_item("alpha_true", row.alpha_true)?;
    d.set_item("policy_value", row.policy_value)?;
    Ok(d)
}

/// Runs a preset (`experiment`) or a TOML config (`config`, file contents) and returns the
/// CSV rows as dicts; also writes them to `out` when given.
#[pyfunction]
#[pyo3(signature = (experiment=None, config=None, seed=None, episodes=None, out=None))]
fn run_experiment<'py>(
    py: Python<'py>,
    experiment: Option<&str>,
    config: Option<&str>,
    seed: Option<u64>,
    episodes: Option<usize>,
    out: Option<std::path::PathBuf>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let mut cfg = match (experiment, config) {
        (Some(_), Some(_)) => return Err(PyValueError::new_err("pass either experiment or config, not both")),
        (None, None) => return Err(PyValueError::new_err("pass experiment or config")),
        (Some(id), None) => ExperimentConfig::preset(id.parse::<ExperimentId>().py_err()?).py_err()?,
        (None, Some(text)) => ExperimentConfig::from_toml_str(text).py_err()?,
    };
    if let Some(seed) = seed {
        cfg.master_seed = seed;
    }
    if let Some(episodes) = episodes {
        match cfg.task {
            Task::Ci => cfg.episodes = episodes,
            Task::Learn => cfg.episode_grid = vec![episodes],
        }
    }
    cfg.validate().py_err()?;
    let rows = py.detach(|| harness::run_experiment(&cfg)).py_err()?;
    if let Some(path) = out {
        harness::emit_csv(&rows, path).py_err()?;
    }
    rows.iter().map(|r| row_dict(py, r)).collect()
}

#[pymodule(name = "selprop")]
fn selprop_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyMdp>()?;
    m.add_class::<PyPolicy>()?;
    m.add_class::<PyDataset>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyBonuses>()?;
    m.add_class::<PyShift>()?;
    m.add_class::<PyTriple>()?;
    m.add_class::<PyLearned>()?;
    m.add_class::<PyInterval>()?;
    m.add_function(wrap_pyfunction!(chain_bandit, m)?)?;
    m.add_function(wrap_pyfunction!(chainbandit_eval_policy, m)?)?;
    m.add_function(wrap_pyfunction!(grid_world, m)?)?;
    m.add_function(wrap_pyfunction!(gridworld_eval_policy, m)?)?;
    m.add_function(wrap_pyfunction!(sample_trajectories, m)?)?;
    m.add_function(wrap_pyfunction!(fit_tabular_model, m)?)?;
    m.add_function(wrap_pyfunction!(compute_bonuses, m)?)?;
    m.add_function(wrap_pyfunction!(induced_shift, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_policy_exact, m)?)?;
    m.add_function(wrap_pyfunction!(optimal_policy, m)?)?;
    m.add_function(wrap_pyfunction!(state_occupancy, m)?)?;
    m.add_function(wrap_pyfunction!(splice_policies, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_true, m)?)?;
    m.add_function(wrap_pyfunction!(evaluate_policy_pess_opt, m)?)?;
    m.add_function(wrap_pyfunction!(pvi, m)?)?;
    m.add_function(wrap_pyfunction!(spvi, m)?)?;
    m.add_function(wrap_pyfunction!(psl, m)?)?;
    m.add_function(wrap_pyfunction!(standard_ci, m)?)?;
    m.add_function(wrap_pyfunction!(selective_ci, m)?)?;
    m.add_function(wrap_pyfunction!(theorem1_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    m.add("CSV_HEADER", harness::CSV_HEADER)?;
    Ok(())
}
