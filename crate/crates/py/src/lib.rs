//! Python bindings: states, tangle and invariants, canonicalization, noisy
//! sampling and the experiment drivers.

use pyo3::exceptions::{PyArithmeticError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use tangle_core::canonical::{self, CanonicalizationPolicy, CostMode};
use tangle_core::experiment::{self, ExperimentConfig, PostSelection, ResultRow, SummaryRow};
use tangle_core::noise::{self, NoiseConfig, ShotHistogram};
use tangle_core::streams::seeded_rng;
use tangle_core::{entanglement, state, Complex, Error, LocalUnitaryParams, OptimizerOptions};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Parse(_) | Error::NotCanonical { .. } => {
            PyValueError::new_err(e.to_string())
        }
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyArithmeticError::new_err(e.to_string()),
    }
}

fn params(x: Vec<f64>) -> PyResult<LocalUnitaryParams> {
    LocalUnitaryParams::from_slice(&x).map_err(py_err)
}

fn amplitudes<const N: usize>(v: Vec<Complex>) -> PyResult<[Complex; N]> {
    let n = v.len();
    v.try_into()
        .map_err(|_| PyValueError::new_err(format!("expected {N} amplitudes, got {n}")))
}

/// Normalized three-qubit pure state; amplitude index is `4a + 2b + c`.
#[pyclass(name = "PureState3", module = "tangle3", frozen, eq, skip_from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyState(state::PureState3);

#[pymethods]
impl PyState {
    /// Strict constructor: the norm must already be 1 within 1e-6 unless
    /// `normalize` is set.
    #[new]
    #[pyo3(signature = (amplitudes, normalize = false))]
    fn new(amplitudes: Vec<Complex>, normalize: bool) -> PyResult<Self> {
        let a = self::amplitudes(amplitudes)?;
        let s = if normalize {
            state::PureState3::from_unnormalized(a)
        } else {
            state::PureState3::new(a)
        };
        s.map(PyState).map_err(py_err)
    }

    #[staticmethod]
    fn ghz() -> Self {
        PyState(state::PureState3::ghz())
    }

    #[staticmethod]
    fn w() -> Self {
        PyState(state::PureState3::w())
    }

    #[staticmethod]
    fn basis(index: usize) -> PyResult<Self> {
        state::PureState3::basis(index).map(PyState).map_err(py_err)
    }

    /// Box-uniform random draw, as used by the experiments.
    #[staticmethod]
    fn random(seed: u64) -> Self {
        PyState(experiment::random_state(&mut seeded_rng(seed)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        state::PureState3::from_json(text).map(PyState).map_err(py_err)
    }

    #[allow(clippy::wrong_self_convention)]
    fn to_json(&self) -> String {
        self.0.to_json()
    }

    #[getter]
    fn amplitudes(&self) -> Vec<Complex> {
        self.0.amplitudes().to_vec()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn probabilities(&self) -> Vec<f64> {
        state::outcome_probabilities(&self.0).to_vec()
    }

    fn tangle(&self) -> f64 {
        entanglement::tangle(&self.0)
    }

    fn hyperdeterminant(&self) -> Complex {
        entanglement::hyperdeterminant(&self.0)
    }

    /// The five local-unitary invariants `(I1, ..., I5)`.
    fn invariants(&self) -> [f64; 5] {
        entanglement::invariants_from_state(&self.0).as_array()
    }

    /// Purity of the reduced state on `"A"`, `"B"`, `"C"`, `"AB"`, `"AC"` or `"BC"`.
    fn purity(&self, subsystem: &str) -> PyResult<f64> {
        let sub: state::Subsystem = subsystem.parse().map_err(py_err)?;
        Ok(state::reduced_density_matrix(&self.0, sub).purity())
    }

    /// Applies `U(θA) ⊗ U(θB) ⊗ U(θC)` given nine angles.
    fn apply_local_unitaries(&self, angles: Vec<f64>) -> PyResult<Self> {
        Ok(PyState(state::apply_local_unitaries(&self.0, &params(angles)?)))
    }

    /// `(lambda, phi)` of a state already in canonical form.
    fn canonical_coefficients(&self) -> PyResult<([f64; 5], f64)> {
        let c = entanglement::extract_canonical_coefficients(&self.0).map_err(py_err)?;
        Ok((c.lambda(), c.phi()))
    }

    fn approx_eq_up_to_phase(&self, other: &PyState, tol: f64) -> bool {
        self.0.approx_eq_up_to_phase(&other.0, tol)
    }

    fn __repr__(&self) -> String {
        format!("PureState3({})", self.0.to_json())
    }
}

#[pyclass(name = "CanonicalizationOutcome", module = "tangle3", frozen, get_all)]
struct PyOutcome {
    params: [f64; 9],
    final_cost: f64,
    attempts_used: usize,
    accepted: bool,
    canonical_state: PyState,
    evaluations: usize,
    iterations: usize,
}

#[pymethods]
impl PyOutcome {
    fn __repr__(&self) -> String {
        format!(
            "CanonicalizationOutcome(final_cost={:e}, attempts_used={}, accepted={}, evaluations={})",
            self.final_cost, self.attempts_used, self.accepted, self.evaluations
        )
    }
}

#[pyfunction]
fn tangle(state: &PyState) -> f64 {
    entanglement::tangle(&state.0)
}

/// `2|t00 t11 − t01 t10|` of a normalized two-qubit state.
#[pyfunction]
fn concurrence(amplitudes: Vec<Complex>) -> PyResult<f64> {
    Ok(entanglement::concurrence(&self::amplitudes(amplitudes)?))
}

/// Invariants of the canonical form with coefficients `lambda` and phase `phi`.
#[pyfunction]
fn invariants_from_canonical(lambda: [f64; 5], phi: f64) -> PyResult<[f64; 5]> {
    let c = entanglement::CanonicalCoefficients::new(lambda, phi).map_err(py_err)?;
    Ok(entanglement::invariants_from_canonical(&c).as_array())
}

/// Probability mass on `|001>, |010>, |011>` after the nine-angle circuit.
#[pyfunction]
fn cost(state: &PyState, angles: Vec<f64>) -> PyResult<f64> {
    Ok(canonical::cost(&state.0, &params(angles)?))
}

/// Variational canonicalization with the acceptance policy for noise level `t`.
#[pyfunction]
#[pyo3(signature = (state, t = 0, cost_mode = "exact", max_attempts = 5, train_under_noise = true, threshold = None, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn canonicalize(
    py: Python<'_>,
    state: &PyState,
    t: u32,
    cost_mode: &str,
    max_attempts: usize,
    train_under_noise: bool,
    threshold: Option<f64>,
    seed: u64,
) -> PyResult<PyOutcome> {
    let mut policy = CanonicalizationPolicy::for_noise_level(t).map_err(py_err)?;
    policy.cost_mode = cost_mode.parse::<CostMode>().map_err(py_err)?;
    policy.max_attempts = max_attempts;
    if !train_under_noise {
        policy.training_noise = None;
    }
    if let Some(th) = threshold {
        policy.cost_threshold = th;
    }
    let s = state.0;
    let out = py
        .detach(|| {
            canonical::canonicalize(&s, &policy, &OptimizerOptions::default(), &mut seeded_rng(seed))
        })
        .map_err(py_err)?;
    Ok(PyOutcome {
        params: out.params.to_array(),
        final_cost: out.final_cost,
        attempts_used: out.attempts_used,
        accepted: out.accepted,
        canonical_state: PyState(out.canonical_state),
        evaluations: out.evaluations,
        iterations: out.iterations,
    })
}

/// Histogram of `shots` noisy measurements at noise level `t`, indexed by outcome.
#[pyfunction]
#[pyo3(signature = (state, shots, t = 0, seed = 0))]
fn sample_shots(state: &PyState, shots: u64, t: u32, seed: u64) -> PyResult<[u64; 8]> {
    let noise = NoiseConfig::from_level(t).map_err(py_err)?;
    Ok(*noise::sample_shots(&state.0, shots, &noise, &mut seeded_rng(seed)).counts())
}

/// Exact outcome distribution after the error circuit at noise level `t`.
#[pyfunction]
fn noisy_probabilities(state: &PyState, t: u32) -> PyResult<[f64; 8]> {
    let noise = NoiseConfig::from_level(t).map_err(py_err)?;
    Ok(noise::noisy_outcome_probabilities(&state.0, &noise))
}

/// `(tau_hat, sigma_tau, discard_fraction)` from outcome counts.
#[pyfunction]
#[pyo3(signature = (counts, post_select = false))]
fn estimate_tangle(counts: [u64; 8], post_select: bool) -> PyResult<(f64, f64, f64)> {
    let mut h = ShotHistogram::from_counts(counts);
    if post_select {
        h = noise::post_select(&h);
    }
    let e = noise::estimate_tangle(&h).map_err(py_err)?;
    Ok((e.tau_hat, e.sigma_tau, e.discard_fraction))
}

/// Probabilities of exactly 0, 1, 2 and at least 3 error events at level `t`.
#[pyfunction]
fn error_event_probabilities(py: Python<'_>, t: u32) -> PyResult<Bound<'_, PyDict>> {
    let e = noise::error_event_probabilities(&NoiseConfig::from_level(t).map_err(py_err)?);
    let d = PyDict::new(py);
    d.set_item("p0", e.p0)?;
    d.set_item("p1", e.p1)?;
    d.set_item("p2", e.p2)?;
    d.set_item("p3plus", e.p3plus)?;
    d.set_item("at_least_one", e.at_least_one())?;
    Ok(d)
}

fn result_dict<'py>(py: Python<'py>, r: &ResultRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("state_id", r.state_id)?;
    d.set_item("t", r.t)?;
    d.set_item("repetition", r.repetition)?;
    d.set_item("post_selected", r.post_selected)?;
    d.set_item("tau_exact", r.tau_exact)?;
    d.set_item("tau_estimate", r.tau_estimate)?;
    d.set_item("sigma_tau", r.sigma_tau)?;
    d.set_item("relative_error", r.relative_error)?;
    d.set_item("final_cost", r.final_cost)?;
    d.set_item("attempts_used", r.attempts_used)?;
    d.set_item("accepted", r.accepted)?;
    d.set_item("shots_kept", r.shots_kept)?;
    d.set_item("seed", r.seed)?;
    Ok(d)
}

fn summary_dict<'py>(py: Python<'py>, s: &SummaryRow) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", s.t)?;
    d.set_item("post_selected", s.post_selected)?;
    d.set_item("rows", s.rows)?;
    d.set_item("used", s.used)?;
    d.set_item("rejected", s.rejected)?;
    d.set_item("excluded_small_tangle", s.excluded_small_tangle)?;
    d.set_item("undefined", s.undefined)?;
    d.set_item("mean_relative_error", s.mean_relative_error)?;
    d.set_item("q15_relative_error", s.q15_relative_error)?;
    d.set_item("q85_relative_error", s.q85_relative_error)?;
    d.set_item("mean_tau_estimate", s.mean_tau_estimate)?;
    Ok(d)
}

/// Random-state sweep. Returns `(rows, summary)` as lists of dicts.
#[pyfunction]
#[pyo3(signature = (seed = 0, states = 200, shots = 10_000, reps = 10, t_values = vec![0, 1, 2, 3, 4, 5], post_select = "both", cost_mode = "exact", train_under_noise = true, threads = None))]
#[allow(clippy::too_many_arguments, clippy::type_complexity)]
fn sweep<'py>(
    py: Python<'py>,
    seed: u64,
    states: usize,
    shots: u64,
    reps: usize,
    t_values: Vec<u32>,
    post_select: &str,
    cost_mode: &str,
    train_under_noise: bool,
    threads: Option<usize>,
) -> PyResult<(Vec<Bound<'py, PyDict>>, Vec<Bound<'py, PyDict>>)> {
    let config = ExperimentConfig {
        master_seed: seed,
        n_states: states,
        shots,
        repetitions: reps,
        t_values,
        post_selection: post_select.parse::<PostSelection>().map_err(py_err)?,
        cost_mode: cost_mode.parse::<CostMode>().map_err(py_err)?,
        train_under_noise,
        threads,
        ..Default::default()
    };
    let rows = py.detach(|| experiment::run_random_sweep(&config)).map_err(py_err)?;
    let summary = experiment::summarize(&rows);
    Ok((
        rows.iter().map(|r| result_dict(py, r)).collect::<PyResult<_>>()?,
        summary.iter().map(|s| summary_dict(py, s)).collect::<PyResult<_>>()?,
    ))
}

/// `(tangles, concurrences)` of `samples` random three- and two-qubit draws.
#[pyfunction]
#[pyo3(signature = (samples, seed = 0))]
fn distribution(py: Python<'_>, samples: usize, seed: u64) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let config = ExperimentConfig { master_seed: seed, n_states: samples, ..Default::default() };
    let rows = py.detach(|| experiment::run_distribution(&config)).map_err(py_err)?;
    Ok(rows.iter().map(|r| (r.tangle, r.concurrence)).unzip())
}

#[pymodule]
fn tangle3(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyState>()?;
    m.add_class::<PyOutcome>()?;
    m.add_function(wrap_pyfunction!(tangle, m)?)?;
    m.add_function(wrap_pyfunction!(concurrence, m)?)?;
    m.add_function(wrap_pyfunction!(invariants_from_canonical, m)?)?;
    m.add_function(wrap_pyfunction!(cost, m)?)?;
    m.add_function(wrap_pyfunction!(canonicalize, m)?)?;
    m.add_function(wrap_pyfunction!(sample_shots, m)?)?;
    m.add_function(wrap_pyfunction!(noisy_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_tangle, m)?)?;
    m.add_function(wrap_pyfunction!(error_event_probabilities, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(distribution, m)?)?;
    Ok(())
}
