//! Python bindings for the `ofdm_lssvm` toolkit.
//!
//! Complex arrays cross the boundary as lists of Python `complex`.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyList;

use ofdm_lssvm::config::ConfigFile;
use ofdm_lssvm::estimators::{self, EstimatorKind, PilotEstimate};
use ofdm_lssvm::grid::{self, TimeSignal};
use ofdm_lssvm::harness::{results_csv, run_scenario, Scenario, SweepPoint};
use ofdm_lssvm::{channel, Error};

create_exception!(ofdm_lssvm_py, ConvergenceError, PyRuntimeError);

/// Maps toolkit errors onto Python exceptions.
pub fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Convergence(_) => ConvergenceError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        Error::Context { ref source, .. } if matches!(**source, Error::Convergence(_)) => {
            ConvergenceError::new_err(e.to_string())
        }
        Error::DegenerateEstimate | Error::DegenerateMeasurement(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn estimator(name: &str) -> PyResult<EstimatorKind> {
    name.parse().map_err(to_py_err)
}

#[pyclass(name = "OfdmParams", module = "ofdm_lssvm_py", from_py_object)]
#[derive(Clone)]
pub struct PyOfdmParams {
    pub inner: grid::OfdmParams,
}

#[pymethods]
impl PyOfdmParams {
    #[new]
    #[pyo3(signature = (n_fft=None, cp_len=None, delta_f_hz=None, symbols_per_frame=None, pilot_spacing=None, pilot_offset=None))]
    fn new(
        n_fft: Option<usize>,
        cp_len: Option<usize>,
        delta_f_hz: Option<f64>,
        symbols_per_frame: Option<usize>,
        pilot_spacing: Option<usize>,
        pilot_offset: Option<usize>,
    ) -> PyResult<Self> {
        let d = grid::OfdmParams::default();
        let inner = grid::OfdmParams {
            n_fft: n_fft.unwrap_or(d.n_fft),
            cp_len: cp_len.unwrap_or(d.cp_len),
            delta_f_hz: delta_f_hz.unwrap_or(d.delta_f_hz),
            symbols_per_frame: symbols_per_frame.unwrap_or(d.symbols_per_frame),
            pilot_spacing: pilot_spacing.unwrap_or(d.pilot_spacing),
            pilot_offset: pilot_offset.unwrap_or(d.pilot_offset),
            ..d
        };
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn n_fft(&self) -> usize {
        self.inner.n_fft
    }

    #[getter]
    fn cp_len(&self) -> usize {
        self.inner.cp_len
    }

    #[getter]
    fn pilot_spacing(&self) -> usize {
        self.inner.pilot_spacing
    }

    #[getter]
    fn sample_rate(&self) -> f64 {
        self.inner.sample_rate()
    }

    fn pilot_positions(&self) -> Vec<usize> {
        self.inner.pilot_positions()
    }

    fn data_positions(&self) -> Vec<usize> {
        self.inner.data_positions()
    }

    fn __repr__(&self) -> String {
        format!(
            "OfdmParams(n_fft={}, cp_len={}, pilot_spacing={})",
            self.inner.n_fft, self.inner.cp_len, self.inner.pilot_spacing
        )
    }
}

#[pyclass(name = "SvmHyper", module = "ofdm_lssvm_py", from_py_object)]
#[derive(Clone)]
pub struct PySvmHyper {
    pub inner: estimators::SvmHyper,
}

#[pymethods]
impl PySvmHyper {
    #[new]
    #[pyo3(signature = (epsilon=None, gamma=None, c=None, rbf_sigma=None, tol=None, max_iter=None))]
    fn new(
        epsilon: Option<f64>,
        gamma: Option<f64>,
        c: Option<f64>,
        rbf_sigma: Option<f64>,
        tol: Option<f64>,
        max_iter: Option<usize>,
    ) -> PyResult<Self> {
        let d = estimators::SvmHyper::default();
        let inner = estimators::SvmHyper {
            epsilon: epsilon.unwrap_or(d.epsilon),
            gamma: gamma.unwrap_or(d.gamma),
            c: c.unwrap_or(d.c),
            rbf_sigma: rbf_sigma.unwrap_or(d.rbf_sigma),
            tol: tol.unwrap_or(d.tol),
            max_iter: max_iter.unwrap_or(d.max_iter),
        };
        inner.validate().map_err(to_py_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn c(&self) -> f64 {
        self.inner.c
    }

    #[getter]
    fn rbf_sigma(&self) -> f64 {
        self.inner.rbf_sigma
    }

    /// Residual magnitude where the cost turns linear.
    #[getter]
    fn huber_knee(&self) -> f64 {
        self.inner.e_c()
    }

    fn __repr__(&self) -> String {
        let h = &self.inner;
        format!(
            "SvmHyper(epsilon={}, gamma={}, c={}, rbf_sigma={})",
            h.epsilon, h.gamma, h.c, h.rbf_sigma
        )
    }
}

/// Trained LS-SVM on one symbol's pilots.
#[pyclass(name = "DualSolution", module = "ofdm_lssvm_py")]
pub struct PyDualSolution {
    inner: estimators::DualSolution,
    positions: Vec<usize>,
    rbf_sigma: f64,
}

#[pymethods]
impl PyDualSolution {
    #[getter]
    fn psi(&self) -> Vec<Complex64> {
        self.inner.psi.clone()
    }

    #[getter]
    fn iterations(&self) -> usize {
        self.inner.iterations
    }

    #[getter]
    fn final_objective(&self) -> f64 {
        self.inner.final_objective
    }

    #[getter]
    fn residual(&self) -> f64 {
        self.inner.residual
    }

    #[getter]
    fn objective_trace(&self) -> Vec<f64> {
        self.inner.objective_trace.clone()
    }

    fn support_count(&self) -> usize {
        self.inner.support_count()
    }

    /// Channel estimate at arbitrary subcarrier indices.
    fn predict(&self, targets: Vec<usize>) -> PyResult<Vec<Complex64>> {
        estimators::svm_interpolate_at(&self.inner, &self.positions, self.rbf_sigma, &targets).map_err(to_py_err)
    }

    fn trace_jsonl(&self) -> String {
        self.inner.trace_jsonl()
    }
}

/// Aggregated outcome of a Monte-Carlo run.
#[pyclass(name = "RunResult", module = "ofdm_lssvm_py")]
pub struct PyRunResult {
    inner: ofdm_lssvm::harness::RunResult,
}

#[pymethods]
impl PyRunResult {
    fn ber(&self, estimator_name: &str) -> PyResult<f64> {
        let kind = estimator(estimator_name)?;
        self.inner
            .ber(kind)
            .ok_or_else(|| PyValueError::new_err(format!("{kind} was not run")))
    }

    fn mse(&self, estimator_name: &str) -> PyResult<f64> {
        let kind = estimator(estimator_name)?;
        self.inner
            .get(kind)
            .map(|e| e.mse())
            .ok_or_else(|| PyValueError::new_err(format!("{kind} was not run")))
    }

    #[getter]
    fn estimators(&self) -> Vec<String> {
        self.inner.estimators.iter().map(|e| e.kind.to_string()).collect()
    }

    #[getter]
    fn measured_snr_db(&self) -> f64 {
        self.inner.measured_snr_db
    }

    #[getter]
    fn measured_sir_db(&self) -> f64 {
        self.inner.measured_sir_db
    }

    #[getter]
    fn data_symbols(&self) -> u64 {
        self.inner.data_symbols()
    }

    #[getter]
    fn frames(&self) -> usize {
        self.inner.frames
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }
}

#[pyfunction]
fn map_qam16(bits: Vec<u8>) -> PyResult<Vec<Complex64>> {
    grid::map_qam16(&bits).map_err(to_py_err)
}

/// Hard decisions as a list of 0/1 ints.
#[pyfunction]
fn demap_qam16(py: Python<'_>, symbols: Vec<Complex64>) -> PyResult<Bound<'_, PyList>> {
    PyList::new(py, grid::demap_qam16(&symbols))
}

/// One OFDM symbol in time, cyclic prefix first.
#[pyfunction]
fn ofdm_modulate(row: Vec<Complex64>, params: &PyOfdmParams) -> PyResult<Vec<Complex64>> {
    grid::ofdm_modulate(&row, &params.inner)
        .map(|s| s.samples)
        .map_err(to_py_err)
}

#[pyfunction]
fn ofdm_demodulate(samples: Vec<Complex64>, params: &PyOfdmParams) -> PyResult<Vec<Complex64>> {
    let signal = TimeSignal::new(samples, params.inner.sample_rate());
    grid::ofdm_demodulate(&signal, &params.inner).map_err(to_py_err)
}

#[pyfunction]
fn rbf_gram(positions: Vec<usize>, rbf_sigma: f64) -> PyResult<Vec<Vec<f64>>> {
    let g = estimators::rbf_gram(&positions, rbf_sigma).map_err(to_py_err)?;
    Ok(g.row_iter().map(|r| r.iter().copied().collect()).collect())
}

#[pyfunction]
fn epsilon_huber(residual: Complex64, hyper: &PySvmHyper) -> f64 {
    estimators::epsilon_huber(residual, &hyper.inner)
}

#[pyfunction]
fn ls_pilot_estimate(y_pilots: Vec<Complex64>, x_pilots: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
    estimators::ls_pilot_estimate(&y_pilots, &x_pilots).map_err(to_py_err)
}

#[pyfunction]
fn linear_interp_estimate(positions: Vec<usize>, values: Vec<Complex64>, n_subcarriers: usize) -> PyResult<Vec<Complex64>> {
    let pilots = PilotEstimate::new(positions, values).map_err(to_py_err)?;
    estimators::linear_interp_estimate(&pilots, n_subcarriers).map_err(to_py_err)
}

/// Trains the LS-SVM on noisy pilot values at `positions`.
#[pyfunction]
fn solve_lssvm(positions: Vec<usize>, values: Vec<Complex64>, hyper: &PySvmHyper) -> PyResult<PyDualSolution> {
    let pilots = PilotEstimate::new(positions.clone(), values).map_err(to_py_err)?;
    let inner = estimators::solve_lssvm(&pilots, &hyper.inner).map_err(to_py_err)?;
    Ok(PyDualSolution {
        inner,
        positions,
        rbf_sigma: hyper.inner.rbf_sigma,
    })
}

#[pyfunction]
fn doppler_from_speed(speed_kmh: f64, carrier_hz: f64) -> f64 {
    channel::doppler_from_speed(speed_kmh, carrier_hz)
}

fn scenario(config: Option<&str>, seed: Option<u64>, frames: Option<usize>) -> PyResult<Scenario> {
    let mut cfg = match config {
        Some(text) => ConfigFile::from_toml_str(text).map_err(to_py_err)?,
        None => ConfigFile::default(),
    };
    if let Some(seed) = seed {
        cfg.run.seed = seed;
    }
    if let Some(frames) = frames {
        cfg.run.frames = frames;
    }
    cfg.validate().map_err(to_py_err)?;
    Ok(Scenario::from_config(&cfg))
}

/// Runs a scenario given as TOML text (defaults when omitted).
#[pyfunction]
#[pyo3(signature = (config=None, seed=None, frames=None))]
fn simulate(py: Python<'_>, config: Option<&str>, seed: Option<u64>, frames: Option<usize>) -> PyResult<PyRunResult> {
    let s = scenario(config, seed, frames)?;
    let inner = py.detach(|| run_scenario(&s)).map_err(to_py_err)?;
    Ok(PyRunResult { inner })
}

/// Same as `simulate` but returns the `results.csv` text.
#[pyfunction]
#[pyo3(signature = (config=None, seed=None, frames=None))]
fn simulate_csv(py: Python<'_>, config: Option<&str>, seed: Option<u64>, frames: Option<usize>) -> PyResult<String> {
    let s = scenario(config, seed, frames)?;
    let result = py.detach(|| run_scenario(&s)).map_err(to_py_err)?;
    Ok(results_csv(&[SweepPoint::single(Ok(result))]))
}

#[pymodule]
pub fn ofdm_lssvm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", ofdm_lssvm::VERSION)?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add_class::<PyOfdmParams>()?;
    m.add_class::<PySvmHyper>()?;
    m.add_class::<PyDualSolution>()?;
    m.add_class::<PyRunResult>()?;
    m.add_function(wrap_pyfunction!(map_qam16, m)?)?;
    m.add_function(wrap_pyfunction!(demap_qam16, m)?)?;
    m.add_function(wrap_pyfunction!(ofdm_modulate, m)?)?;
    m.add_function(wrap_pyfunction!(ofdm_demodulate, m)?)?;
    m.add_function(wrap_pyfunction!(rbf_gram, m)?)?;
    m.add_function(wrap_pyfunction!(epsilon_huber, m)?)?;
    m.add_function(wrap_pyfunction!(ls_pilot_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(linear_interp_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(solve_lssvm, m)?)?;
    m.add_function(wrap_pyfunction!(doppler_from_speed, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_csv, m)?)?;
    Ok(())
}
