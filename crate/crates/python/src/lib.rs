use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use georobust_core::gates::{self, GateFamily, GateSpec};
use georobust_core::harness::report::{self, table1};
use georobust_core::harness::sweep::{sweep_beta as run_sweep, BuiltGate};
use georobust_core::harness::SweepConfig;
use georobust_core::linalg::SquareOperator;
use georobust_core::robustness;
use georobust_core::simulate::exact_propagator;
use georobust_core::{Error, PulseSchedule};

fn py_err(e: Error) -> PyErr {
    match e.exit_code() {
        4 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn family(name: &str) -> PyResult<GateFamily> {
    name.parse().map_err(py_err)
}

fn spec(gate: &str, theta: Option<f64>, phi: Option<f64>, angle: Option<f64>) -> PyResult<GateSpec> {
    if theta.is_none() && phi.is_none() && angle.is_none() {
        return GateSpec::named(gate).map_err(py_err);
    }
    GateSpec::new(
        theta.unwrap_or(std::f64::consts::FRAC_PI_2),
        phi.unwrap_or(0.0),
        angle.unwrap_or(std::f64::consts::PI),
    )
    .map_err(py_err)
}

fn rows(op: &SquareOperator) -> Vec<Vec<Complex64>> {
    (0..op.dim())
        .map(|i| (0..op.dim()).map(|j| op.get(i, j)).collect())
        .collect()
}

/// Piecewise-constant pulse schedule.
#[pyclass(name = "Schedule", frozen)]
struct PySchedule {
    inner: PulseSchedule,
}

#[pymethods]
impl PySchedule {
    #[staticmethod]
    fn from_text(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: PulseSchedule::from_text(text).map_err(py_err)?,
        })
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn duration(&self) -> f64 {
        self.inner.duration()
    }

    #[getter]
    fn pulse_area(&self) -> f64 {
        self.inner.pulse_area()
    }

    /// `(duration, amplitude, phase)` per segment.
    #[getter]
    fn segments(&self) -> Vec<(f64, f64, f64)> {
        self.inner
            .segments()
            .iter()
            .map(|s| (s.duration, s.amplitude, s.phase))
            .collect()
    }

    /// Propagator under the global Rabi error `beta`.
    #[pyo3(signature = (beta = 0.0))]
    fn unitary(&self, beta: f64) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(&exact_propagator(&self.inner, beta).map_err(py_err)?))
    }

    fn src_residual(&self) -> PyResult<Complex64> {
        robustness::src_residual_any(&self.inner).map_err(py_err)
    }

    fn geometric_phase(&self) -> PyResult<f64> {
        robustness::geometric_phase(&self.inner).map_err(py_err)
    }

    /// D matrix in the initial auxiliary frame.
    fn d_matrix(&self) -> PyResult<Vec<Vec<Complex64>>> {
        Ok(rows(robustness::d_matrix_exact(&self.inner).map_err(py_err)?.entries()))
    }

    fn __repr__(&self) -> String {
        format!(
            "Schedule({:?}, segments={}, duration={:.6})",
            self.inner.system(),
            self.inner.segments().len(),
            self.inner.duration()
        )
    }
}

#[pyfunction]
#[pyo3(signature = (family_name, gate = "not", theta = None, phi = None, angle = None))]
fn build(
    family_name: &str,
    gate: &str,
    theta: Option<f64>,
    phi: Option<f64>,
    angle: Option<f64>,
) -> PyResult<PySchedule> {
    let s = spec(gate, theta, phi, angle)?;
    Ok(PySchedule {
        inner: gates::build(family(family_name)?, &s).map_err(py_err)?,
    })
}

/// Closed-system fidelity (`gamma = 0`) or cardinal-state fidelity under decay
/// and dephasing at rate `gamma`.
#[pyfunction]
#[pyo3(signature = (family_name, beta, gamma = 0.0, gate = "not", steps_per_pi = 2000))]
fn fidelity(
    py: Python<'_>,
    family_name: &str,
    beta: f64,
    gamma: f64,
    gate: &str,
    steps_per_pi: usize,
) -> PyResult<f64> {
    let f = family(family_name)?;
    let s = spec(gate, None, None, None)?;
    py.detach(|| {
        let built = BuiltGate::new(f, &s)?;
        if gamma == 0.0 {
            built.closed_fidelity(beta, steps_per_pi)
        } else {
            built.cardinal_fidelity(beta, gamma, steps_per_pi)
        }
    })
    .map_err(py_err)
}

/// Runs a beta sweep and returns the CSV text.
#[pyfunction]
#[pyo3(signature = (betas, gammas = vec![0.0], families = None, steps_per_pi = 2000, jobs = 0))]
fn sweep_beta(
    py: Python<'_>,
    betas: Vec<f64>,
    gammas: Vec<f64>,
    families: Option<Vec<String>>,
    steps_per_pi: usize,
    jobs: usize,
) -> PyResult<String> {
    let mut config = SweepConfig {
        betas,
        gammas,
        steps_per_pi,
        jobs,
        ..SweepConfig::default()
    };
    if let Some(names) = families {
        config.families = names.iter().map(|n| family(n)).collect::<PyResult<_>>()?;
    }
    config.validate().map_err(py_err)?;
    py.detach(|| run_sweep(&config).map(|r| r.to_csv())).map_err(py_err)
}

type TableRow = (String, f64, f64, f64, f64, bool);

/// NOT-gate robustness table as `(family, duration, c2, slope, 1-F(0.1), pass)`.
#[pyfunction]
#[pyo3(signature = (steps_per_pi = 2000, jobs = 0))]
fn report_table1(
    py: Python<'_>,
    steps_per_pi: usize,
    jobs: usize,
) -> PyResult<Vec<TableRow>> {
    let rows = py.detach(|| table1(steps_per_pi, jobs)).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|r| {
            (
                r.family.name().to_string(),
                r.duration,
                r.quadratic_coefficient,
                r.slope,
                r.infidelity_at_0p1,
                r.pass,
            )
        })
        .collect())
}

#[pyfunction]
fn families() -> Vec<&'static str> {
    GateFamily::ALL.iter().map(|f| f.name()).collect()
}

#[pymodule]
fn georobust(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_function(wrap_pyfunction!(build, m)?)?;
    m.add_function(wrap_pyfunction!(fidelity, m)?)?;
    m.add_function(wrap_pyfunction!(sweep_beta, m)?)?;
    m.add_function(wrap_pyfunction!(report_table1, m)?)?;
    m.add_function(wrap_pyfunction!(families, m)?)?;
    m.add("SRC_TOL", report::SRC_TOL)?;
    Ok(())
}
