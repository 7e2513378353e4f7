//! Python module `strongcert`. Reports are returned as plain dicts.

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde_json::{json, Value};

use strongcert::certify::{bisect_radius, strong_stability_test, BisectConfig, TestConfig};
use strongcert::evp::{self, Disproof};
use strongcert::gridscan::{self, ScanConfig};
use strongcert::hermite::{hermite_of_system, HermiteMatrix};
use strongcert::numerics::{hermitian_eigs, ComplexMatrix};
use strongcert::sdpsolve::SolverConfig;
use strongcert::sosgram::{self, RelaxationMode, SosOutcome};

create_exception!(strongcert, StrongcertError, PyException);

fn err(e: strongcert::Error) -> PyErr {
    StrongcertError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

fn rows(a: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..a.rows()).map(|i| a.row(i).to_vec()).collect()
}

/// `x(t) = Σₖ Hₖ x(t − τₖ)` given by its coefficient matrices.
#[pyclass(name = "DelaySystem", frozen)]
struct PyDelaySystem {
    inner: strongcert::DelaySystem,
}

#[pymethods]
impl PyDelaySystem {
    #[new]
    fn new(matrices: Vec<Vec<Vec<Complex64>>>) -> PyResult<Self> {
        let h = matrices
            .iter()
            .map(|m| {
                if m.iter().any(|r| r.len() != m.len()) {
                    return Err(StrongcertError::new_err("matrices must be square"));
                }
                Ok(ComplexMatrix::from_rows(m))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(Self {
            inner: strongcert::DelaySystem::new(h).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(path: &str) -> PyResult<Self> {
        Ok(Self {
            inner: strongcert::DelaySystem::from_json_file(path).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json_str(text: &str) -> PyResult<Self> {
        Ok(Self {
            inner: strongcert::DelaySystem::from_json_str(text).map_err(err)?,
        })
    }

    fn to_json(&self) -> String {
        self.inner.to_json_value().to_string()
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    fn matrices(&self) -> Vec<Vec<Vec<Complex64>>> {
        self.inner.matrices().iter().map(rows).collect()
    }

    fn scaled(&self, c: f64) -> Self {
        Self {
            inner: self.inner.scaled(c),
        }
    }

    /// `Σₖ Hₖ e^{−iθₖ}`.
    fn symbol(&self, theta: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        if theta.len() != self.inner.m() {
            return Err(err(strongcert::Error::DimensionMismatch {
                expected: self.inner.m(),
                got: theta.len(),
            }));
        }
        Ok(rows(&self.inner.symbol(&theta)))
    }

    fn spectral_radius_at(&self, theta: Vec<f64>) -> PyResult<f64> {
        gridscan::spectral_radius_at(&self.inner, &theta).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DelaySystem(n={}, m={})", self.inner.n(), self.inner.m())
    }
}

/// Hermite matrix `H_γ(θ)` of a system.
#[pyclass(name = "HermiteMatrix", frozen)]
struct PyHermite {
    inner: HermiteMatrix,
}

#[pymethods]
impl PyHermite {
    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn nvars(&self) -> usize {
        self.inner.nvars()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma
    }

    #[getter]
    fn max_degree(&self) -> u32 {
        self.inner.h.max_degree()
    }

    fn eval(&self, theta: Vec<f64>) -> PyResult<Vec<Vec<Complex64>>> {
        self.check(&theta)?;
        Ok(rows(&self.inner.h.eval_angles(&theta)))
    }

    fn min_eigenvalue(&self, theta: Vec<f64>) -> PyResult<f64> {
        self.check(&theta)?;
        let e = hermitian_eigs(&self.inner.h.eval_angles(&theta)).map_err(err)?;
        Ok(e[0])
    }
}

impl PyHermite {
    fn check(&self, theta: &[f64]) -> PyResult<()> {
        if theta.len() == self.inner.nvars() {
            Ok(())
        } else {
            Err(err(strongcert::Error::DimensionMismatch {
                expected: self.inner.nvars(),
                got: theta.len(),
            }))
        }
    }
}

#[pyfunction]
#[pyo3(signature = (sys, gamma = 1.0))]
fn hermite(sys: &PyDelaySystem, gamma: f64) -> PyResult<PyHermite> {
    Ok(PyHermite {
        inner: hermite_of_system(&sys.inner, gamma).map_err(err)?,
    })
}

/// Grid estimate of the strong-stability radius.
#[pyfunction]
#[pyo3(signature = (sys, points = 360, full = false, refine = 1))]
fn scan<'py>(py: Python<'py>, sys: &PyDelaySystem, points: usize, full: bool, refine: usize) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ScanConfig {
        n_points: points,
        use_simplified: !full,
        refine,
        keep_surface: false,
    };
    let r = py.detach(|| gridscan::scan(&sys.inner, &cfg)).map_err(err)?;
    to_py(py, &serde_json::to_value(&r).map_err(|e| err(e.into()))?)
}

/// Certified lower bound on `min_θ λ_min(H_γ(θ))` from one relaxation.
#[pyfunction]
#[pyo3(signature = (sys, gamma = 1.0, order = None))]
fn sos_lower_bound<'py>(py: Python<'py>, sys: &PyDelaySystem, gamma: f64, order: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let s = py
        .detach(|| {
            let h = hermite_of_system(&sys.inner, gamma)?;
            let k = order.unwrap_or(sys.inner.n());
            sosgram::sos_lower_bound(&h.h, k, &SolverConfig::default())
        })
        .map_err(err)?;
    let outcome = match &s.outcome {
        SosOutcome::Certified(_) => "certified".to_string(),
        SosOutcome::Infeasible(_) => "infeasible".to_string(),
        SosOutcome::Indeterminate { reason } => format!("indeterminate: {reason}"),
    };
    let v = json!({
        "outcome": outcome,
        "lower_bound": s.lower_bound,
        "raw_bound": s.raw_bound,
        "solver_status": s.solver_status,
        "iterations": s.iterations,
        "dims": s.dims,
    });
    to_py(py, &v)
}

/// Moment upper bounds `h̄_k` for `k = 1..=k_max`.
#[pyfunction]
#[pyo3(signature = (sys, gamma = 1.0, k_max = 4))]
fn upper_bounds(py: Python<'_>, sys: &PyDelaySystem, gamma: f64, k_max: usize) -> PyResult<Vec<(usize, f64)>> {
    py.detach(|| {
        let h = hermite_of_system(&sys.inner, gamma)?;
        evp::upper_bound_hierarchy(&h.h, k_max)
    })
    .map_err(err)
}

/// Attempts to refute positivity of `H_γ`; returns `None` if inconclusive.
#[pyfunction]
#[pyo3(signature = (sys, gamma = 1.0, k_max = 8))]
fn disprove<'py>(py: Python<'py>, sys: &PyDelaySystem, gamma: f64, k_max: usize) -> PyResult<Option<Bound<'py, PyAny>>> {
    let d = py
        .detach(|| {
            let h = hermite_of_system(&sys.inner, gamma)?;
            evp::disprove_positivity(&h, k_max)
        })
        .map_err(err)?;
    match d {
        Disproof::Inconclusive { .. } => Ok(None),
        Disproof::Refuted(r) => {
            let witness = r.witness.map(|w| json!({ "scan_angles": w.scan_angles, "min_eigenvalue": w.min_eigenvalue }));
            Ok(Some(to_py(py, &json!({ "k": r.k, "bound": r.bound, "witness": witness }))?))
        }
    }
}

/// Strong-stability verdict at one scaling `γ`.
#[pyfunction]
#[pyo3(signature = (sys, gamma = 1.0, order = None))]
fn certify<'py>(py: Python<'py>, sys: &PyDelaySystem, gamma: f64, order: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let cfg = TestConfig {
        gamma,
        order,
        ..TestConfig::default()
    };
    let r = py.detach(|| strong_stability_test(&sys.inner, &cfg)).map_err(err)?;
    to_py(py, &r.to_json(false))
}

/// Certified bracket of the strong-stability radius.
#[pyfunction]
#[pyo3(signature = (sys, tol = 1e-3, order = None, points = 360))]
fn bisect<'py>(py: Python<'py>, sys: &PyDelaySystem, tol: f64, order: Option<usize>, points: usize) -> PyResult<Bound<'py, PyAny>> {
    let mut cfg = BisectConfig {
        tol,
        ..BisectConfig::default()
    };
    cfg.test.order = order;
    cfg.scan.n_points = points;
    let r = py.detach(|| bisect_radius(&sys.inner, &cfg)).map_err(err)?;
    to_py(py, &r.to_json(false))
}

/// Writes the relaxation in SDPA sparse format and returns its dimensions.
#[pyfunction]
#[pyo3(signature = (sys, path, gamma = 1.0, order = None, feasibility = false))]
fn export_sdpa<'py>(
    py: Python<'py>,
    sys: &PyDelaySystem,
    path: std::path::PathBuf,
    gamma: f64,
    order: Option<usize>,
    feasibility: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let mode = if feasibility {
        RelaxationMode::Feasibility
    } else {
        RelaxationMode::MaximizeLowerBound
    };
    let dims = py
        .detach(|| {
            let h = hermite_of_system(&sys.inner, gamma)?;
            let r = sosgram::build_relaxation(&h.h, order.unwrap_or(sys.inner.n()), mode)?;
            sosgram::export_sdpa(&r.problem, &path)?;
            Ok::<_, strongcert::Error>(r.dims)
        })
        .map_err(err)?;
    to_py(py, &serde_json::to_value(dims).map_err(|e| err(e.into()))?)
}

#[pymodule]
#[pyo3(name = "strongcert")]
fn strongcert_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("StrongcertError", m.py().get_type::<StrongcertError>())?;
    m.add_class::<PyDelaySystem>()?;
    m.add_class::<PyHermite>()?;
    m.add_function(wrap_pyfunction!(hermite, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(sos_lower_bound, m)?)?;
    m.add_function(wrap_pyfunction!(upper_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(disprove, m)?)?;
    m.add_function(wrap_pyfunction!(certify, m)?)?;
    m.add_function(wrap_pyfunction!(bisect, m)?)?;
    m.add_function(wrap_pyfunction!(export_sdpa, m)?)?;
    Ok(())
}
