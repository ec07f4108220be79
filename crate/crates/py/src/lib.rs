//! Python bindings: boundary models, path simulation, kernels, laws and the
//! validation suite.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use wentzell::interval::{build_interval_path, SegmentKind};
use wentzell::kernels;
use wentzell::laws;
use wentzell::path::{build_process, first_exit, Exit};
use wentzell::validation::{run_suite, SuiteConfig};
use wentzell::{Absorption, BoundaryModel, Side, TimeGrid};

fn err(e: wentzell::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Boundary behaviour at one end of the state space.
#[pyclass(name = "BoundaryModel", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyModel(BoundaryModel);

#[pymethods]
impl PyModel {
    #[staticmethod]
    fn reflecting() -> Self {
        Self(BoundaryModel::reflecting())
    }

    #[staticmethod]
    #[pyo3(signature = (kill = false))]
    fn absorbing(kill: bool) -> Self {
        Self(BoundaryModel::absorbing(if kill { Absorption::Kill } else { Absorption::Stop }))
    }

    #[staticmethod]
    fn elastic(beta: f64) -> PyResult<Self> {
        BoundaryModel::elastic(beta).map(Self).map_err(err)
    }

    #[staticmethod]
    fn sticky(gamma: f64) -> PyResult<Self> {
        BoundaryModel::sticky(gamma).map(Self).map_err(err)
    }

    #[staticmethod]
    fn general(beta: f64, gamma: f64) -> PyResult<Self> {
        BoundaryModel::general(beta, gamma).map(Self).map_err(err)
    }

    #[staticmethod]
    fn trap_kill(beta: f64) -> PyResult<Self> {
        BoundaryModel::trap_kill(beta).map(Self).map_err(err)
    }

    /// Classifies the weights of `a0 f(0) - b0 f'(0+) + (c0/2) f''(0+) = 0`.
    #[staticmethod]
    fn from_wentzell(a0: f64, b0: f64, c0: f64) -> PyResult<Self> {
        wentzell::normalize_wentzell(a0, b0, c0, Side::AtZero).map(Self).map_err(err)
    }

    #[getter]
    fn descriptor(&self) -> String {
        self.0.descriptor()
    }

    #[getter]
    fn beta(&self) -> f64 {
        self.0.beta()
    }

    #[getter]
    fn gamma(&self) -> f64 {
        self.0.gamma()
    }

    #[getter]
    fn weights(&self) -> (f64, f64, f64) {
        self.0.to_wentzell()
    }

    #[getter]
    fn conservative(&self) -> bool {
        self.0.is_conservative()
    }

    fn __repr__(&self) -> String {
        format!("BoundaryModel.{}", self.0.descriptor())
    }
}

fn grid(t_max: f64, steps: usize) -> PyResult<TimeGrid> {
    TimeGrid::new(t_max, steps).map_err(err)
}

/// One path of `model` from `start`: dict of `t`, `value`, `local_time`,
/// `tau`, `alive` lists and the `lifetime`.
#[pyfunction]
fn simulate<'py>(
    py: Python<'py>,
    model: &PyModel,
    start: f64,
    t_max: f64,
    steps: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let g = grid(t_max, steps)?;
    let p = build_process(&model.0, start, g, seed).map_err(err)?;
    let d = PyDict::new(py);
    let t: Vec<f64> = (0..g.len()).map(|i| g.time(i)).collect();
    let alive: Vec<bool> = (0..g.len()).map(|i| p.path.alive(i)).collect();
    d.set_item("tau", p.time_change.clone().unwrap_or_else(|| t.clone()))?;
    d.set_item("t", t)?;
    d.set_item("value", p.path.values)?;
    d.set_item("local_time", p.local_time)?;
    d.set_item("alive", alive)?;
    d.set_item("lifetime", p.path.lifetime)?;
    Ok(d)
}

/// `(kind, time, level, local_time)` for the first exit from `(lower, upper)`;
/// `kind` is `crossed`, `died` or `censored`.
#[pyfunction]
#[pyo3(signature = (model, start, lower, upper, dt, t_max, seed, bridge = false))]
#[allow(clippy::too_many_arguments)]
fn exit_time(
    model: &PyModel,
    start: f64,
    lower: Option<f64>,
    upper: Option<f64>,
    dt: f64,
    t_max: f64,
    seed: u64,
    bridge: bool,
) -> PyResult<(String, Option<f64>, Option<f64>, f64)> {
    let e = first_exit(&model.0, start, lower, upper, dt, t_max, seed, bridge).map_err(err)?;
    Ok(match e {
        Exit::Crossed { time, level, local_time } => ("crossed".into(), Some(time), Some(level), local_time),
        Exit::Died { time, local_time } => ("died".into(), Some(time), None, local_time),
        Exit::Censored { local_time } => ("censored".into(), None, None, local_time),
    })
}

#[pyfunction]
fn g_family(beta: f64, gamma: f64, t: f64, x: f64) -> PyResult<f64> {
    kernels::g_family(beta, gamma, t, x).map_err(err)
}

/// `(density at each y, atom at 0)` of the law of `X_t` from `x`.
#[pyfunction]
fn transition(model: &PyModel, t: f64, x: f64, ys: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
    let m = kernels::transition_measure(&model.0, t, x).map_err(err)?;
    Ok((ys.iter().map(|&y| m.density(y)).collect(), m.atom(0.0)))
}

/// `(density at each y, atom at 0)` of the resolvent kernel from `x`.
#[pyfunction]
fn resolvent(model: &PyModel, lam: f64, x: f64, ys: Vec<f64>) -> PyResult<(Vec<f64>, f64)> {
    let m = kernels::resolvent_measure(&model.0, lam, x).map_err(err)?;
    Ok((ys.iter().map(|&y| m.density(y)).collect(), m.atom(0.0)))
}

fn call(f: &Bound<'_, PyAny>, y: f64) -> f64 {
    f.call1((y,)).and_then(|v| v.extract::<f64>()).unwrap_or(f64::NAN)
}

/// `R_lambda f(x)` on the half-line for a Python callable `f`.
#[pyfunction]
fn resolvent_apply(model: &PyModel, lam: f64, f: &Bound<'_, PyAny>, x: f64) -> PyResult<f64> {
    kernels::resolvent_apply(&model.0, lam, |y| call(f, y), x).map_err(err)
}

/// `R_lambda f(x)` on `[0, 1]` with `model0` at 0 and `model1` at 1.
#[pyfunction]
fn interval_resolvent(model0: &PyModel, model1: &PyModel, lam: f64, f: &Bound<'_, PyAny>, x: f64) -> PyResult<f64> {
    kernels::interval_resolvent(&model0.0, &model1.0, lam, |y| call(f, y), x).map(|s| s.value).map_err(err)
}

/// One pieced path on `[0, 1]`: dict of `value`, `crossovers`,
/// `crossover_times`, `segment_kinds` and `lifetime`.
#[pyfunction]
fn interval_path<'py>(
    py: Python<'py>,
    start: f64,
    model0: &PyModel,
    model1: &PyModel,
    t_max: f64,
    steps: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = build_interval_path(start, &model0.0, &model1.0, grid(t_max, steps)?, seed).map_err(err)?;
    let kinds: Vec<&str> = r
        .segment_kinds
        .iter()
        .map(|k| match k {
            SegmentKind::Initial => "initial",
            SegmentKind::ACopy => "a",
            SegmentKind::BCopy => "b",
        })
        .collect();
    let d = PyDict::new(py);
    d.set_item("value", r.path.values)?;
    d.set_item("crossovers", r.crossovers)?;
    d.set_item("crossover_times", r.crossover_times)?;
    d.set_item("segment_kinds", kinds)?;
    d.set_item("lifetime", r.path.lifetime)?;
    Ok(d)
}

#[pyfunction]
fn v_exit(alpha: f64, beta: f64, a: f64, x: f64) -> f64 {
    laws::v_exit(alpha, beta, a, x)
}

#[pyfunction]
fn kill_before_hit_prob(a: f64, beta: f64) -> f64 {
    laws::kill_before_hit_prob(a, beta)
}

#[pyfunction]
fn zeta_lt(beta: f64, gamma: f64, lam: f64) -> f64 {
    laws::zeta_lt(beta, gamma, lam)
}

#[pyfunction]
fn ls_alpha_potential(alpha: f64, gamma: f64, x: f64) -> f64 {
    laws::ls_alpha_potential(alpha, gamma, x)
}

#[pyfunction]
fn sticky_exit_mean(gamma: f64, eps: f64) -> f64 {
    laws::sticky_exit_mean(gamma, eps)
}

#[pyfunction]
fn joint_refl_lt_density(s: f64, x: f64, y: f64) -> f64 {
    laws::joint_refl_lt_density(s, x, y)
}

/// Runs the named checks and returns the JSON report.
#[pyfunction]
#[pyo3(signature = (checks, seed = 0))]
fn validate(checks: Vec<String>, seed: u64) -> String {
    run_suite(&SuiteConfig { checks, master_seed: seed }).to_json()
}

#[pymodule]
fn wentzell_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyModel>()?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(exit_time, m)?)?;
    m.add_function(wrap_pyfunction!(g_family, m)?)?;
    m.add_function(wrap_pyfunction!(transition, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(resolvent_apply, m)?)?;
    m.add_function(wrap_pyfunction!(interval_resolvent, m)?)?;
    m.add_function(wrap_pyfunction!(interval_path, m)?)?;
    m.add_function(wrap_pyfunction!(v_exit, m)?)?;
    m.add_function(wrap_pyfunction!(kill_before_hit_prob, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_lt, m)?)?;
    m.add_function(wrap_pyfunction!(ls_alpha_potential, m)?)?;
    m.add_function(wrap_pyfunction!(sticky_exit_mean, m)?)?;
    m.add_function(wrap_pyfunction!(joint_refl_lt_density, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    Ok(())
}
