//! Python bindings for the `macroqubit` crate.

use ::macroqubit as mq;
use mq::dynamics::{DynamicsOptions, Mode, VacuumMode};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: mq::Error) -> PyErr {
    match mq::config::exit_code(&e) {
        2 => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "SystemParams", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PySystemParams(mq::SystemParams);

#[pymethods]
impl PySystemParams {
    #[new]
    #[pyo3(signature = (h = 0.1, delta = 1e-3, omega = 8f64.sqrt(), x12 = 1.0))]
    fn new(h: f64, delta: f64, omega: f64, x12: f64) -> PyResult<Self> {
        let p = mq::SystemParams::new(h, delta, omega).and_then(|p| p.with_x12(x12)).map_err(to_py)?;
        Ok(PySystemParams(p))
    }
    #[getter]
    fn h(&self) -> f64 {
        self.0.h
    }
    #[getter]
    fn delta(&self) -> f64 {
        self.0.delta
    }
    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega
    }
    #[getter]
    fn x12(&self) -> f64 {
        self.0.x12
    }
    fn __repr__(&self) -> String {
        format!("SystemParams(h={}, delta={}, omega={}, x12={})", self.0.h, self.0.delta, self.0.omega, self.0.x12)
    }
}

#[pyclass(name = "ReservoirSpec", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyReservoirSpec(mq::ReservoirSpec);

#[pymethods]
impl PyReservoirSpec {
    #[new]
    #[pyo3(signature = (s = 1.0, j = 1e-4, lambda_ = 10.0))]
    fn new(s: f64, j: f64, lambda_: f64) -> PyResult<Self> {
        Ok(PyReservoirSpec(mq::ReservoirSpec::new(s, j, lambda_).map_err(to_py)?))
    }
    #[getter]
    fn s(&self) -> f64 {
        self.0.s
    }
    #[getter]
    fn j(&self) -> f64 {
        self.0.j
    }
    #[getter]
    fn lambda_(&self) -> f64 {
        self.0.lambda
    }
    /// `J(ω)`.
    fn density(&self, omega: f64) -> PyResult<f64> {
        mq::model::spectral_density(omega, &self.0).map_err(to_py)
    }
    /// `∫ J(ω) ω^k dω`.
    fn cutoff_moment(&self, k: i32) -> PyResult<f64> {
        mq::model::cutoff_moment(k, &self.0).map_err(to_py)
    }
    fn __repr__(&self) -> String {
        format!("ReservoirSpec(s={}, j={}, lambda_={})", self.0.s, self.0.j, self.0.lambda)
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "isolated" => Ok(Mode::Isolated),
        "stationary" => Ok(Mode::Stationary),
        "nonstationary" => Ok(Mode::Nonstationary),
        other => Err(PyValueError::new_err(format!("unknown mode {other:?}"))),
    }
}

/// Second-order dynamics of the qubit coupled to two reservoirs.
#[pyclass(name = "Simulator", frozen)]
struct PySimulator(mq::dynamics::Simulator);

#[pymethods]
impl PySimulator {
    #[new]
    #[pyo3(signature = (system, reservoir_a, reservoir_b, *, markov = false, resummed = true, double_sector = true, tolerance = 1e-8))]
    fn new(
        system: &PySystemParams,
        reservoir_a: &PyReservoirSpec,
        reservoir_b: &PyReservoirSpec,
        markov: bool,
        resummed: bool,
        double_sector: bool,
        tolerance: f64,
    ) -> PyResult<Self> {
        let opts = DynamicsOptions {
            vacuum: if markov { VacuumMode::Markov } else { VacuumMode::Exact },
            resummed,
            double_sector,
            tolerance,
        };
        let sim = mq::dynamics::Simulator::new(system.0, reservoir_a.0, reservoir_b.0, opts).map_err(to_py)?;
        Ok(PySimulator(sim))
    }

    /// `P_R(t)` with its breakdown as a dict.
    fn p_right(&self, py: Python<'_>, t: f64) -> PyResult<Py<PyAny>> {
        let r = py.detach(|| self.0.p_right(t)).map_err(to_py)?;
        let d = pyo3::types::PyDict::new(py);
        d.set_item("t", r.t)?;
        d.set_item("p_right", r.p_right)?;
        d.set_item("vac_term", r.vac_term)?;
        d.set_item("single_term", r.single_term)?;
        d.set_item("double_term", r.double_term)?;
        d.set_item("cross_term", r.cross_term)?;
        d.set_item("norm", r.norm)?;
        Ok(d.into_any().unbind())
    }

    /// `P_R` on a grid; `mode` is `isolated`, `stationary` or `nonstationary`.
    #[pyo3(signature = (times, mode = "nonstationary"))]
    fn series(&self, py: Python<'_>, times: Vec<f64>, mode: &str) -> PyResult<Vec<f64>> {
        let m = parse_mode(mode)?;
        let ts = py.detach(|| self.0.series(m, &times)).map_err(to_py)?;
        Ok(ts.values())
    }

    /// `C(t, t′)`.
    fn correlation(&self, py: Python<'_>, t: f64, tp: f64) -> PyResult<(f64, f64)> {
        let c = py.detach(|| self.0.correlation(t, tp)).map_err(to_py)?;
        Ok((c.re, c.im))
    }

    /// `(Ω⁻¹-scale lower bound, 0.1/Γ upper bound)`.
    fn validity_window(&self) -> (f64, f64) {
        self.0.validity_window()
    }

    /// Totals `(δE₁, δE₂, Γ₂)` over both reservoirs.
    fn shifts(&self) -> (f64, f64, f64) {
        let t = self.0.pt.total();
        (t.de1, t.de2, t.gamma2)
    }
}

/// `sin²(Δt/2)`.
#[pyfunction]
fn isolated_probability(t: f64, system: &PySystemParams) -> PyResult<f64> {
    mq::model::isolated_probability(t, &system.0).map_err(to_py)
}

/// Damped-cosine fit of a `P_R` series: `(Δ̃, Γ_eff, θ₀, residual)`.
#[pyfunction]
fn fit_modified_tunneling(times: Vec<f64>, values: Vec<f64>) -> PyResult<(f64, f64, f64, f64)> {
    let f = mq::fit::fit_damped_cosine(&times, &values).map_err(to_py)?;
    Ok((f.delta_tilde, f.gamma_eff, f.theta0, f.residual))
}

/// Device estimate from `(γ, h₀)` as a dict.
#[pyfunction]
#[pyo3(signature = (gamma, h0, omega = 8f64.sqrt()))]
fn estimate_device(py: Python<'_>, gamma: f64, h0: f64, omega: f64) -> PyResult<Py<PyAny>> {
    let j = mq::device::JunctionParams::new(gamma, h0).map_err(to_py)?;
    let r = mq::device::estimate(&j, omega).map_err(to_py)?;
    let d = pyo3::types::PyDict::new(py);
    d.set_item("theta0", r.theta0)?;
    d.set_item("u0", r.u0)?;
    d.set_item("h", r.h)?;
    d.set_item("delta", r.instanton_delta)?;
    d.set_item("caveat", r.caveat)?;
    Ok(d.into_any().unbind())
}

#[pymodule]
fn macroqubit_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystemParams>()?;
    m.add_class::<PyReservoirSpec>()?;
    m.add_class::<PySimulator>()?;
    m.add_function(wrap_pyfunction!(isolated_probability, m)?)?;
    m.add_function(wrap_pyfunction!(fit_modified_tunneling, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_device, m)?)?;
    Ok(())
}
