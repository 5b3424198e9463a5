//! Python bindings for `dephasing_core`. Matrices cross the boundary as
//! nested lists of Python `complex`; all errors surface as `ValueError`.

use std::f64::consts::FRAC_PI_2;

use dephasing_core::dynamics::{
    evolve_with_pulse, stationary_state as core_stationary, ChannelParams, DrivePulse,
};
use dephasing_core::eraser::{self, MeasurementBasis};
use dephasing_core::linalg::ComplexMatrix;
use dephasing_core::measures;
use dephasing_core::states::{self, StateDescriptor, XStateCoefficients};
use dephasing_core::sweep::{self as core_sweep, linspace, SweepSpec};
use dephasing_core::verify;
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn descriptor(state: &str) -> PyResult<StateDescriptor> {
    state.parse().map_err(err)
}

fn two_qubit(state: &str) -> PyResult<states::DensityMatrix> {
    descriptor(state)?
        .two_qubit()
        .map_err(err)?
        .ok_or_else(|| err("expected a two-qubit state descriptor"))
}

fn pulse(omega_ratio: f64, gamma_t: f64, gamma: f64) -> PyResult<(DrivePulse, ChannelParams)> {
    let params = ChannelParams::new(gamma).map_err(err)?;
    Ok((
        DrivePulse::from_scaled(omega_ratio, gamma_t, params).map_err(err)?,
        params,
    ))
}

/// Two-qubit density matrix in the basis |11>, |10>, |01>, |00>.
#[pyclass(name = "DensityMatrix", frozen)]
pub struct PyDensityMatrix(states::DensityMatrix);

#[pymethods]
impl PyDensityMatrix {
    #[new]
    fn new(rows: Vec<Vec<Complex64>>) -> PyResult<Self> {
        if rows.len() != 4 || rows.iter().any(|r| r.len() != 4) {
            return Err(err("expected a 4x4 matrix"));
        }
        let m = ComplexMatrix::from_fn(4, |i, j| rows[i][j]);
        Ok(Self(states::DensityMatrix::new(m).map_err(err)?))
    }

    /// Named state: `phi+`, `phi-`, `psi+`, `psi-` or `werner:<r>`.
    #[staticmethod]
    fn named(state: &str) -> PyResult<Self> {
        Ok(Self(two_qubit(state)?))
    }

    fn to_list(&self) -> Vec<Vec<Complex64>> {
        (0..4)
            .map(|i| (0..4).map(|j| self.0.get(i, j)).collect())
            .collect()
    }

    fn purity(&self) -> f64 {
        self.0.purity()
    }

    fn concurrence(&self) -> PyResult<f64> {
        measures::concurrence(&self.0).map_err(err)
    }

    fn entropy(&self) -> PyResult<f64> {
        measures::von_neumann_entropy(&self.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("DensityMatrix(purity={:.6})", self.0.purity())
    }
}

/// Stationary two-qubit state in X form.
#[pyclass(name = "XState", frozen)]
pub struct PyXState(XStateCoefficients);

#[pymethods]
impl PyXState {
    #[new]
    fn new(a: f64, b: f64, c: f64, d: f64, f: Complex64) -> PyResult<Self> {
        Ok(Self(XStateCoefficients::new(a, b, c, d, f).map_err(err)?))
    }

    #[getter]
    fn a(&self) -> f64 {
        self.0.a
    }

    #[getter]
    fn b(&self) -> f64 {
        self.0.b
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c
    }

    #[getter]
    fn d(&self) -> f64 {
        self.0.d
    }

    #[getter]
    fn f(&self) -> Complex64 {
        self.0.f
    }

    fn concurrence(&self) -> f64 {
        measures::concurrence_x(&self.0)
    }

    fn entropy(&self) -> f64 {
        measures::entropy_x(&self.0)
    }

    fn to_density(&self) -> PyResult<PyDensityMatrix> {
        Ok(PyDensityMatrix(self.0.to_density().map_err(err)?))
    }

    fn __repr__(&self) -> String {
        let x = &self.0;
        format!(
            "XState(a={}, b={}, c={}, d={}, f={})",
            x.a, x.b, x.c, x.d, x.f
        )
    }
}

/// Stationary GHZ conditional blocks and their five coefficients.
#[pyclass(name = "GhzStationary", frozen)]
pub struct PyGhzStationary {
    blocks: states::ConditionalBlocks,
    zeta: eraser::GhzStationaryCoefficients,
}

#[pymethods]
impl PyGhzStationary {
    /// `(zeta_a, zeta_b, zeta_c, zeta_d, zeta_f)`.
    #[getter]
    fn zeta(&self) -> (f64, f64, f64, f64, Complex64) {
        let z = &self.zeta;
        (z.zeta_a, z.zeta_b, z.zeta_c, z.zeta_d, z.zeta_f)
    }

    /// Concurrence of qubits 1 and 2 with qubit 3 traced out.
    fn traced_concurrence(&self) -> PyResult<f64> {
        let rho = self.blocks.trace_out_qubit3().map_err(err)?;
        measures::concurrence(&rho).map_err(err)
    }

    #[pyo3(signature = (theta, phi = 0.0))]
    fn average_concurrence(&self, theta: f64, phi: f64) -> PyResult<f64> {
        let basis = MeasurementBasis::new(theta, phi).map_err(err)?;
        eraser::average_concurrence(&self.blocks, basis).map_err(err)
    }

    fn closed_form_average_concurrence(&self, theta: f64) -> f64 {
        eraser::closed_form_average_concurrence(&self.zeta, theta)
    }
}

/// State at time `t` after a pulse of scaled length `gamma_t`.
#[pyfunction]
#[pyo3(signature = (state, omega_ratio, gamma_t, t, gamma = 1.0))]
fn evolve(
    state: &str,
    omega_ratio: f64,
    gamma_t: f64,
    t: f64,
    gamma: f64,
) -> PyResult<PyDensityMatrix> {
    let (p, params) = pulse(omega_ratio, gamma_t, gamma)?;
    Ok(PyDensityMatrix(
        evolve_with_pulse(&two_qubit(state)?, p, params, t).map_err(err)?,
    ))
}

#[pyfunction]
#[pyo3(signature = (state, omega_ratio, gamma_t, gamma = 1.0))]
fn stationary_state(state: &str, omega_ratio: f64, gamma_t: f64, gamma: f64) -> PyResult<PyXState> {
    let (p, params) = pulse(omega_ratio, gamma_t, gamma)?;
    Ok(PyXState(
        core_stationary(&two_qubit(state)?, p, params).map_err(err)?,
    ))
}

#[pyfunction]
#[pyo3(signature = (omega_ratio, gamma_t, gamma = 1.0))]
fn stationary_ghz(omega_ratio: f64, gamma_t: f64, gamma: f64) -> PyResult<PyGhzStationary> {
    let (p, params) = pulse(omega_ratio, gamma_t, gamma)?;
    let blocks = eraser::stationary_ghz_blocks(p, params).map_err(err)?;
    let zeta = eraser::stationary_blocks(p, params).map_err(err)?;
    Ok(PyGhzStationary { blocks, zeta })
}

/// `[(gamma_t, concurrence, entropy), ...]` over an even γT grid.
#[pyfunction]
#[pyo3(signature = (state, omega_ratio = core_sweep::DEFAULT_OMEGA_RATIO, gamma_t_min = 0.0, gamma_t_max = core_sweep::DEFAULT_GAMMA_T_MAX, points = core_sweep::DEFAULT_POINTS))]
fn sweep(
    state: &str,
    omega_ratio: f64,
    gamma_t_min: f64,
    gamma_t_max: f64,
    points: usize,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let spec = SweepSpec::stationary(
        descriptor(state)?,
        omega_ratio,
        linspace(gamma_t_min, gamma_t_max, points),
    );
    let records = core_sweep::sweep_stationary(&spec).map_err(err)?;
    Ok(records
        .iter()
        .map(|r| {
            (
                r.gamma_t,
                r.concurrence.unwrap_or(f64::NAN),
                r.entropy.unwrap_or(f64::NAN),
            )
        })
        .collect())
}

/// `[(gamma_t, theta, c_ave), ...]`; θ runs over [0, π].
#[pyfunction]
#[pyo3(signature = (omega_ratio = core_sweep::DEFAULT_OMEGA_RATIO, gamma_t_min = 0.0, gamma_t_max = core_sweep::DEFAULT_GAMMA_T_MAX, points = 101, theta_points = 61, phi = 0.0))]
fn eraser_sweep(
    omega_ratio: f64,
    gamma_t_min: f64,
    gamma_t_max: f64,
    points: usize,
    theta_points: usize,
    phi: f64,
) -> PyResult<Vec<(f64, f64, f64)>> {
    let thetas = if theta_points == 1 {
        vec![FRAC_PI_2]
    } else {
        linspace(0.0, std::f64::consts::PI, theta_points)
    };
    let mut spec = SweepSpec::eraser(
        omega_ratio,
        linspace(gamma_t_min, gamma_t_max, points),
        thetas,
    );
    spec.phi = phi;
    let records = core_sweep::sweep_eraser(&spec).map_err(err)?;
    Ok(records
        .iter()
        .map(|r| {
            (
                r.gamma_t,
                r.theta.unwrap_or(f64::NAN),
                r.c_ave.unwrap_or(f64::NAN),
            )
        })
        .collect())
}

/// Runs the built-in checks; returns `[(name, passed, detail), ...]`.
#[pyfunction]
#[pyo3(signature = (checks = Vec::new(), tolerance = None))]
fn run_checks(
    checks: Vec<String>,
    tolerance: Option<f64>,
) -> PyResult<Vec<(String, bool, String)>> {
    let outcomes = verify::run_checks(&checks, tolerance).map_err(err)?;
    Ok(outcomes
        .into_iter()
        .map(|o| (o.name.to_string(), o.passed, o.detail))
        .collect())
}

#[pymodule]
fn dephasing(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDensityMatrix>()?;
    m.add_class::<PyXState>()?;
    m.add_class::<PyGhzStationary>()?;
    m.add_function(wrap_pyfunction!(evolve, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_state, m)?)?;
    m.add_function(wrap_pyfunction!(stationary_ghz, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(eraser_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    m.add("CHECK_NAMES", verify::CHECK_NAMES.to_vec())?;
    Ok(())
}
