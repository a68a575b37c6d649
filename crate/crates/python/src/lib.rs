//! Python bindings for the core simulator: the closed-form two-site
//! results plus the numeric repeated-premeasurement channel.

use num_complex::Complex64 as C64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use qzeno::analytic2::{self, InitialQubit};
use qzeno::dynamics::{self, MeasurementSchedule, Propagators};
use qzeno::model::{ApparatusParams, ChainParams, CompositeModel};
use qzeno::qla::DensityMatrix;

fn err(e: qzeno::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn build(
    sites: usize,
    epsilon: f64,
    g: f64,
    delta: f64,
) -> PyResult<(CompositeModel, Propagators)> {
    let model = CompositeModel::new(
        ChainParams::new(sites, epsilon, 1.0).map_err(err)?,
        ApparatusParams::new(g, delta, 2).map_err(err)?,
    )
    .map_err(err)?;
    let props = Propagators::new(&model).map_err(err)?;
    Ok((model, props))
}

/// Duration t_m = 2π/(g·N) of one complete pointer rotation.
#[pyfunction]
#[pyo3(signature = (g, pointer_states=2))]
fn measurement_time(g: f64, pointer_states: usize) -> PyResult<f64> {
    qzeno::model::measurement_time(g, pointer_states).map_err(err)
}

/// Closed-form ρ₀₀(t) on the two-site chain during a measurement.
#[pyfunction]
#[pyo3(signature = (t, g, delta, gamma=1.0))]
fn survival_exact(t: f64, g: f64, delta: f64, gamma: f64) -> PyResult<f64> {
    analytic2::survival_exact(t, g, delta, gamma).map_err(err)
}

/// Short-time expansion of the same quantity through t⁴.
#[pyfunction]
#[pyo3(signature = (t, g, delta, gamma=1.0))]
fn survival_taylor(t: f64, g: f64, delta: f64, gamma: f64) -> PyResult<f64> {
    analytic2::survival_taylor(t, g, delta, gamma).map_err(err)
}

/// Linear coefficient of the trace distance to the projective result.
#[pyfunction]
fn t1_coefficient(c0: C64, c1: C64, delta: f64) -> PyResult<f64> {
    let q = InitialQubit::new(c0, c1).map_err(err)?;
    Ok(analytic2::t1_coefficient(&q, delta))
}

/// Simplified coefficient for the particle initially on site 0.
#[pyfunction]
fn t1_prime(delta: f64) -> f64 {
    analytic2::t1_prime(delta)
}

/// Eigenvalues (E0+, E0-, E1+, E1-) of the coupled two-site model.
#[pyfunction]
#[pyo3(signature = (g, delta, gamma=1.0))]
fn two_site_spectrum(g: f64, delta: f64, gamma: f64) -> PyResult<(f64, f64, f64, f64)> {
    let s = analytic2::spectrum(g, delta, gamma).map_err(err)?;
    Ok((s.e0_plus, s.e0_minus, s.e1_plus, s.e1_minus))
}

/// ρ₀₀(t) under free chain evolution from site 0.
#[pyfunction]
#[pyo3(signature = (t, sites, epsilon=0.0))]
fn free_survival(t: f64, sites: usize, epsilon: f64) -> PyResult<f64> {
    let chain = ChainParams::new(sites, epsilon, 1.0).map_err(err)?;
    let rho0 = DensityMatrix::basis_projector(sites, 0).map_err(err)?;
    let rho = dynamics::free_channel(&rho0, t, &chain).map_err(err)?;
    dynamics::occupation(&rho, 0).map_err(err)
}

/// ρ₀₀ˢ(t) at one time under a repeated-measurement schedule.
#[pyfunction]
#[pyo3(signature = (t, sites, epsilon, g, delta, t_m, t_f))]
fn survival_at(
    t: f64,
    sites: usize,
    epsilon: f64,
    g: f64,
    delta: f64,
    t_m: f64,
    t_f: f64,
) -> PyResult<f64> {
    let (_, props) = build(sites, epsilon, g, delta)?;
    let schedule = MeasurementSchedule::new(t_m, t_f, t.max(1e-9), 1.0).map_err(err)?;
    let rho0 = DensityMatrix::basis_projector(sites, 0).map_err(err)?;
    Ok(dynamics::survival_at(&props, &schedule, rho0.matrix(), t))
}

/// Sampled time series [(t, rho00, segment)] with segment "M" or "F".
#[pyfunction]
#[pyo3(signature = (sites, epsilon, g, delta, t_m, t_f, total_time, sample_dt, t_offset=0.0))]
#[allow(clippy::too_many_arguments)]
fn run_schedule(
    sites: usize,
    epsilon: f64,
    g: f64,
    delta: f64,
    t_m: f64,
    t_f: f64,
    total_time: f64,
    sample_dt: f64,
    t_offset: f64,
) -> PyResult<Vec<(f64, f64, String)>> {
    let (model, _) = build(sites, epsilon, g, delta)?;
    let schedule = MeasurementSchedule::with_offset(t_m, t_f, t_offset, total_time, sample_dt)
        .map_err(err)?;
    let rho0 = DensityMatrix::basis_projector(sites, 0).map_err(err)?;
    let series = dynamics::run_schedule(&rho0, &schedule, &model).map_err(err)?;
    Ok(series
        .samples
        .into_iter()
        .map(|s| (s.t, s.rho00, s.segment.label().to_string()))
        .collect())
}

#[pymodule]
fn qzeno_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(measurement_time, m)?)?;
    m.add_function(wrap_pyfunction!(survival_exact, m)?)?;
    m.add_function(wrap_pyfunction!(survival_taylor, m)?)?;
    m.add_function(wrap_pyfunction!(t1_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(t1_prime, m)?)?;
    m.add_function(wrap_pyfunction!(two_site_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(free_survival, m)?)?;
    m.add_function(wrap_pyfunction!(survival_at, m)?)?;
    m.add_function(wrap_pyfunction!(run_schedule, m)?)?;
    Ok(())
}
