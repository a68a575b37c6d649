//! Parameter sweeps producing the curves and heatmap grids behind each
//! figure. Grid cells are pure functions of the configuration and are
//! evaluated cell- or column-parallel with a deterministic row-major
//! write order, so serial and parallel runs emit identical data.

use rayon::prelude::*;
use std::f64::consts::PI;

use crate::analytic2::{t1_coefficient, InitialQubit};
use crate::dynamics::{survival_at, MeasurementSchedule, Propagators, TimeSeries};
use crate::error::{Error, Result};
use crate::model::{ApparatusParams, ChainParams, CompositeModel};
use crate::qla::{trace_distance, ComplexMatrix, DensityMatrix, StateVector};

/// One sweep axis; `values()` is an inclusive linspace.
#[derive(Debug, Clone, PartialEq)]
pub struct Axis {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Axis {
    pub fn new(name: &str, min: f64, max: f64, points: usize) -> Result<Self> {
        if points < 2 {
            return Err(Error::InvalidParams(format!("axis {name} needs >= 2 points")));
        }
        if !(min < max) {
            return Err(Error::InvalidParams(format!("axis {name}: min {min} must be < max {max}")));
        }
        Ok(Self { name: name.into(), min, max, points })
    }

    pub fn values(&self) -> Vec<f64> {
        let step = (self.max - self.min) / (self.points - 1) as f64;
        (0..self.points).map(|i| self.min + step * i as f64).collect()
    }
}

/// Two-axis sweep grid; axis1 is the outer (row-major) axis.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepGrid {
    pub axis1: Axis,
    pub axis2: Axis,
}

/// Sweep output: row-major values with a mask marking undefined cells
/// (e.g. t_d < t_m where t_f would be negative).
#[derive(Debug, Clone, PartialEq)]
pub struct HeatmapResult {
    pub grid: SweepGrid,
    pub values: Vec<f64>,
    pub mask: Vec<bool>,
}

impl HeatmapResult {
    pub fn value(&self, i1: usize, i2: usize) -> Option<f64> {
        let idx = i1 * self.grid.axis2.points + i2;
        if self.mask[idx] { None } else { Some(self.values[idx]) }
    }
}

fn qubit_state(q: &InitialQubit) -> Result<DensityMatrix> {
    DensityMatrix::from_pure(&StateVector::new(vec![q.c0, q.c1])?)
}

fn projective_result(q: &InitialQubit) -> Result<DensityMatrix> {
    let mut m = ComplexMatrix::zeros(2, 2);
    m[(0, 0)] = num_complex::Complex64::new(q.c0.norm_sqr(), 0.0);
    m[(1, 1)] = num_complex::Complex64::new(q.c1.norm_sqr(), 0.0);
    DensityMatrix::new(m)
}

/// Trace distance of the duration-t_m premeasurement to the projective
/// result, with the large-g linear approximation (2γ/g)·T₁ as companion.
pub fn curve_trace_distance(
    delta: f64,
    q: &InitialQubit,
    tm_values: &[f64],
) -> Result<Vec<(f64, f64, f64)>> {
    let rho0 = qubit_state(q)?;
    let proj = projective_result(q)?;
    let t1 = t1_coefficient(q, delta);
    let rows: Vec<Result<(f64, f64, f64)>> = tm_values
        .par_iter()
        .map(|&tm| {
            if tm <= 0.0 {
                return Err(Error::InvalidParams(format!("t_m must be > 0, got {tm}")));
            }
            let g = PI / tm;
            let model = CompositeModel::new(
                ChainParams::new(2, 0.0, 1.0)?,
                ApparatusParams::new(g, delta, 2)?,
            )?;
            let props = Propagators::new(&model)?;
            let out = DensityMatrix::new(props.measure_for(rho0.matrix(), tm))?;
            let t = trace_distance(&out, &proj)?;
            Ok((tm, t, 2.0 * t1 / g))
        })
        .collect();
    rows.into_iter().collect()
}

/// T₁ of the linear trace-distance law across δ.
pub fn curve_t1_vs_delta(q: &InitialQubit, delta_values: &[f64]) -> Vec<(f64, f64)> {
    delta_values.iter().map(|&d| (d, t1_coefficient(q, d))).collect()
}

/// One labeled ρ₀₀ curve.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledCurve {
    pub label: String,
    pub points: Vec<(f64, f64)>,
}

/// Survival on site 0 during a single measurement for a family of
/// effective shifts δ+ε/g, with the two free-evolution references
/// (g = 0 at ε = 0 and at ε = −π).
pub fn curve_survival_during_measurement(
    g: f64,
    deltas: &[f64],
    t_values: &[f64],
) -> Result<Vec<LabeledCurve>> {
    let mut curves = Vec::new();
    let rho0 = DensityMatrix::basis_projector(2, 0)?;
    for &delta in deltas {
        let model = CompositeModel::new(
            ChainParams::new(2, 0.0, 1.0)?,
            ApparatusParams::new(g, delta, 2)?,
        )?;
        let props = Propagators::new(&model)?;
        let points = t_values
            .iter()
            .map(|&t| (t, props.measure_for(rho0.matrix(), t)[(0, 0)].re))
            .collect();
        curves.push(LabeledCurve { label: format!("shift={delta}"), points });
    }
    for (label, eps) in [("free_eps=0", 0.0), ("free_eps=-pi", -PI)] {
        let chain = ChainParams::new(2, eps, 1.0)?;
        let h = crate::model::build_chain_hamiltonian(&chain);
        let dec = crate::qla::SpectralDecomp::new(&h)?;
        let points = t_values
            .iter()
            .map(|&t| {
                let u = dec.propagator(t);
                let evolved = &(&u * rho0.matrix()) * &u.adjoint();
                (t, evolved[(0, 0)].re)
            })
            .collect();
        curves.push(LabeledCurve { label: label.into(), points });
    }
    Ok(curves)
}

/// ρ₀₀ˢ(t) over (t, t_f) at fixed measurement duration t_m = π/g.
pub fn map_t_tf(
    chain: &ChainParams,
    g: f64,
    delta: f64,
    t_axis: &Axis,
    tf_axis: &Axis,
) -> Result<HeatmapResult> {
    let model = CompositeModel::new(*chain, ApparatusParams::new(g, delta, 2)?)?;
    let props = Propagators::new(&model)?;
    let tm = model.measurement_time();
    let rho0 = DensityMatrix::basis_projector(chain.sites, 0)?;
    let ts = t_axis.values();
    let tfs = tf_axis.values();

    // column-parallel over t_f; each column reuses the shared decomposition
    let columns: Vec<Vec<f64>> = tfs
        .par_iter()
        .map(|&tf| {
            let schedule = MeasurementSchedule::new(tm, tf, ts.last().copied().unwrap_or(1.0).max(1e-9), 1.0)
                .expect("axis-validated schedule");
            ts.iter()
                .map(|&t| survival_at(&props, &schedule, rho0.matrix(), t))
                .collect()
        })
        .collect();

    let n2 = tfs.len();
    let mut values = vec![0.0; ts.len() * n2];
    for (i2, col) in columns.iter().enumerate() {
        for (i1, &v) in col.iter().enumerate() {
            values[i1 * n2 + i2] = v;
        }
    }
    Ok(HeatmapResult {
        grid: SweepGrid { axis1: t_axis.clone(), axis2: tf_axis.clone() },
        values,
        mask: vec![false; ts.len() * n2],
    })
}

/// ρ₀₀ˢ(eval_t) over (t_m, t_f) with g = π/t_m per cell.
pub fn map_tm_tf(
    chain: &ChainParams,
    delta: f64,
    tm_axis: &Axis,
    tf_axis: &Axis,
    eval_t: f64,
) -> Result<HeatmapResult> {
    let tms = tm_axis.values();
    let tfs = tf_axis.values();
    let rho0 = DensityMatrix::basis_projector(chain.sites, 0)?;
    let chain = *chain;

    // row-parallel over t_m; the composite decomposition is built once
    // per row and shared across the t_f cells
    let rows: Vec<Result<Vec<(f64, bool)>>> = tms
        .par_iter()
        .map(|&tm| {
            if tm <= 0.0 {
                return Ok(vec![(0.0, true); tfs.len()]);
            }
            let g = PI / tm;
            let model = CompositeModel::new(chain, ApparatusParams::new(g, delta, 2)?)?;
            let props = Propagators::new(&model)?;
            let row = tfs
                .iter()
                .map(|&tf| {
                    let schedule = MeasurementSchedule::new(tm, tf, eval_t.max(1e-9), 1.0)
                        .expect("axis-validated schedule");
                    (survival_at(&props, &schedule, rho0.matrix(), eval_t), false)
                })
                .collect();
            Ok(row)
        })
        .collect();

    let n2 = tfs.len();
    let mut values = vec![0.0; tms.len() * n2];
    let mut mask = vec![false; tms.len() * n2];
    for (i1, row) in rows.into_iter().enumerate() {
        for (i2, (v, m)) in row?.into_iter().enumerate() {
            values[i1 * n2 + i2] = v;
            mask[i1 * n2 + i2] = m;
        }
    }
    Ok(HeatmapResult {
        grid: SweepGrid { axis1: tm_axis.clone(), axis2: tf_axis.clone() },
        values,
        mask,
    })
}

/// ρ₀₀ˢ(eval_t) over (t_m, t_d); cells with t_d < t_m are masked since
/// t_f would be negative.
pub fn map_tm_td(
    chain: &ChainParams,
    delta: f64,
    tm_axis: &Axis,
    td_axis: &Axis,
    eval_t: f64,
) -> Result<HeatmapResult> {
    let tms = tm_axis.values();
    let tds = td_axis.values();
    let rho0 = DensityMatrix::basis_projector(chain.sites, 0)?;
    let chain = *chain;

    let rows: Vec<Result<Vec<(f64, bool)>>> = tms
        .par_iter()
        .map(|&tm| {
            if tm <= 0.0 {
                return Ok(vec![(0.0, true); tds.len()]);
            }
            let g = PI / tm;
            let model = CompositeModel::new(chain, ApparatusParams::new(g, delta, 2)?)?;
            let props = Propagators::new(&model)?;
            let row = tds
                .iter()
                .map(|&td| {
                    if td < tm {
                        return (0.0, true);
                    }
                    let schedule = MeasurementSchedule::new(tm, td - tm, eval_t.max(1e-9), 1.0)
                        .expect("axis-validated schedule");
                    (survival_at(&props, &schedule, rho0.matrix(), eval_t), false)
                })
                .collect();
            Ok(row)
        })
        .collect();

    let n2 = tds.len();
    let mut values = vec![0.0; tms.len() * n2];
    let mut mask = vec![false; tms.len() * n2];
    for (i1, row) in rows.into_iter().enumerate() {
        for (i2, (v, m)) in row?.into_iter().enumerate() {
            values[i1 * n2 + i2] = v;
            mask[i1 * n2 + i2] = m;
        }
    }
    Ok(HeatmapResult {
        grid: SweepGrid { axis1: tm_axis.clone(), axis2: td_axis.clone() },
        values,
        mask,
    })
}

/// Time traces at fixed t_d for several measurement durations; segment
/// labels allow thick-line rendering of the measurement periods.
pub fn curve_repfintime(
    chain: &ChainParams,
    delta: f64,
    td: f64,
    tm_list: &[f64],
    total_time: f64,
    sample_dt: f64,
) -> Result<Vec<(f64, TimeSeries)>> {
    let rho0 = DensityMatrix::basis_projector(chain.sites, 0)?;
    let mut out = Vec::new();
    for &tm in tm_list {
        if tm > td {
            return Err(Error::InvalidParams(format!("t_m {tm} exceeds t_d {td}")));
        }
        let g = PI / tm;
        let model = CompositeModel::new(*chain, ApparatusParams::new(g, delta, 2)?)?;
        let schedule = MeasurementSchedule::new(tm, td - tm, total_time, sample_dt)?;
        out.push((tm, crate::dynamics::run_schedule(&rho0, &schedule, &model)?));
    }
    Ok(out)
}
