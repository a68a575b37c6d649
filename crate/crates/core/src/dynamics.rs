//! Premeasurement and free-evolution channels plus the repeated-measurement
//! scheduler.
//!
//! A measurement couples the chain to a fresh |A₀⟩⟨A₀| apparatus, evolves
//! the composite unitarily for the segment duration and discards the
//! apparatus; the map is CPTP by construction. Propagators are spectral,
//! so sampling inside a segment carries no step-size error.

use crate::error::{Error, Result};
use crate::model::{build_chain_hamiltonian, ChainParams, CompositeModel};
use crate::qla::{partial_trace_raw, ComplexMatrix, DensityMatrix, SpectralDecomp};

/// Segment kind of a repeated-measurement cycle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentKind {
    Measurement,
    Free,
}

impl SegmentKind {
    pub fn label(self) -> &'static str {
        match self {
            SegmentKind::Measurement => "M",
            SegmentKind::Free => "F",
        }
    }
}

/// Piecewise-constant schedule: measurement segments of length t_m
/// alternate with free segments of length t_f, optionally preceded by an
/// initial free stretch t_offset.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSchedule {
    pub t_m: f64,
    pub t_f: f64,
    pub t_offset: f64,
    pub total_time: f64,
    pub sample_dt: f64,
}

impl MeasurementSchedule {
    pub fn new(t_m: f64, t_f: f64, total_time: f64, sample_dt: f64) -> Result<Self> {
        Self::with_offset(t_m, t_f, 0.0, total_time, sample_dt)
    }

    pub fn with_offset(
        t_m: f64,
        t_f: f64,
        t_offset: f64,
        total_time: f64,
        sample_dt: f64,
    ) -> Result<Self> {
        for (name, v) in [("t_m", t_m), ("t_f", t_f), ("t_offset", t_offset)] {
            if v < 0.0 || !v.is_finite() {
                return Err(Error::InvalidParams(format!("{name} must be >= 0, got {v}")));
            }
        }
        if total_time <= 0.0 || !total_time.is_finite() {
            return Err(Error::InvalidParams(format!(
                "total_time must be > 0, got {total_time}"
            )));
        }
        if sample_dt <= 0.0 || !sample_dt.is_finite() {
            return Err(Error::InvalidParams(format!(
                "sample_dt must be > 0, got {sample_dt}"
            )));
        }
        if t_m > 0.0 && t_m + t_f <= 0.0 {
            return Err(Error::InvalidParams("cycle duration t_m + t_f must be > 0".into()));
        }
        Ok(Self { t_m, t_f, t_offset, total_time, sample_dt })
    }

    /// Period between the beginnings of subsequent measurements.
    pub fn t_d(&self) -> f64 {
        self.t_m + self.t_f
    }
}

/// One sampled point of the site-0 occupation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimeSample {
    pub t: f64,
    pub rho00: f64,
    pub segment: SegmentKind,
}

/// Sampled ρ₀₀ˢ(t) with segment labels.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    pub samples: Vec<TimeSample>,
}

/// System state threaded through a schedule run.
#[derive(Debug, Clone)]
pub struct ChannelState {
    pub rho: DensityMatrix,
    pub t_now: f64,
    pub cycle_index: usize,
}

/// Cached spectral decompositions for one parameter set; all segment
/// propagators derive from these, so schedules reuse them.
#[derive(Debug, Clone)]
pub struct Propagators {
    composite: SpectralDecomp,
    free: SpectralDecomp,
    sites: usize,
    app_dim: usize,
}

impl Propagators {
    pub fn new(model: &CompositeModel) -> Result<Self> {
        Ok(Self {
            composite: SpectralDecomp::new(&model.h_total)?,
            free: SpectralDecomp::new(&model.h_free)?,
            sites: model.chain.sites,
            app_dim: model.apparatus.dim,
        })
    }

    pub fn composite_propagator(&self, t: f64) -> ComplexMatrix {
        self.composite.propagator(t)
    }

    pub fn free_propagator(&self, t: f64) -> ComplexMatrix {
        self.free.propagator(t)
    }

    /// Kraus operators of the duration-t premeasurement,
    /// K_j = ⟨A_j|U(t)|A₀⟩ (apparatus reset to |A₀⟩ each cycle).
    pub fn kraus(&self, t: f64) -> Vec<ComplexMatrix> {
        let u = self.composite_propagator(t);
        let (l, na) = (self.sites, self.app_dim);
        (0..na)
            .map(|j| ComplexMatrix::from_fn(l, l, |m, n| u[(m * na + j, n * na)]))
            .collect()
    }

    fn apply_kraus(kraus: &[ComplexMatrix], rho: &ComplexMatrix) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(rho.rows(), rho.cols());
        for k in kraus {
            out = &out + &(&(k * rho) * &k.adjoint());
        }
        out
    }

    /// Measurement segment of duration t applied to a raw system matrix.
    pub fn measure_for(&self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        Self::apply_kraus(&self.kraus(t), rho)
    }

    /// Free segment of duration t applied to a raw system matrix.
    pub fn free_for(&self, rho: &ComplexMatrix, t: f64) -> ComplexMatrix {
        let u = self.free_propagator(t);
        &(&u * rho) * &u.adjoint()
    }
}

/// Tr_A[U(t_m)(ρˢ ⊗ |A₀⟩⟨A₀|)U(t_m)†] with t_m = 2π/(g·N_A); explicit
/// embed/evolve/trace route (the scheduler uses the equivalent Kraus form).
pub fn premeasurement_channel(rho: &DensityMatrix, model: &CompositeModel) -> Result<DensityMatrix> {
    if rho.dim() != model.chain.sites {
        return Err(Error::DimensionError(format!(
            "state dim {} vs chain sites {}",
            rho.dim(),
            model.chain.sites
        )));
    }
    let na = model.apparatus.dim;
    let reset = DensityMatrix::basis_projector(na, 0)?;
    let composite = crate::qla::kron(rho.matrix(), reset.matrix());
    let u = SpectralDecomp::new(&model.h_total)?.propagator(model.measurement_time());
    let evolved = &(&u * &composite) * &u.adjoint();
    let reduced = partial_trace_raw(&evolved, model.chain.sites, na)?;
    DensityMatrix::new(reduced)
}

/// U(t) ρ U(t)† under the bare chain Hamiltonian.
pub fn free_channel(rho: &DensityMatrix, t: f64, chain: &ChainParams) -> Result<DensityMatrix> {
    if rho.dim() != chain.sites {
        return Err(Error::DimensionError(format!(
            "state dim {} vs chain sites {}",
            rho.dim(),
            chain.sites
        )));
    }
    if t < 0.0 || !t.is_finite() {
        return Err(Error::InvalidParams(format!("time must be >= 0, got {t}")));
    }
    let h = build_chain_hamiltonian(chain);
    let u = SpectralDecomp::new(&h)?.propagator(t);
    DensityMatrix::new(&(&u * rho.matrix()) * &u.adjoint())
}

/// Real diagonal entry ⟨site|ρ|site⟩.
pub fn occupation(rho: &DensityMatrix, site: usize) -> Result<f64> {
    if site >= rho.dim() {
        return Err(Error::IndexError(format!("site {site} >= dim {}", rho.dim())));
    }
    Ok(rho.matrix()[(site, site)].re)
}

const T_EPS: f64 = 1e-12;

fn segment_list(schedule: &MeasurementSchedule) -> Vec<(SegmentKind, f64)> {
    let mut segments = Vec::new();
    let mut elapsed = 0.0;
    if schedule.t_offset > 0.0 {
        let d = schedule.t_offset.min(schedule.total_time);
        segments.push((SegmentKind::Free, d));
        elapsed += d;
    }
    if schedule.t_m <= 0.0 {
        // no measurements: a single free stretch covers the rest
        if schedule.total_time - elapsed > T_EPS {
            segments.push((SegmentKind::Free, schedule.total_time - elapsed));
        }
        return segments;
    }
    while schedule.total_time - elapsed > T_EPS {
        let d = schedule.t_m.min(schedule.total_time - elapsed);
        segments.push((SegmentKind::Measurement, d));
        elapsed += d;
        if schedule.t_f > 0.0 && schedule.total_time - elapsed > T_EPS {
            let d = schedule.t_f.min(schedule.total_time - elapsed);
            segments.push((SegmentKind::Free, d));
            elapsed += d;
        }
    }
    segments
}

/// Run a schedule, sampling ρ₀₀ˢ at multiples of sample_dt and at every
/// segment boundary. The state at each segment boundary is validated
/// against the density-matrix invariants.
pub fn run_schedule(
    rho0: &DensityMatrix,
    schedule: &MeasurementSchedule,
    model: &CompositeModel,
) -> Result<TimeSeries> {
    if rho0.dim() != model.chain.sites {
        return Err(Error::DimensionError(format!(
            "state dim {} vs chain sites {}",
            rho0.dim(),
            model.chain.sites
        )));
    }
    let props = Propagators::new(model)?;
    let segments = segment_list(schedule);

    let mut samples = Vec::new();
    let first_kind = segments.first().map_or(SegmentKind::Free, |s| s.0);
    samples.push(TimeSample {
        t: 0.0,
        rho00: rho0.matrix()[(0, 0)].re,
        segment: first_kind,
    });

    let mut state = rho0.matrix().clone();
    let mut seg_start = 0.0;
    for &(kind, duration) in &segments {
        let seg_end = seg_start + duration;
        // sample times inside the segment, plus the boundary
        let mut times: Vec<f64> = Vec::new();
        let mut k = (seg_start / schedule.sample_dt).floor() as i64 + 1;
        loop {
            let t = k as f64 * schedule.sample_dt;
            if t >= seg_end - T_EPS {
                break;
            }
            if t > seg_start + T_EPS {
                times.push(t);
            }
            k += 1;
        }
        times.push(seg_end);

        for &t in &times {
            let dt = t - seg_start;
            let advanced = match kind {
                SegmentKind::Measurement => props.measure_for(&state, dt),
                SegmentKind::Free => props.free_for(&state, dt),
            };
            samples.push(TimeSample {
                t,
                rho00: advanced[(0, 0)].re,
                segment: kind,
            });
        }

        state = match kind {
            SegmentKind::Measurement => props.measure_for(&state, duration),
            SegmentKind::Free => props.free_for(&state, duration),
        };
        // boundary-state invariant check
        DensityMatrix::new(state.clone())?;
        seg_start = seg_end;
    }

    Ok(TimeSeries { samples })
}

/// Exact ρ₀₀ˢ at a single evaluation time, cutting the final segment
/// mid-flight; the fast path behind sweep cells.
pub fn survival_at(
    props: &Propagators,
    schedule: &MeasurementSchedule,
    rho0: &ComplexMatrix,
    t_eval: f64,
) -> f64 {
    if t_eval <= T_EPS {
        return rho0[(0, 0)].re;
    }
    let full_kraus = if schedule.t_m > 0.0 {
        props.kraus(schedule.t_m)
    } else {
        Vec::new()
    };
    let full_free = if schedule.t_f > 0.0 {
        Some(props.free_propagator(schedule.t_f))
    } else {
        None
    };

    let mut state = rho0.clone();
    let mut t = 0.0;
    if schedule.t_offset > 0.0 {
        if t_eval <= schedule.t_offset + T_EPS {
            return props.free_for(&state, t_eval)[(0, 0)].re;
        }
        state = props.free_for(&state, schedule.t_offset);
        t = schedule.t_offset;
    }
    if schedule.t_m <= 0.0 {
        return props.free_for(&state, t_eval - t)[(0, 0)].re;
    }
    loop {
        if t_eval <= t + schedule.t_m + T_EPS {
            return props.measure_for(&state, t_eval - t)[(0, 0)].re;
        }
        state = Propagators::apply_kraus(&full_kraus, &state);
        t += schedule.t_m;
        if schedule.t_f > 0.0 {
            if t_eval <= t + schedule.t_f + T_EPS {
                return props.free_for(&state, t_eval - t)[(0, 0)].re;
            }
            state = {
                let u = full_free.as_ref().expect("t_f > 0");
                let tmp = u * &state;
                &tmp * &u.adjoint()
            };
            t += schedule.t_f;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ApparatusParams;
    use num_complex::Complex64 as C64;
    use std::f64::consts::PI;

    fn model(l: usize, eps: f64, g: f64, delta: f64) -> CompositeModel {
        CompositeModel::new(
            ChainParams::new(l, eps, 1.0).unwrap(),
            ApparatusParams::new(g, delta, 2).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn premeasurement_projective_limit() {
        // strong coupling drives |0⟩⟨0| close to the projective result
        let m = model(2, 0.0, 100.0, 0.0);
        let rho0 = DensityMatrix::basis_projector(2, 0).unwrap();
        let out = premeasurement_channel(&rho0, &m).unwrap();
        let t = crate::qla::trace_distance(&out, &rho0).unwrap();
        assert!(t <= 0.03, "trace distance {t}");
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn premeasurement_trace_preserving_on_mixed() {
        let m = model(3, 0.4, 2.0, 0.7);
        let rho = DensityMatrix::maximally_mixed(3).unwrap();
        let out = premeasurement_channel(&rho, &m).unwrap();
        assert!((out.matrix().trace().re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn premeasurement_matches_kraus_route() {
        let m = model(4, 0.3, 5.0, 1.5);
        let rho = DensityMatrix::maximally_mixed(4).unwrap();
        let a = premeasurement_channel(&rho, &m).unwrap();
        let props = Propagators::new(&m).unwrap();
        let b = props.measure_for(rho.matrix(), m.measurement_time());
        assert!(a.matrix().max_abs_diff(&b) < 1e-13);
    }

    #[test]
    fn perfect_measurement_without_chain_dynamics() {
        // dynamics disabled: H = g·ŝ⊗B̂ maps |s_j⟩|A₀⟩ to |s_j⟩|A_j⟩
        use crate::model::{build_apparatus_operator_n, build_system_observable_n, measurement_time};
        use crate::qla::{kron, unitary_from_hamiltonian, StateVector};
        let g = 3.0;
        for n in 2..=5 {
            let h = kron(&build_system_observable_n(n), &build_apparatus_operator_n(n).unwrap())
                .scale(C64::new(g, 0.0));
            let u = unitary_from_hamiltonian(&h, measurement_time(g, n).unwrap()).unwrap();
            for j in 0..n {
                let start = StateVector::basis(n, j)
                    .unwrap()
                    .tensor(&StateVector::basis(n, 0).unwrap());
                let target = StateVector::basis(n, j)
                    .unwrap()
                    .tensor(&StateVector::basis(n, j).unwrap());
                let overlap = target.inner(&start.evolve(&u));
                // global phase is exactly +1
                assert!((overlap - C64::ONE).norm() < 1e-12, "N={n} j={j}: {overlap}");
            }
        }
    }

    #[test]
    fn free_channel_examples() {
        let chain = ChainParams::new(2, 0.0, 1.0).unwrap();
        let rho0 = DensityMatrix::basis_projector(2, 0).unwrap();
        let same = free_channel(&rho0, 0.0, &chain).unwrap();
        assert!(same.matrix().max_abs_diff(rho0.matrix()) < 1e-15);

        // Rabi half period swaps the sites
        let out = free_channel(&rho0, PI / 2.0, &chain).unwrap();
        let target = DensityMatrix::basis_projector(2, 1).unwrap();
        assert!(out.matrix().max_abs_diff(target.matrix()) < 1e-13);
    }

    #[test]
    fn occupation_examples() {
        let rho = DensityMatrix::basis_projector(2, 0).unwrap();
        assert!((occupation(&rho, 0).unwrap() - 1.0).abs() < 1e-15);
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        assert!((occupation(&mixed, 2).unwrap() - 0.25).abs() < 1e-15);
        assert!(matches!(occupation(&rho, 5), Err(Error::IndexError(_))));
    }

    #[test]
    fn schedule_validation() {
        assert!(MeasurementSchedule::new(0.1, 0.9, 5.0, 0.01).is_ok());
        assert!(MeasurementSchedule::new(-0.1, 0.9, 5.0, 0.01).is_err());
        assert!(MeasurementSchedule::new(0.1, 0.9, 0.0, 0.01).is_err());
        assert!(MeasurementSchedule::new(0.1, 0.9, 5.0, 0.0).is_err());
        // t_m = 0 degenerates to free evolution, not an error
        assert!(MeasurementSchedule::new(0.0, 0.9, 5.0, 0.01).is_ok());
    }

    #[test]
    fn zero_tm_equals_free_evolution() {
        let m = model(5, 0.0, 10.0, 0.0);
        let rho0 = DensityMatrix::basis_projector(5, 0).unwrap();
        let schedule = MeasurementSchedule::new(0.0, 0.9, 5.0, 0.05).unwrap();
        let series = run_schedule(&rho0, &schedule, &m).unwrap();
        for s in &series.samples {
            let free = free_channel(&rho0, s.t, &m.chain).unwrap();
            assert!((s.rho00 - occupation(&free, 0).unwrap()).abs() < 1e-12);
            assert_eq!(s.segment, SegmentKind::Free);
        }
    }

    #[test]
    fn series_structure() {
        let m = model(3, 0.0, 10.0, 0.0);
        let rho0 = DensityMatrix::basis_projector(3, 0).unwrap();
        let schedule = MeasurementSchedule::new(PI / 10.0, 0.5, 3.0, 0.05).unwrap();
        let series = run_schedule(&rho0, &schedule, &m).unwrap();
        // strictly increasing times, values in [0,1]
        for w in series.samples.windows(2) {
            assert!(w[1].t > w[0].t);
        }
        for s in &series.samples {
            assert!(s.rho00 >= -1e-10 && s.rho00 <= 1.0 + 1e-10);
        }
        // both segment labels occur
        assert!(series.samples.iter().any(|s| s.segment == SegmentKind::Measurement));
        assert!(series.samples.iter().any(|s| s.segment == SegmentKind::Free));
        // boundaries are sampled
        let tm = PI / 10.0;
        assert!(series.samples.iter().any(|s| (s.t - tm).abs() < 1e-12));
        assert!(series.samples.iter().any(|s| (s.t - (tm + 0.5)).abs() < 1e-12));
    }

    #[test]
    fn run_schedule_matches_survival_at() {
        let m = model(5, 0.6, 20.0, 0.3);
        let rho0 = DensityMatrix::basis_projector(5, 0).unwrap();
        let schedule = MeasurementSchedule::new(PI / 20.0, 0.4, 4.0, 0.07).unwrap();
        let series = run_schedule(&rho0, &schedule, &m).unwrap();
        let props = Propagators::new(&m).unwrap();
        for s in series.samples.iter().step_by(7) {
            let v = survival_at(&props, &schedule, rho0.matrix(), s.t);
            assert!((v - s.rho00).abs() < 1e-12, "t={}", s.t);
        }
    }

    #[test]
    fn offset_delays_first_measurement() {
        let m = model(4, 0.0, 10.0, 0.0);
        let rho0 = DensityMatrix::basis_projector(4, 0).unwrap();
        let schedule = MeasurementSchedule::with_offset(0.2, 0.5, 0.6, 3.0, 0.05).unwrap();
        let series = run_schedule(&rho0, &schedule, &m).unwrap();
        for s in &series.samples {
            if s.t < 0.6 - 1e-9 {
                assert_eq!(s.segment, SegmentKind::Free, "t={}", s.t);
            }
        }
    }

    #[test]
    fn determinism() {
        let m = model(5, PI, 100.0, 0.0);
        let rho0 = DensityMatrix::basis_projector(5, 0).unwrap();
        let schedule = MeasurementSchedule::new(PI / 100.0, 0.9, 3.0, 0.01).unwrap();
        let a = run_schedule(&rho0, &schedule, &m).unwrap();
        let b = run_schedule(&rho0, &schedule, &m).unwrap();
        assert_eq!(a, b); // bitwise
    }

    #[test]
    fn measurements_hinder_decay_at_eps_zero() {
        let m = model(15, 0.0, 100.0, 0.0);
        let rho0 = DensityMatrix::basis_projector(15, 0).unwrap();
        let props = Propagators::new(&m).unwrap();
        let schedule = MeasurementSchedule::new(PI / 100.0, 0.9, 5.0, 0.01).unwrap();
        let measured = survival_at(&props, &schedule, rho0.matrix(), 5.0);
        let free = occupation(&free_channel(&rho0, 5.0, &m.chain).unwrap(), 0).unwrap();
        assert!(measured > free);
    }

    #[test]
    fn detuned_decay_slows_with_longer_gaps() {
        let m = model(15, PI, 100.0, 0.0);
        let rho0 = DensityMatrix::basis_projector(15, 0).unwrap();
        let props = Propagators::new(&m).unwrap();
        let fast = survival_at(
            &props,
            &MeasurementSchedule::new(PI / 100.0, 0.9, 5.0, 0.01).unwrap(),
            rho0.matrix(),
            5.0,
        );
        let slow = survival_at(
            &props,
            &MeasurementSchedule::new(PI / 100.0, 2.0, 5.0, 0.01).unwrap(),
            rho0.matrix(),
            5.0,
        );
        assert!(fast < slow);
    }
}
