//! Chain and apparatus Hamiltonians.
//!
//! The apparatus computational basis is the pointer basis {|A_j⟩}; the
//! conjugate basis {|B_k⟩} (in which the coupling operator is diagonal) is
//! reached through an explicit DFT / Hadamard basis change. Composite
//! indices are system-major: index = n·N_A + j for chain site n and
//! pointer state A_j.

use num_complex::Complex64 as C64;
use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::qla::{kron, ComplexMatrix, StateVector};

/// Chain parameters: site count, on-site shift of site 0, hopping γ.
/// Natural units: ħ = 1, energies in units of γ, times in ħ/γ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChainParams {
    pub sites: usize,
    pub epsilon: f64,
    pub gamma: f64,
}

impl ChainParams {
    pub fn new(sites: usize, epsilon: f64, gamma: f64) -> Result<Self> {
        if sites == 0 {
            return Err(Error::InvalidParams("chain needs at least one site".into()));
        }
        if gamma <= 0.0 || !gamma.is_finite() {
            return Err(Error::InvalidParams(format!("hopping gamma must be > 0, got {gamma}")));
        }
        if !epsilon.is_finite() {
            return Err(Error::InvalidParams(format!("epsilon must be finite, got {epsilon}")));
        }
        Ok(Self { sites, epsilon, gamma })
    }
}

/// Apparatus parameters: coupling g, spectrum shift δ, pointer dimension.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApparatusParams {
    pub g: f64,
    pub delta: f64,
    pub dim: usize,
}

impl ApparatusParams {
    pub fn new(g: f64, delta: f64, dim: usize) -> Result<Self> {
        if g <= 0.0 || !g.is_finite() {
            return Err(Error::InvalidParams(format!("coupling g must be > 0, got {g}")));
        }
        if dim < 2 {
            return Err(Error::InvalidParams(format!("apparatus dim must be >= 2, got {dim}")));
        }
        if !delta.is_finite() {
            return Err(Error::InvalidParams(format!("delta must be finite, got {delta}")));
        }
        Ok(Self { g, delta, dim })
    }

    /// Measurement duration t_m = 2π/(gN); π/g for the two-state apparatus.
    pub fn measurement_time(&self) -> f64 {
        measurement_time(self.g, self.dim).expect("params validated at construction")
    }
}

/// t_m = 2πħ/(gN), ħ = 1.
pub fn measurement_time(g: f64, n: usize) -> Result<f64> {
    if g <= 0.0 || !g.is_finite() {
        return Err(Error::InvalidParams(format!("coupling g must be > 0, got {g}")));
    }
    if n < 2 {
        return Err(Error::InvalidParams(format!("apparatus dim must be >= 2, got {n}")));
    }
    Ok(TAU / (g * n as f64))
}

/// H_c = ε|0⟩⟨0| − γ Σ (|n⟩⟨n+1| + h.c.)
pub fn build_chain_hamiltonian(p: &ChainParams) -> ComplexMatrix {
    let l = p.sites;
    let mut h = ComplexMatrix::zeros(l, l);
    h[(0, 0)] = C64::new(p.epsilon, 0.0);
    for n in 0..l.saturating_sub(1) {
        h[(n, n + 1)] = C64::new(-p.gamma, 0.0);
        h[(n + 1, n)] = C64::new(-p.gamma, 0.0);
    }
    h
}

/// Two-state apparatus operator in the pointer basis: B̂ = δ·I − ½σ_x,
/// i.e. δ ∓ ½ on the conjugate-basis states |B₀⟩, |B₁⟩.
pub fn build_apparatus_operator_2(delta: f64) -> ComplexMatrix {
    ComplexMatrix::from_real_rows(&[&[delta, -0.5], &[-0.5, delta]])
}

/// DFT relation between the pointer and conjugate bases:
/// W[j,k] = ⟨A_j|B_k⟩ = exp(2πi jk/N)/√N.
pub fn dft_basis_change(n: usize) -> ComplexMatrix {
    let norm = 1.0 / (n as f64).sqrt();
    ComplexMatrix::from_fn(n, n, |j, k| {
        C64::from_polar(norm, TAU * (j * k) as f64 / n as f64)
    })
}

/// General-N apparatus operator in the pointer basis:
/// B̂ = W·diag(0,…,N−1)·W† with the DFT relation above.
pub fn build_apparatus_operator_n(n: usize) -> Result<ComplexMatrix> {
    if n < 2 {
        return Err(Error::InvalidParams(format!("apparatus dim must be >= 2, got {n}")));
    }
    let w = dft_basis_change(n);
    let d = ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j { C64::new(i as f64, 0.0) } else { C64::ZERO }
    });
    Ok(&(&w * &d) * &w.adjoint())
}

/// System observable of the general-N measurement model: ŝ = Σ k|s_k⟩⟨s_k|.
pub fn build_system_observable_n(n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |i, j| {
        if i == j { C64::new(i as f64, 0.0) } else { C64::ZERO }
    })
}

/// The conjugate-basis pair for N = 2: |B₀⟩ = (|A₀⟩+|A₁⟩)/√2,
/// |B₁⟩ = (|A₀⟩−|A₁⟩)/√2. The Hadamard transform equals its own inverse.
pub fn hadamard_pair() -> (StateVector, StateVector) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let b0 = StateVector::from_amplitudes(vec![C64::new(s, 0.0), C64::new(s, 0.0)]);
    let b1 = StateVector::from_amplitudes(vec![C64::new(s, 0.0), C64::new(-s, 0.0)]);
    (b0, b1)
}

/// Chain + apparatus with the interaction switched on:
/// H = H_c ⊗ 1_A + g·(|0⟩⟨0| ⊗ B̂).
#[derive(Debug, Clone)]
pub struct CompositeModel {
    pub chain: ChainParams,
    pub apparatus: ApparatusParams,
    pub h_free: ComplexMatrix,
    pub h_total: ComplexMatrix,
}

impl CompositeModel {
    pub fn new(chain: ChainParams, apparatus: ApparatusParams) -> Result<Self> {
        let h_free = build_chain_hamiltonian(&chain);
        let b = if apparatus.dim == 2 {
            build_apparatus_operator_2(apparatus.delta)
        } else {
            build_apparatus_operator_n(apparatus.dim)?
        };
        let l = chain.sites;
        let mut p0 = ComplexMatrix::zeros(l, l);
        p0[(0, 0)] = C64::ONE;
        let interaction = kron(&p0, &b).scale(C64::new(apparatus.g, 0.0));
        let h_total = &kron(&h_free, &ComplexMatrix::identity(apparatus.dim)) + &interaction;
        Ok(Self { chain, apparatus, h_free, h_total })
    }

    pub fn composite_dim(&self) -> usize {
        self.chain.sites * self.apparatus.dim
    }

    pub fn measurement_time(&self) -> f64 {
        self.apparatus.measurement_time()
    }
}

#[allow(unused)]
fn two_site_energies(g: f64, delta: f64, gamma: f64) -> [f64; 4] {
    let a0 = g * (2.0 * delta - 1.0) / 4.0;
    let a1 = g * (2.0 * delta + 1.0) / 4.0;
    let r0 = (gamma * gamma + a0 * a0).sqrt();
    let r1 = (gamma * gamma + a1 * a1).sqrt();
    [a0 - r0, a0 + r0, a1 - r1, a1 + r1]
}
