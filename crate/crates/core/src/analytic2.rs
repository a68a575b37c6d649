//! Closed-form results for the two-site chain coupled to the two-state
//! apparatus, used as exact oracles for the numerical engine.
//!
//! All formulas assume ε = 0; the ε ≠ 0 case has no closed form here and
//! is handled by the numeric channel. Removable singularities at
//! δ = ±1/2 are evaluated by second-order series expansion.

use num_complex::Complex64 as C64;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::qla::StateVector;

/// Window around δ = ±1/2 inside which the series expansions replace the
/// 0/0 closed forms.
const SINGULAR_WINDOW: f64 = 1e-6;

/// Eigenenergies and mixing angles of the minimal model (ε = 0).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoSiteSpectrum {
    pub e0_plus: f64,
    pub e0_minus: f64,
    pub e1_plus: f64,
    pub e1_minus: f64,
    /// tan(φ₀) = −4γ/(g(2δ−1)), φ₀ ∈ [0, π)
    pub phi0: f64,
    /// tan(φ₁) = −4γ/(g(2δ+1)), φ₁ ∈ [0, π)
    pub phi1: f64,
    pub omega0: f64,
    pub omega1: f64,
}

/// Normalized initial chain state c₀|0⟩ + c₁|1⟩.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialQubit {
    pub c0: C64,
    pub c1: C64,
}

impl InitialQubit {
    pub fn new(c0: C64, c1: C64) -> Result<Self> {
        let norm = (c0.norm_sqr() + c1.norm_sqr()).sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParams(format!(
                "initial qubit not normalized: |c0|^2+|c1|^2 = {}",
                norm * norm
            )));
        }
        Ok(Self { c0, c1 })
    }

    pub fn site0() -> Self {
        Self { c0: C64::ONE, c1: C64::ZERO }
    }

    pub fn balanced() -> Self {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Self { c0: C64::new(s, 0.0), c1: C64::new(s, 0.0) }
    }
}

fn mixing_angle(gamma: f64, branch: f64) -> f64 {
    // tan(φ) = −4γ/branch mapped into [0, π)
    let phi = (-4.0 * gamma / branch).atan();
    if phi < 0.0 { phi + PI } else { phi }
}

/// E_{n±} = g(2δ∓1)/4 ± √(γ² + g²(2δ∓1)²/16) with n = 0 for the lower
/// sign and n = 1 for the upper.
pub fn spectrum(g: f64, delta: f64, gamma: f64) -> Result<TwoSiteSpectrum> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!("gamma must be > 0, got {gamma}")));
    }
    if g < 0.0 || !g.is_finite() {
        return Err(Error::InvalidParams(format!("g must be >= 0, got {g}")));
    }
    let a0 = g * (2.0 * delta - 1.0) / 4.0;
    let a1 = g * (2.0 * delta + 1.0) / 4.0;
    let r0 = (gamma * gamma + a0 * a0).sqrt();
    let r1 = (gamma * gamma + a1 * a1).sqrt();
    Ok(TwoSiteSpectrum {
        e0_plus: a0 + r0,
        e0_minus: a0 - r0,
        e1_plus: a1 + r1,
        e1_minus: a1 - r1,
        phi0: mixing_angle(gamma, g * (2.0 * delta - 1.0)),
        phi1: mixing_angle(gamma, g * (2.0 * delta + 1.0)),
        omega0: 2.0 * r0,
        omega1: 2.0 * r1,
    })
}

/// ρ₀₀ˢ(t) = 1 + γ²[(cos Ω₀t − 1)/Ω₀² + (cos Ω₁t − 1)/Ω₁²], starting
/// from |0⟩|A₀⟩ at ε = 0.
pub fn survival_exact(t: f64, g: f64, delta: f64, gamma: f64) -> Result<f64> {
    let s = spectrum(g, delta, gamma)?;
    let g2 = gamma * gamma;
    Ok(1.0
        + g2 * (((s.omega0 * t).cos() - 1.0) / (s.omega0 * s.omega0)
            + ((s.omega1 * t).cos() - 1.0) / (s.omega1 * s.omega1)))
}

/// Short-time expansion
/// 1 − γ²t² + (1/3)(1 + g²(4δ²+1)/(16γ²))γ⁴t⁴.
pub fn survival_taylor(t: f64, g: f64, delta: f64, gamma: f64) -> Result<f64> {
    if gamma <= 0.0 || !gamma.is_finite() {
        return Err(Error::InvalidParams(format!("gamma must be > 0, got {gamma}")));
    }
    let g2 = gamma * gamma;
    let t2 = t * t;
    let quartic = (1.0 + g * g * (4.0 * delta * delta + 1.0) / (16.0 * g2)) / 3.0;
    Ok(1.0 - g2 * t2 + quartic * g2 * g2 * t2 * t2)
}

/// (2δ − sin πδ)/(1 − 4δ²) with the removable singularities filled in.
fn shift_factor(delta: f64) -> f64 {
    let u = 2.0 * delta - 1.0;
    let v = 2.0 * delta + 1.0;
    if u.abs() < SINGULAR_WINDOW {
        // 2δ − sin πδ = u + π²u²/8 + O(u⁴); 1 − 4δ² = −u(2 + u)
        return -(1.0 + PI * PI * u / 8.0) / (2.0 + u);
    }
    if v.abs() < SINGULAR_WINDOW {
        // 2δ − sin πδ = v − π²v²/8 + O(v⁴); 1 − 4δ² = v(2 − v)
        return (1.0 - PI * PI * v / 8.0) / (2.0 - v);
    }
    (2.0 * delta - (PI * delta).sin()) / (1.0 - 4.0 * delta * delta)
}

/// cos(πδ)/(1 − 4δ²) with the removable singularities filled in.
fn parity_factor(delta: f64) -> f64 {
    let u = 2.0 * delta - 1.0;
    let v = 2.0 * delta + 1.0;
    if u.abs() < SINGULAR_WINDOW {
        // cos πδ = −πu/2 + (πu/2)³/6; 1 − 4δ² = −u(2 + u)
        let x = PI * u / 2.0;
        return (PI / 2.0 - x * x * PI / 12.0) / (2.0 + u);
    }
    if v.abs() < SINGULAR_WINDOW {
        let x = PI * v / 2.0;
        return (PI / 2.0 - x * x * PI / 12.0) / (2.0 - v);
    }
    (PI * delta).cos() / (1.0 - 4.0 * delta * delta)
}

/// Linear coefficient of the large-g trace distance,
/// T(ρˢ(t_m), ρ_proj) = (2γ/g)·T₁ + O(1/g²). Note the formula carries
/// c₀², c₁² (not moduli); reality enters only through the outer modulus.
pub fn t1_coefficient(q: &InitialQubit, delta: f64) -> f64 {
    let sum = q.c0 * q.c0 + q.c1 * q.c1;
    let diff = q.c0 * q.c0 - q.c1 * q.c1;
    (sum * shift_factor(delta) - C64::i() * parity_factor(delta) * diff).norm()
}

/// T₁′ = √[(1 − sin πδ)/(2(2δ−1)²) + (1 + sin πδ)/(2(2δ+1)²)], the
/// coefficient for the distance to the ideal post-measurement state.
pub fn t1_prime(delta: f64) -> f64 {
    let u = 2.0 * delta - 1.0;
    let v = 2.0 * delta + 1.0;
    let term_minus = if u.abs() < SINGULAR_WINDOW {
        // 1 − sin πδ = 1 − cos(πu/2) = (πu/2)²/2·(1 − (πu/2)²/12)
        let x = PI * u / 2.0;
        (PI * PI / 16.0) * (1.0 - x * x / 12.0)
    } else {
        (1.0 - (PI * delta).sin()) / (2.0 * u * u)
    };
    let term_plus = if v.abs() < SINGULAR_WINDOW {
        let x = PI * v / 2.0;
        (PI * PI / 16.0) * (1.0 - x * x / 12.0)
    } else {
        (1.0 + (PI * delta).sin()) / (2.0 * v * v)
    };
    (term_minus + term_plus).sqrt()
}

/// Post-measurement state of |0⟩|A₀⟩ to leading order in 1/g, in the
/// system-major composite basis (|0A₀⟩, |0A₁⟩, |1A₀⟩, |1A₁⟩); deliberately
/// unnormalized at this order.
pub fn leading_order_state(g: f64, delta: f64, gamma: f64) -> StateVector {
    let phase = C64::i() * C64::from_polar(1.0, -PI * delta);

    let u = 2.0 * delta - 1.0;
    // (1 − ie^{−iπδ})/(2δ−1); at δ = 1/2 the numerator is 1 − e^{−iπu/2}
    let f_minus = if u.abs() < SINGULAR_WINDOW {
        C64::new(PI * PI * u / 8.0, PI / 2.0)
    } else {
        (C64::ONE - phase) / u
    };
    let v = 2.0 * delta + 1.0;
    let f_plus = if v.abs() < SINGULAR_WINDOW {
        C64::new(PI * PI * v / 8.0, PI / 2.0)
    } else {
        (C64::ONE + phase) / v
    };

    let ratio = C64::new(gamma / g, 0.0);
    StateVector::from_amplitudes(vec![
        C64::ZERO,
        phase,
        ratio * (f_minus + f_plus),
        ratio * (f_minus - f_plus),
    ])
}
