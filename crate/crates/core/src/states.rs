//! Momentum eigenstates `φ_η(x) = A·exp(iηθ(x))` of the deformed algebra.
//!
//! `A = √(τ√3/(2π))` normalizes them under `dx/D(x)`. Because the θ-chart
//! is a finite interval of length `L = 2π/(τħ√3)`, the states have finite
//! norm and finite kinetic energy, and two of them overlap as a finite
//! Fourier integral over the chart.

use std::f64::consts::PI;

use crate::algebra::{DeformationParams, ThetaChart};
use crate::error::{Error, Result};
use crate::operators::apply_p_squared;
use crate::quadrature::{inner_product, QuadratureGrid};
use crate::wave::{WaveFunction, C64};

/// Below this |argument| the sinc kernels use their Taylor series.
const SINC_SERIES_CUTOFF: f64 = 1e-6;

/// A momentum eigenstate together with its eigenvalue.
#[derive(Clone, Debug)]
pub struct EigenState {
    pub eta: f64,
    pub base: WaveFunction,
}

/// `A = √(τ√3/(2π))`.
pub fn normalization_constant(params: &DeformationParams) -> f64 {
    (params.tau() * 3f64.sqrt() / (2.0 * PI)).sqrt()
}

pub fn eigenstate(eta: f64, params: &DeformationParams) -> EigenState {
    let chart = ThetaChart::new(*params);
    let amp = normalization_constant(params);
    let base = WaveFunction::from_taylor(move |x, order| {
        let phase = chart.theta_series(x, order).scale(eta);
        phase.map(|p| C64::new(0.0, p)).exp().scale(C64::new(amp, 0.0))
    })
    .with_value_fn(move |x| C64::from_polar(amp, eta * chart.theta_of_x(x)))
    .with_label(format!("eigenstate(eta={eta})"));
    EigenState { eta, base }
}

fn sinc(z: f64) -> f64 {
    if z.abs() < SINC_SERIES_CUTOFF {
        let z2 = z * z;
        1.0 - z2 / 6.0 + z2 * z2 / 120.0
    } else {
        z.sin() / z
    }
}

/// The published sinc-form overlap
/// `(τħ√3/(2πΔ))·sin(2πΔ/(τħ√3))`, `Δ = η - η′`.
///
/// This closed form does not equal the quadrature of `⟨φ_η′|φ_η⟩`; see
/// [`overlap_exact`] for the kernel the inner product actually produces.
pub fn overlap_closed_form(eta: f64, eta_prime: f64, params: &DeformationParams) -> f64 {
    let delta = eta - eta_prime;
    sinc(2.0 * PI * delta / params.momentum_unit())
}

/// `⟨φ_η′|φ_η⟩ = A²ħ∫ e^{iΔθ} dθ` over the chart:
/// `e^{iΔθ_mid}·sin(ΔL/2)/(ΔL/2)`, where `θ_mid = π/(3τħ√3)` is the image
/// of `x = 1/(2τ)` and `L` the chart length.
pub fn overlap_exact(eta: f64, eta_prime: f64, params: &DeformationParams) -> C64 {
    let chart = ThetaChart::new(*params);
    let delta = eta - eta_prime;
    C64::from_polar(sinc(0.5 * delta * chart.length()), delta * chart.midpoint())
}

/// `η_n = (τħ√3/2)·n`, `n ∈ ℤ`.
pub fn lattice_eta(n: i64, params: &DeformationParams) -> f64 {
    0.5 * params.momentum_unit() * n as f64
}

/// [`lattice_eta`] restricted to `n ∈ ℕ`.
pub fn lattice_eta_natural(n: i64, params: &DeformationParams) -> Result<f64> {
    if n < 0 {
        return Err(Error::config(format!("natural lattice index must be >= 0, got {n}")));
    }
    Ok(lattice_eta(n, params))
}

/// Spacing `τħ√3 = 2π/L` at which the eigenstates are mutually orthogonal
/// under the deformed measure.
pub fn orthogonal_spacing(params: &DeformationParams) -> f64 {
    params.momentum_unit()
}

/// `⟨φ_η|P²|φ_η⟩ / (2m)` by quadrature.
pub fn kinetic_energy(eta: f64, params: &DeformationParams, grid: &QuadratureGrid) -> Result<f64> {
    let phi = eigenstate(eta, params).base;
    let p2 = apply_p_squared(&phi, params);
    let e = inner_product(&phi, &p2, grid)?;
    Ok(e.re / (2.0 * params.mass()))
}
