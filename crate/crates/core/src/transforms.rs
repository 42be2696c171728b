//! Quasi-momentum representation `ψ(η) = ⟨φ_η|ψ⟩` and its inverse.
//!
//! In the θ-chart the pair is an ordinary Fourier pair:
//! `ψ(η) = Aħ∫ψ(θ)e^{-iηθ}dθ` and
//! `ψ(θ) = (1/(ħ√(2πτ√3)))∫ψ(η)e^{iηθ}dη`, with constants composing to
//! `1/(2π)`. The forward integral runs on the quadrature grid; the inverse
//! is a trapezoid sum over a symmetric η grid. An η step of at most
//! `τħ√3 = 2π/L` avoids aliasing of states spread over the whole chart.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{DeformationParams, ThetaChart};
use crate::error::{Error, Result};
use crate::jet::Series;
use crate::quadrature::{check_convergent, QuadratureGrid};
use crate::states::normalization_constant;
use crate::wave::{WaveFunction, C64};

/// Default `eta_max` in units of `τħ`.
pub const DEFAULT_ETA_MAX_MULT: f64 = 40.0;
/// Default `eta_step = τħ√3 / DEFAULT_ETA_STEP_DIV`.
pub const DEFAULT_ETA_STEP_DIV: f64 = 8.0;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct EtaGrid {
    pub eta_max: f64,
    pub eta_step: f64,
}

impl EtaGrid {
    pub fn new(eta_max: f64, eta_step: f64) -> Result<Self> {
        if !(eta_step > 0.0 && eta_step.is_finite() && eta_max >= eta_step && eta_max.is_finite()) {
            return Err(Error::config(format!(
                "eta grid needs 0 < eta_step <= eta_max, got step {eta_step}, max {eta_max}"
            )));
        }
        Ok(EtaGrid { eta_max, eta_step })
    }

    /// `eta_max = mult·τħ`, `eta_step = τħ√3/div`.
    pub fn scaled(mult: f64, div: f64, params: &DeformationParams) -> Result<Self> {
        let th = params.tau() * params.hbar();
        Self::new(mult * th, params.momentum_unit() / div)
    }

    /// `(40τħ, τħ√3/8)`.
    pub fn default_for(params: &DeformationParams) -> Self {
        Self::scaled(DEFAULT_ETA_MAX_MULT, DEFAULT_ETA_STEP_DIV, params).expect("default eta grid is valid")
    }

    /// Samples on each side of zero.
    pub fn half_len(&self) -> usize {
        ((self.eta_max / self.eta_step) * (1.0 + 1e-12)).floor() as usize
    }

    /// `η_k = k·eta_step`, `|k| ≤ half_len`.
    pub fn etas(&self) -> Vec<f64> {
        let n = self.half_len() as i64;
        (-n..=n).map(|k| k as f64 * self.eta_step).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct QuasiMomentumSamples {
    pub etas: Vec<f64>,
    pub values: Vec<C64>,
    pub eta_step: f64,
    pub eta_max: f64,
}

impl QuasiMomentumSamples {
    pub fn eta_grid(&self) -> EtaGrid {
        EtaGrid {
            eta_max: self.eta_max,
            eta_step: self.eta_step,
        }
    }

    /// Trapezoid weights over the sample grid.
    fn weight(&self, k: usize) -> f64 {
        if k == 0 || k + 1 == self.etas.len() {
            0.5 * self.eta_step
        } else {
            self.eta_step
        }
    }

    fn check_compatible(&self, other: &QuasiMomentumSamples) -> Result<()> {
        if self.etas.len() != other.etas.len() || self.eta_step != other.eta_step {
            return Err(Error::config("quasi-momentum samples live on different eta grids"));
        }
        Ok(())
    }
}

fn check_params(params: &DeformationParams, grid: &QuadratureGrid) -> Result<()> {
    if grid.chart().params() != params {
        return Err(Error::config("quadrature grid was built for different parameters"));
    }
    Ok(())
}

fn forward_from_nodes(values: &[C64], eta_grid: &EtaGrid, params: &DeformationParams, grid: &QuadratureGrid) -> Result<QuasiMomentumSamples> {
    let amp = normalization_constant(params);
    let thetas = grid.nodes();
    let etas = eta_grid.etas();
    let out: Result<Vec<C64>> = etas
        .par_iter()
        .map(|&eta| Ok(amp * grid.weighted_sum(|i| values[i] * C64::from_polar(1.0, -eta * thetas[i]))?))
        .collect();
    Ok(QuasiMomentumSamples {
        etas,
        values: out?,
        eta_step: eta_grid.eta_step,
        eta_max: eta_grid.eta_max,
    })
}

/// `ψ(η_k) = A·∫dx/D ψ(x) e^{-iη_kθ(x)}`.
pub fn to_quasi_momentum(
    psi: &WaveFunction,
    eta_grid: &EtaGrid,
    params: &DeformationParams,
    grid: &QuadratureGrid,
) -> Result<QuasiMomentumSamples> {
    check_params(params, grid)?;
    let values: Vec<C64> = grid.positions().par_iter().map(|&x| psi.value(x)).collect();
    forward_from_nodes(&values, eta_grid, params, grid)
}

fn inverse_prefactor(params: &DeformationParams) -> f64 {
    let tau = params.tau();
    1.0 / (params.hbar() * (2.0 * std::f64::consts::PI * tau * 3f64.sqrt()).sqrt())
}

fn synthesize(samples: &QuasiMomentumSamples, theta: f64, pref: f64) -> C64 {
    let terms: Vec<C64> = samples
        .etas
        .iter()
        .zip(&samples.values)
        .enumerate()
        .map(|(k, (&eta, &v))| samples.weight(k) * v * C64::from_polar(1.0, eta * theta))
        .collect();
    pref * crate::quadrature::pairwise_sum(&terms)
}

/// Trapezoid inverse `(1/(ħ√(2πτ√3)))·Σ Δη ψ(η_k) e^{iη_kθ(x)}` at one point.
pub fn from_quasi_momentum(samples: &QuasiMomentumSamples, x: f64, params: &DeformationParams) -> C64 {
    let theta = ThetaChart::new(*params).theta_of_x(x);
    synthesize(samples, theta, inverse_prefactor(params))
}

/// The inverse transform as a state, with exact jets.
pub fn reconstruct(samples: &QuasiMomentumSamples, params: &DeformationParams) -> WaveFunction {
    let chart = ThetaChart::new(*params);
    let pref = inverse_prefactor(params);
    let s1 = samples.clone();
    let s2 = samples.clone();
    WaveFunction::from_taylor(move |x, order| {
        let theta = chart.theta_series(x, order);
        let t0 = theta.value();
        let dtheta = theta.clone().add_scalar(-t0).to_complex();
        let mut acc = Series::zero(1, order);
        for (k, (&eta, &v)) in s1.etas.iter().zip(&s1.values).enumerate() {
            let c = pref * s1.weight(k) * v * C64::from_polar(1.0, eta * t0);
            let phase = dtheta.scale(C64::new(0.0, eta)).exp().scale(c);
            acc = &acc + &phase;
        }
        acc
    })
    .with_value_fn(move |x| synthesize(&s2, chart.theta_of_x(x), pref))
    .with_label("quasi-momentum reconstruction")
}

fn reconstruct_on_nodes(samples: &QuasiMomentumSamples, params: &DeformationParams, grid: &QuadratureGrid) -> Vec<C64> {
    let pref = inverse_prefactor(params);
    grid.nodes().par_iter().map(|&t| synthesize(samples, t, pref)).collect()
}

/// Deformed-measure L² distance between `ψ` and its transformed round trip.
pub fn roundtrip_error(
    psi: &WaveFunction,
    eta_grid: &EtaGrid,
    params: &DeformationParams,
    grid: &QuadratureGrid,
) -> Result<f64> {
    check_params(params, grid)?;
    let values: Vec<C64> = grid.positions().par_iter().map(|&x| psi.value(x)).collect();
    let samples = forward_from_nodes(&values, eta_grid, params, grid)?;
    let back = reconstruct_on_nodes(&samples, params, grid);
    let err2 = grid.weighted_sum(|i| C64::new((values[i] - back[i]).norm_sqr(), 0.0))?;
    Ok(err2.re.max(0.0).sqrt())
}

/// `(Σ Δη|ψ(η_k)|²)/⟨ψ|ψ⟩`, which tends to `√3τħ`.
pub fn parseval_factor(
    psi: &WaveFunction,
    eta_grid: &EtaGrid,
    params: &DeformationParams,
    grid: &QuadratureGrid,
) -> Result<f64> {
    let samples = to_quasi_momentum(psi, eta_grid, params, grid)?;
    let spectral: f64 = (0..samples.values.len())
        .map(|k| samples.weight(k) * samples.values[k].norm_sqr())
        .sum();
    let n2 = crate::quadrature::norm_squared(psi, grid)?;
    if !(n2 > f64::MIN_POSITIVE) {
        return Err(Error::ZeroNorm);
    }
    Ok(spectral / n2)
}

/// `P̂ψ(η) = ηψ(η)`.
pub fn apply_p_quasi(samples: &QuasiMomentumSamples) -> QuasiMomentumSamples {
    let mut out = samples.clone();
    for (v, &eta) in out.values.iter_mut().zip(&samples.etas) {
        *v *= eta;
    }
    out
}

/// `X̂` in the quasi representation, by conjugation: reconstruct on the
/// grid, multiply by `x`, transform back on the same η grid.
///
/// Fails with `DivergentMoment` when `⟨X²⟩` of the reconstruction does not
/// converge.
pub fn apply_x_quasi(
    samples: &QuasiMomentumSamples,
    params: &DeformationParams,
    grid: &QuadratureGrid,
) -> Result<QuasiMomentumSamples> {
    check_params(params, grid)?;
    let x2_moment = |g: &QuadratureGrid| -> Result<C64> {
        let back = reconstruct_on_nodes(samples, params, g);
        let xs = g.positions();
        g.weighted_sum(|i| C64::new(xs[i] * xs[i] * back[i].norm_sqr(), 0.0))
    };
    check_convergent("<X^2>", x2_moment(grid)?, x2_moment(grid.truncated())?)?;
    let back = reconstruct_on_nodes(samples, params, grid);
    let xs = grid.positions();
    let x_psi: Vec<C64> = back.iter().zip(xs).map(|(&v, &x)| x * v).collect();
    forward_from_nodes(&x_psi, &samples.eta_grid(), params, grid)
}

/// `(1/(2πħ²√3))∫dx/D ∫dη′ ∫dη Ψ*(η′)Φ(η)e^{i(η-η′)θ(x)}`, discretized
/// with trapezoid weights in η, η′ and the grid in x.
///
/// The x-integral depends on `η - η′` only and is tabulated once per
/// lattice difference. The result equals `τ·⟨ψ|φ⟩` of the underlying
/// position states.
pub fn scalar_product_quasi(
    psi_s: &QuasiMomentumSamples,
    phi_s: &QuasiMomentumSamples,
    params: &DeformationParams,
    grid: &QuadratureGrid,
) -> Result<C64> {
    check_params(params, grid)?;
    psi_s.check_compatible(phi_s)?;
    let n = psi_s.etas.len();
    let h = psi_s.eta_step;
    let thetas = grid.nodes();
    // kernel[d + (n-1)] = ∫dx/D e^{i d h θ(x)}
    let kernel: Result<Vec<C64>> = (0..2 * n - 1)
        .into_par_iter()
        .map(|j| {
            let d = j as f64 - (n - 1) as f64;
            grid.weighted_sum(|i| C64::from_polar(1.0, d * h * thetas[i]))
        })
        .collect();
    let kernel = kernel?;
    let rows: Vec<C64> = (0..n)
        .into_par_iter()
        .map(|l| {
            let terms: Vec<C64> = (0..n)
                .map(|k| phi_s.weight(k) * phi_s.values[k] * kernel[k + n - 1 - l])
                .collect();
            psi_s.weight(l) * psi_s.values[l].conj() * crate::quadrature::pairwise_sum(&terms)
        })
        .collect();
    let hbar = params.hbar();
    let pref = 1.0 / (2.0 * std::f64::consts::PI * hbar * hbar * 3f64.sqrt());
    Ok(pref * crate::quadrature::pairwise_sum(&rows))
}
