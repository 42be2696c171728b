//! Moments under the deformed measure, the generalized uncertainty bound
//! `ΔXΔP ≥ (ħ/2)(1 - τ⟨X⟩ + τ²⟨X²⟩)` and its saturation branches.

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{deformation_factor, DeformationParams};
use crate::error::{Error, Result};
use crate::quadrature::{check_convergent, QuadratureGrid};
use crate::wave::{WaveFunction, C64};

/// Tolerance on `⟨ψ|ψ⟩ - 1` accepted by [`moments`].
pub const NORMALIZATION_TOL: f64 = 1e-8;

/// A report is `satisfied` when its margin is at least `-GUP_SLACK`.
pub const GUP_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UncertaintyReport {
    pub mean_x: f64,
    pub mean_x2: f64,
    pub mean_p: f64,
    pub mean_p2: f64,
    pub delta_x: f64,
    pub delta_p: f64,
    pub gup_rhs: f64,
    pub satisfied: bool,
    /// `ΔXΔP - gup_rhs`.
    pub margin: f64,
    /// Imaginary part of `⟨ψ|P̂ψ⟩`; zero for states vanishing at the chart ends.
    pub mean_p_imag: f64,
    pub norm: f64,
}

/// Per-node integrands: |ψ|², x|ψ|², x²|ψ|², ψ*P̂ψ, |P̂ψ|².
fn moment_sums(psi: &WaveFunction, params: &DeformationParams, grid: &QuadratureGrid) -> Result<[C64; 5]> {
    let hbar = params.hbar();
    let samples: Vec<[C64; 5]> = grid
        .positions()
        .par_iter()
        .map(|&x| {
            let s = psi.taylor(x, 1);
            let v = s.value();
            let p = C64::new(0.0, -hbar * deformation_factor(x, params)) * s.coeff1(1);
            let rho = v.norm_sqr();
            [
                C64::new(rho, 0.0),
                C64::new(x * rho, 0.0),
                C64::new(x * x * rho, 0.0),
                v.conj() * p,
                C64::new(p.norm_sqr(), 0.0),
            ]
        })
        .collect();
    let mut out = [C64::new(0.0, 0.0); 5];
    for (m, slot) in out.iter_mut().enumerate() {
        *slot = grid.weighted_sum(|i| samples[i][m])?;
    }
    Ok(out)
}

/// `⟨X⟩, ⟨X²⟩, ⟨P⟩ = ⟨ψ|P̂ψ⟩, ⟨P²⟩ = ⟨P̂ψ|P̂ψ⟩` and the bound.
///
/// Every moment is checked against the guard-truncated grid, so states
/// whose `⟨X²⟩` diverges (plane waves) raise `DivergentMoment`.
pub fn moments(psi: &WaveFunction, params: &DeformationParams, grid: &QuadratureGrid) -> Result<UncertaintyReport> {
    let full = moment_sums(psi, params, grid)?;
    let norm = full[0].re;
    if !((norm - 1.0).abs() <= NORMALIZATION_TOL) {
        return Err(Error::NotNormalized { norm });
    }
    let guarded = moment_sums(psi, params, grid.truncated())?;
    let names = ["<1>", "<X>", "<X^2>", "<P>", "<P^2>"];
    let mut m = [C64::new(0.0, 0.0); 5];
    // second moments first: they carry the divergence of non-decaying states
    for k in [0, 2, 4, 1, 3] {
        m[k] = check_convergent(names[k], full[k], guarded[k])?;
    }
    let (mean_x, mean_x2, mean_p, mean_p2) = (m[1].re, m[2].re, m[3].re, m[4].re);
    let delta_x = (mean_x2 - mean_x * mean_x).max(0.0).sqrt();
    let delta_p = (mean_p2 - mean_p * mean_p).max(0.0).sqrt();
    let rhs = gup_rhs(mean_x, mean_x2, params);
    let margin = delta_x * delta_p - rhs;
    Ok(UncertaintyReport {
        mean_x,
        mean_x2,
        mean_p,
        mean_p2,
        delta_x,
        delta_p,
        gup_rhs: rhs,
        satisfied: margin >= -GUP_SLACK,
        margin,
        mean_p_imag: m[3].im,
        norm,
    })
}

/// `(ħ/2)(1 - τ⟨X⟩ + τ²⟨X²⟩)`.
pub fn gup_rhs(mean_x: f64, mean_x2: f64, params: &DeformationParams) -> f64 {
    let tau = params.tau();
    0.5 * params.hbar() * (1.0 - tau * mean_x + tau * tau * mean_x2)
}

/// Saturation roots of the bound in `ΔX` at fixed `ΔP` and `⟨X⟩`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum DeltaXBranches {
    Roots { lower: f64, upper: f64 },
    NoRealSolution,
}

/// Solve `ΔX² - 2bΔX + K/τ² = 0` with `b = ΔP/(ħτ²)` and
/// `K = 1 - τ⟨X⟩ + τ²⟨X⟩²`.
///
/// The discriminant is formed as `(ΔP - ħτ√K)(ΔP + ħτ√K)/(ħτ²)²` so that
/// `ΔP = ħτ` at `⟨X⟩ = 0` gives the double root `1/τ` without cancellation.
pub fn delta_x_branches(delta_p: f64, mean_x: f64, params: &DeformationParams) -> Result<DeltaXBranches> {
    if !(delta_p > 0.0 && delta_p.is_finite()) {
        return Err(Error::config(format!("delta_p must be positive, got {delta_p}")));
    }
    let tau = params.tau();
    let ht = params.hbar() * tau;
    let k = 1.0 - tau * mean_x + tau * tau * mean_x * mean_x;
    let r = ht * k.sqrt();
    let num = (delta_p - r) * (delta_p + r);
    if num < 0.0 {
        return Ok(DeltaXBranches::NoRealSolution);
    }
    let scale = ht * tau;
    let b = delta_p / scale;
    let root = num.sqrt() / scale;
    Ok(DeltaXBranches::Roots { lower: b - root, upper: b + root })
}

/// `(ΔX_max, ΔP_min) = (1/τ, ħτ)`.
pub fn extremal_uncertainties(params: &DeformationParams) -> (f64, f64) {
    (1.0 / params.tau(), params.hbar() * params.tau())
}
