//! The deformation factor `D(x) = 1 - τx + τ²x²`, the general `1 - f + g`
//! deformation, and the θ-chart that flattens the deformed measure.
//!
//! The chart is `θ(x) = (2/(τħ√3))·[arctan((2τx-1)/√3) + π/6]`, with
//! `ħ·D(x)·θ'(x) = 1`. It maps ℝ onto the open interval
//! `(-2π/(3τħ√3), 4π/(3τħ√3))`, so every improper integral against
//! `dx/D(x)` becomes an ordinary integral over a finite interval.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::jet::Series;

const SQRT3: f64 = 1.732_050_807_568_877_2;

/// Physical configuration: deformation parameter τ (inverse length),
/// reduced Planck constant ħ, and mass m.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawParams")]
pub struct DeformationParams {
    tau: f64,
    hbar: f64,
    mass: f64,
}

#[derive(Deserialize)]
struct RawParams {
    tau: f64,
    hbar: f64,
    mass: f64,
}

impl TryFrom<RawParams> for DeformationParams {
    type Error = Error;
    fn try_from(raw: RawParams) -> Result<Self> {
        DeformationParams::new(raw.tau, raw.hbar, raw.mass)
    }
}

impl DeformationParams {
    pub fn new(tau: f64, hbar: f64, mass: f64) -> Result<Self> {
        for (name, v) in [("tau", tau), ("hbar", hbar), ("mass", mass)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::config(format!("{name} must be positive and finite, got {v}")));
            }
        }
        Ok(DeformationParams { tau, hbar, mass })
    }

    /// τ with ħ = m = 1.
    pub fn with_tau(tau: f64) -> Result<Self> {
        Self::new(tau, 1.0, 1.0)
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    /// `τħ√3`, the natural momentum unit of the eigenstate phase.
    pub fn momentum_unit(&self) -> f64 {
        self.tau * self.hbar * SQRT3
    }
}

/// `D(x) = 1 - τx + τ²x²`, bounded below by 3/4.
pub fn deformation_factor(x: f64, params: &DeformationParams) -> f64 {
    let tx = params.tau * x;
    1.0 - tx + tx * tx
}

/// `D(x + t)` as a univariate series in `t`.
pub fn deformation_series(x: f64, order: usize, params: &DeformationParams) -> Series<f64> {
    let tau = params.tau;
    let mut coeffs = vec![0.0; order + 1];
    coeffs[0] = deformation_factor(x, params);
    if order >= 1 {
        coeffs[1] = -tau + 2.0 * tau * tau * x;
    }
    if order >= 2 {
        coeffs[2] = tau * tau;
    }
    Series::from_coeffs(coeffs)
}

/// The bijection `x ↔ θ`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThetaChart {
    params: DeformationParams,
    theta_min: f64,
    theta_max: f64,
}

impl ThetaChart {
    pub fn new(params: DeformationParams) -> Self {
        let c = params.momentum_unit();
        ThetaChart {
            params,
            theta_min: -2.0 * PI / (3.0 * c),
            theta_max: 4.0 * PI / (3.0 * c),
        }
    }

    pub fn params(&self) -> &DeformationParams {
        &self.params
    }

    pub fn theta_min(&self) -> f64 {
        self.theta_min
    }

    pub fn theta_max(&self) -> f64 {
        self.theta_max
    }

    /// `2π/(τħ√3)`.
    pub fn length(&self) -> f64 {
        2.0 * PI / self.params.momentum_unit()
    }

    /// Image of the symmetry point `x = 1/(2τ)` of `D`.
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.theta_min + self.theta_max)
    }

    pub fn theta_of_x(&self, x: f64) -> f64 {
        // arctan((2τx-1)/√3) + π/6 == atan2(√3τx, 2-τx), free of
        // cancellation near x = 0 and of overflow for large |x|.
        let tx = self.params.tau * x;
        2.0 / self.params.momentum_unit() * (SQRT3 * tx).atan2(2.0 - tx)
    }

    /// Inverse of [`theta_of_x`](Self::theta_of_x) on the open chart.
    pub fn x_of_theta(&self, theta: f64) -> Result<f64> {
        if !(theta > self.theta_min && theta < self.theta_max) {
            return Err(Error::ChartBoundary {
                theta,
                min: self.theta_min,
                max: self.theta_max,
            });
        }
        // With a = τħ√3θ/2 ∈ (-π/3, 2π/3): x = sin(a) / (τ sin(a + π/3)).
        let a = 0.5 * self.params.momentum_unit() * theta;
        Ok(a.sin() / (self.params.tau * (a + PI / 3.0).sin()))
    }

    /// `θ(x + t)` as a univariate series, from `θ' = 1/(ħD)`.
    pub fn theta_series(&self, x: f64, order: usize) -> Series<f64> {
        let theta0 = self.theta_of_x(x);
        if order == 0 {
            return Series::constant(1, 0, theta0);
        }
        let dtheta = deformation_series(x, order - 1, &self.params)
            .scale(self.params.hbar)
            .recip();
        dtheta.antiderivative(theta0)
    }
}

type Profile = Arc<dyn Fn(&Series<f64>) -> Series<f64> + Send + Sync>;

/// Deformation `1 - f(s) + g(s²)` of a nonnegative radial variable `s`.
///
/// `f` and `g` act on univariate series so that any derivative order is
/// available; `f'` and `g'` are read off the series.
#[derive(Clone)]
pub struct GeneralDeformation {
    f: Profile,
    g: Profile,
    domain_max: f64,
    label: String,
}

impl fmt::Debug for GeneralDeformation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GeneralDeformation")
            .field("label", &self.label)
            .field("domain_max", &self.domain_max)
            .finish()
    }
}

impl GeneralDeformation {
    pub fn new<F, G>(label: impl Into<String>, f: F, g: G) -> Self
    where
        F: Fn(&Series<f64>) -> Series<f64> + Send + Sync + 'static,
        G: Fn(&Series<f64>) -> Series<f64> + Send + Sync + 'static,
    {
        GeneralDeformation {
            f: Arc::new(f),
            g: Arc::new(g),
            domain_max: f64::INFINITY,
            label: label.into(),
        }
    }

    /// Restrict the domain of validity to `s < domain_max`.
    pub fn with_domain_max(mut self, domain_max: f64) -> Self {
        self.domain_max = domain_max;
        self
    }

    /// `f(s) = τs`, `g(q) = τ²q`.
    pub fn standard(tau: f64) -> Self {
        Self::new("standard", move |s| s.scale(tau), move |q| q.scale(tau * tau))
    }

    /// `f(s) = 1 - 1/(1 - αs²)`, `g = 0`, valid for `s < 1/√α`.
    pub fn inverse_quadratic(alpha: f64) -> Self {
        Self::new(
            format!("inverse-quadratic(alpha={alpha})"),
            move |s| {
                let one = Series::constant(1, s.order(), 1.0);
                let denom = &one - &(s * s).scale(alpha);
                &one - &denom.recip()
            },
            |q| Series::zero(1, q.order()),
        )
        .with_domain_max(1.0 / alpha.sqrt())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn domain_max(&self) -> f64 {
        self.domain_max
    }

    pub fn f(&self, s: f64) -> f64 {
        (self.f)(&Series::constant(1, 0, s)).value()
    }

    pub fn g(&self, q: f64) -> f64 {
        (self.g)(&Series::constant(1, 0, q)).value()
    }

    pub fn f_prime(&self, s: f64) -> f64 {
        (self.f)(&Series::variable(s, 1)).coeff1(1)
    }

    pub fn g_prime(&self, q: f64) -> f64 {
        (self.g)(&Series::variable(q, 1)).coeff1(1)
    }

    /// `1 - f(s) + g(s²)`.
    pub fn factor(&self, s: f64) -> Result<f64> {
        Ok(self.factor_series(&Series::constant(1, 0, s))?.value())
    }

    /// The factor along a series `s` (any number of variables).
    pub fn factor_series(&self, s: &Series<f64>) -> Result<Series<f64>> {
        let s0 = s.value();
        if !(s0 >= 0.0 && s0 < self.domain_max) {
            return Err(Error::Domain { at: s0, value: f64::NAN });
        }
        let seed = Series::variable(s0, s.order());
        let q = &seed * &seed;
        let profile = ((self.g)(&q) - (self.f)(&seed)).add_scalar(1.0);
        let value = profile.value();
        if !(value > 0.0) {
            return Err(Error::Domain { at: s0, value });
        }
        let coeffs: Vec<f64> = (0..=s.order()).map(|k| profile.coeff1(k)).collect();
        Ok(s.compose(&coeffs))
    }
}

fn derivative_coeffs(profile: &Profile, at: f64, order: usize) -> Vec<f64> {
    let series = profile(&Series::variable(at, order + 1));
    (0..=order).map(|m| series.coeff1(m + 1) * (m + 1) as f64).collect()
}

impl GeneralDeformation {
    /// `-f'(s)/s + 2g'(s²)` along a series `s`, the coefficient of the
    /// momentum commutator. Needs `s > 0`.
    pub fn commutator_coefficient_series(&self, s: &Series<f64>) -> Result<Series<f64>> {
        let s0 = s.value();
        if !(s0 > 0.0 && s0 < self.domain_max) {
            return Err(Error::Domain { at: s0, value: f64::NAN });
        }
        let order = s.order();
        let q = s * s;
        let fp = s.compose(&derivative_coeffs(&self.f, s0, order));
        let gp = q.compose(&derivative_coeffs(&self.g, s0 * s0, order));
        Ok(&gp.scale(2.0) - &(&fp / s))
    }
}

/// Free-function form of [`GeneralDeformation::factor`].
pub fn general_deformation_factor(x_norm: f64, gd: &GeneralDeformation) -> Result<f64> {
    gd.factor(x_norm)
}
