//! The n-dimensional algebra `[X̂ᵢ, P̂ⱼ] = iħδᵢⱼDₙ(x)` with
//! `P̂ⱼ = -iħDₙ(x)∂ⱼ` and `Dₙ = 1 - f(‖x‖) + g(‖x‖²)`.
//!
//! States are evaluated as multivariate Taylor series around a point, so
//! nested operator products differentiate exactly. `‖x‖` is the ℓ¹ norm
//! by default; its derivatives do not exist on coordinate hyperplanes, and
//! points closer than `axis_eps` to one are rejected.

use std::fmt;
use std::sync::Arc;

use crate::algebra::{DeformationParams, GeneralDeformation};
use crate::error::{Error, Result};
use crate::families::hermite;
use crate::jet::Series;
use crate::wave::C64;

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NormKind {
    /// `Σ|xᵢ|`.
    #[default]
    L1,
    /// `√(Σxᵢ²)`.
    Euclidean,
}

#[derive(Clone, Debug)]
pub enum NDimDeformation {
    /// `1 - τs + τ²s²` with τ from the base parameters.
    Standard,
    General(GeneralDeformation),
}

#[derive(Clone, Debug)]
pub struct NDimParams {
    dim: usize,
    base: DeformationParams,
    norm_kind: NormKind,
    deformation: NDimDeformation,
    axis_eps: f64,
}

impl NDimParams {
    /// Standard deformation, ℓ¹ norm, `axis_eps = 1e-6/τ`.
    pub fn new(dim: usize, base: DeformationParams) -> Result<Self> {
        if dim == 0 {
            return Err(Error::config("dimension must be at least 1"));
        }
        Ok(NDimParams {
            dim,
            base,
            norm_kind: NormKind::L1,
            deformation: NDimDeformation::Standard,
            axis_eps: 1e-6 / base.tau(),
        })
    }

    pub fn with_norm(mut self, norm_kind: NormKind) -> Self {
        self.norm_kind = norm_kind;
        self
    }

    pub fn with_deformation(mut self, deformation: NDimDeformation) -> Self {
        self.deformation = deformation;
        self
    }

    pub fn with_axis_eps(mut self, eps: f64) -> Self {
        self.axis_eps = eps;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn base(&self) -> &DeformationParams {
        &self.base
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm_kind
    }

    pub fn deformation(&self) -> &NDimDeformation {
        &self.deformation
    }

    pub fn axis_eps(&self) -> f64 {
        self.axis_eps
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.dim {
            return Err(Error::Index { index, dim: self.dim });
        }
        Ok(())
    }

    fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::config(format!("point has {} coordinates, expected {}", x.len(), self.dim)));
        }
        Ok(())
    }

    /// `‖x + t‖` as a series in the displacement `t`.
    pub fn norm_series(&self, x: &[f64], order: usize) -> Result<Series<f64>> {
        self.check_point(x)?;
        let n = self.dim;
        match self.norm_kind {
            NormKind::L1 => {
                let mut s = Series::zero(n, order);
                for (axis, &xi) in x.iter().enumerate() {
                    if xi.abs() < self.axis_eps {
                        return Err(Error::AxisSingularity { axis, value: xi, eps: self.axis_eps });
                    }
                    let c = Series::coordinate(n, order, axis, xi);
                    s = &s + &c.scale(xi.signum());
                }
                Ok(s)
            }
            NormKind::Euclidean => {
                let r = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if r < self.axis_eps {
                    let axis = (0..n).max_by(|&a, &b| x[a].abs().total_cmp(&x[b].abs())).unwrap_or(0);
                    return Err(Error::AxisSingularity { axis, value: r, eps: self.axis_eps });
                }
                let mut q = Series::zero(n, order);
                for (axis, &xi) in x.iter().enumerate() {
                    let c = Series::coordinate(n, order, axis, xi);
                    q = &q + &(&c * &c);
                }
                Ok(q.sqrt())
            }
        }
    }

    /// `Dₙ(x + t)`.
    pub fn factor_series(&self, x: &[f64], order: usize) -> Result<Series<f64>> {
        let s = self.norm_series(x, order)?;
        match &self.deformation {
            NDimDeformation::Standard => {
                let tau = self.base.tau();
                Ok((&(&s * &s).scale(tau * tau) - &s.scale(tau)).add_scalar(1.0))
            }
            NDimDeformation::General(gd) => gd.factor_series(&s),
        }
    }

    pub fn factor(&self, x: &[f64]) -> Result<f64> {
        Ok(self.factor_series(x, 0)?.value())
    }

    /// `-f'(s)/s + 2g'(s²)` at `s = ‖x + t‖`; `τ(2τ - 1/s)` for the
    /// standard deformation.
    pub fn commutator_coefficient_series(&self, x: &[f64], order: usize) -> Result<Series<f64>> {
        let s = self.norm_series(x, order)?;
        match &self.deformation {
            NDimDeformation::Standard => {
                let tau = self.base.tau();
                Ok((-s.recip()).add_scalar(2.0 * tau).scale(tau))
            }
            NDimDeformation::General(gd) => gd.commutator_coefficient_series(&s),
        }
    }
}

type EvalFn = dyn Fn(&[f64], usize) -> Result<Series<C64>> + Send + Sync;

/// A state on ℝⁿ: `eval(x, k)` gives the Taylor series of `ψ(x + t)` in
/// `t ∈ ℝⁿ` to total order `k`.
#[derive(Clone)]
pub struct NDimWaveFunction {
    dim: usize,
    eval: Arc<EvalFn>,
}

impl fmt::Debug for NDimWaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("NDimWaveFunction").field("dim", &self.dim).finish()
    }
}

impl NDimWaveFunction {
    pub fn new<F>(dim: usize, eval: F) -> Self
    where
        F: Fn(&[f64], usize) -> Result<Series<C64>> + Send + Sync + 'static,
    {
        NDimWaveFunction { dim, eval: Arc::new(eval) }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn taylor(&self, x: &[f64], order: usize) -> Result<Series<C64>> {
        if x.len() != self.dim {
            return Err(Error::config(format!("point has {} coordinates, expected {}", x.len(), self.dim)));
        }
        (self.eval)(x, order)
    }

    pub fn value(&self, x: &[f64]) -> Result<C64> {
        Ok(self.taylor(x, 0)?.value())
    }

    /// `∂ψ/∂xᵢ`.
    pub fn gradient(&self, x: &[f64]) -> Result<Vec<C64>> {
        let s = self.taylor(x, 1)?;
        Ok((0..self.dim).map(|i| s.partial(i).value()).collect())
    }

    /// Matrix of second partials `∂ᵢ∂ⱼψ`.
    pub fn hessian(&self, x: &[f64]) -> Result<Vec<Vec<C64>>> {
        let s = self.taylor(x, 2)?;
        Ok((0..self.dim)
            .map(|i| (0..self.dim).map(|j| s.partial(i).partial(j).value()).collect())
            .collect())
    }

    fn combine(a: C64, psi: &Self, b: C64, phi: &Self) -> Self {
        let (p, q) = (psi.clone(), phi.clone());
        NDimWaveFunction::new(psi.dim, move |x, k| Ok(&p.taylor(x, k)?.scale(a) + &q.taylor(x, k)?.scale(b)))
    }

    pub fn minus(&self, other: &Self) -> Self {
        Self::combine(C64::new(1.0, 0.0), self, C64::new(-1.0, 0.0), other)
    }

    pub fn plus(&self, other: &Self) -> Self {
        Self::combine(C64::new(1.0, 0.0), self, C64::new(1.0, 0.0), other)
    }

    pub fn scaled(&self, c: C64) -> Self {
        let p = self.clone();
        NDimWaveFunction::new(self.dim, move |x, k| Ok(p.taylor(x, k)?.scale(c)))
    }
}

/// `∏_d H_{k_d}(y_d)·exp(-|y|²/2)·exp(i·kick·x)` with
/// `y = R(x - center)/width`.
#[derive(Clone, Debug, PartialEq)]
pub struct HermiteProduct {
    pub degrees: Vec<usize>,
    pub center: Vec<f64>,
    pub width: f64,
    /// Row-major rotation `R`.
    pub rotation: Vec<Vec<f64>>,
    pub kick: Vec<f64>,
}

impl HermiteProduct {
    /// Axis-aligned Gaussian at the origin.
    pub fn ground(dim: usize) -> Self {
        HermiteProduct {
            degrees: vec![0; dim],
            center: vec![0.0; dim],
            width: 1.0,
            rotation: (0..dim).map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect(),
            kick: vec![0.0; dim],
        }
    }
}

/// Planar rotation by `angle`.
pub fn rotation_2d(angle: f64) -> Vec<Vec<f64>> {
    let (s, c) = angle.sin_cos();
    vec![vec![c, -s], vec![s, c]]
}

/// Rotation by `angle` about `axis` (Rodrigues).
pub fn rotation_3d(axis: [f64; 3], angle: f64) -> Vec<Vec<f64>> {
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let [a, b, c] = axis.map(|v| v / n);
    let (s, co) = angle.sin_cos();
    let t = 1.0 - co;
    vec![
        vec![co + a * a * t, a * b * t - c * s, a * c * t + b * s],
        vec![b * a * t + c * s, co + b * b * t, b * c * t - a * s],
        vec![c * a * t - b * s, c * b * t + a * s, co + c * c * t],
    ]
}

pub fn hermite_product(spec: &HermiteProduct) -> Result<NDimWaveFunction> {
    let n = spec.degrees.len();
    let square = spec.rotation.len() == n && spec.rotation.iter().all(|r| r.len() == n);
    if n == 0 || spec.center.len() != n || spec.kick.len() != n || !square || !(spec.width > 0.0) {
        return Err(Error::config("inconsistent Hermite product parameters"));
    }
    let spec = spec.clone();
    Ok(NDimWaveFunction::new(n, move |x, order| {
        let coords: Vec<Series<C64>> = (0..n)
            .map(|a| Series::coordinate(n, order, a, C64::new(x[a], 0.0)))
            .collect();
        let mut out = Series::constant(n, order, C64::new(1.0, 0.0));
        let mut exponent = Series::zero(n, order);
        for d in 0..n {
            let mut y = Series::zero(n, order);
            for a in 0..n {
                let shifted = coords[a].clone().add_scalar(C64::new(-spec.center[a], 0.0));
                y = &y + &shifted.scale(C64::new(spec.rotation[d][a] / spec.width, 0.0));
            }
            out = &out * &hermite(spec.degrees[d], &y);
            exponent = &exponent - &(&y * &y).scale(C64::new(0.5, 0.0));
            exponent = &exponent + &coords[d].scale(C64::new(0.0, spec.kick[d]));
        }
        Ok(&out * &exponent.exp())
    }))
}

/// `X̂ᵢψ = xᵢψ`.
pub fn apply_x_i(i: usize, psi: &NDimWaveFunction) -> Result<NDimWaveFunction> {
    let n = psi.dim();
    if i >= n {
        return Err(Error::Index { index: i, dim: n });
    }
    let p = psi.clone();
    Ok(NDimWaveFunction::new(n, move |x, k| {
        let xi = Series::coordinate(n, k, i, C64::new(x[i], 0.0));
        Ok(&xi * &p.taylor(x, k)?)
    }))
}

/// `P̂ⱼψ = -iħDₙ(x)∂ⱼψ`.
pub fn apply_p_j(j: usize, psi: &NDimWaveFunction, nd: &NDimParams) -> Result<NDimWaveFunction> {
    nd.check_index(j)?;
    check_dims(psi, nd)?;
    let p = psi.clone();
    let nd = nd.clone();
    Ok(NDimWaveFunction::new(nd.dim(), move |x, k| {
        let d = nd.factor_series(x, k)?.to_complex();
        let dpsi = p.taylor(x, k + 1)?.partial(j);
        Ok((&d * &dpsi).scale(-I * nd.base().hbar()))
    }))
}

fn check_dims(psi: &NDimWaveFunction, nd: &NDimParams) -> Result<()> {
    if psi.dim() != nd.dim() {
        return Err(Error::config(format!("state has dimension {}, parameters {}", psi.dim(), nd.dim())));
    }
    Ok(())
}

/// `[X̂ᵢ, X̂ⱼ]ψ`.
pub fn commutator_xx(i: usize, j: usize, psi: &NDimWaveFunction) -> Result<NDimWaveFunction> {
    Ok(apply_x_i(i, &apply_x_i(j, psi)?)?.minus(&apply_x_i(j, &apply_x_i(i, psi)?)?))
}

/// `([X̂ᵢ, P̂ⱼ] - iħδᵢⱼDₙ)ψ`.
pub fn commutator_xp_residual(i: usize, j: usize, psi: &NDimWaveFunction, nd: &NDimParams) -> Result<NDimWaveFunction> {
    nd.check_index(i)?;
    let xp = apply_x_i(i, &apply_p_j(j, psi, nd)?)?;
    let px = apply_p_j(j, &apply_x_i(i, psi)?, nd)?;
    let comm = xp.minus(&px);
    if i != j {
        return Ok(comm);
    }
    let p = psi.clone();
    let nd = nd.clone();
    let rhs = NDimWaveFunction::new(nd.dim(), move |x, k| {
        let d = nd.factor_series(x, k)?.to_complex();
        Ok((&d * &p.taylor(x, k)?).scale(I * nd.base().hbar()))
    });
    Ok(comm.minus(&rhs))
}

/// `(P̂ᵢP̂ⱼ - P̂ⱼP̂ᵢ)ψ` by repeated application.
pub fn commutator_pp_direct(i: usize, j: usize, psi: &NDimWaveFunction, nd: &NDimParams) -> Result<NDimWaveFunction> {
    let a = apply_p_j(i, &apply_p_j(j, psi, nd)?, nd)?;
    let b = apply_p_j(j, &apply_p_j(i, psi, nd)?, nd)?;
    Ok(a.minus(&b))
}

/// `iħ·c(‖x‖)·(P̂ᵢX̂ⱼ - P̂ⱼX̂ᵢ)ψ` with `c = -f'(s)/s + 2g'(s²)`, which is
/// `τ(2τ - 1/s)` for the standard deformation.
pub fn commutator_pp_closed(i: usize, j: usize, psi: &NDimWaveFunction, nd: &NDimParams) -> Result<NDimWaveFunction> {
    let a = apply_p_j(i, &apply_x_i(j, psi)?, nd)?;
    let b = apply_p_j(j, &apply_x_i(i, psi)?, nd)?;
    let inner = a.minus(&b);
    let nd = nd.clone();
    Ok(NDimWaveFunction::new(nd.dim(), move |x, k| {
        let c = nd.commutator_coefficient_series(x, k)?.to_complex();
        Ok((&c * &inner.taylor(x, k)?).scale(I * nd.base().hbar()))
    }))
}

/// `[[P̂ᵢ,P̂ⱼ],X̂ₖ] + [[P̂ⱼ,X̂ₖ],P̂ᵢ] + [[X̂ₖ,P̂ᵢ],P̂ⱼ]` applied to `ψ`.
pub fn jacobi_residual(i: usize, j: usize, k: usize, psi: &NDimWaveFunction, nd: &NDimParams) -> Result<NDimWaveFunction> {
    nd.check_index(k)?;
    let pp = |phi: &NDimWaveFunction| commutator_pp_direct(i, j, phi, nd);
    // [P_a, X_k]φ
    let px = |a: usize, phi: &NDimWaveFunction| -> Result<NDimWaveFunction> {
        Ok(apply_p_j(a, &apply_x_i(k, phi)?, nd)?.minus(&apply_x_i(k, &apply_p_j(a, phi, nd)?)?))
    };
    let t1 = pp(&apply_x_i(k, psi)?)?.minus(&apply_x_i(k, &pp(psi)?)?);
    let t2 = px(j, &apply_p_j(i, psi, nd)?)?.minus(&apply_p_j(i, &px(j, psi)?, nd)?);
    // [X_k, P_i] = -[P_i, X_k]
    let t3 = apply_p_j(j, &px(i, psi)?, nd)?.minus(&px(i, &apply_p_j(j, psi, nd)?)?);
    Ok(t1.plus(&t2).plus(&t3))
}
