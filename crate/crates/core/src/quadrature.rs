//! Integration against the deformed measure `dx/D(x)` over the real line.
//!
//! With `dθ = dx/(ħD(x))` the deformed measure is `ħ·dθ` on the finite
//! θ-chart, so integrals are computed with composite Gauss–Legendre rules
//! in θ. Flat-measure integrals `∫dx` reuse the same nodes with the extra
//! factor `D(x)`.
//!
//! Sums run in ascending node order with pairwise summation, so results do
//! not depend on how node evaluations are scheduled across threads.

use std::num::NonZeroUsize;
use std::sync::OnceLock;

use gauss_quad::legendre::GaussLegendre;
use rayon::prelude::*;

use crate::algebra::{deformation_factor, ThetaChart};
use crate::error::{Error, Result};
use crate::wave::{WaveFunction, C64};

pub const DEFAULT_PANELS: usize = 256;
pub const DEFAULT_ORDER: usize = 16;

/// No node may lie closer than this fraction of the chart length to a
/// chart endpoint, where `x(θ)` diverges.
pub const CHART_GUARD: f64 = 1e-9;

/// Fraction of the chart cut from each end for the divergence check.
pub const DIVERGENCE_GUARD: f64 = 1e-5;

/// Relative disagreement above which a moment is declared divergent.
pub const DIVERGENCE_RTOL: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct QuadratureGrid {
    chart: ThetaChart,
    nodes: Vec<f64>,
    weights: Vec<f64>,
    positions: Vec<f64>,
    panels: usize,
    order: usize,
    lower: f64,
    upper: f64,
    truncated: OnceLock<Box<QuadratureGrid>>,
}

/// Composite Gauss–Legendre grid over the whole chart.
pub fn build_grid(chart: &ThetaChart, panels: usize, order: usize) -> Result<QuadratureGrid> {
    build_grid_window(chart, chart.theta_min(), chart.theta_max(), panels, order)
}

/// Composite Gauss–Legendre grid over `[lower, upper]` inside the chart.
///
/// Useful when a state is numerically supported on a small part of a very
/// long chart (small τ).
pub fn build_grid_window(
    chart: &ThetaChart,
    lower: f64,
    upper: f64,
    panels: usize,
    order: usize,
) -> Result<QuadratureGrid> {
    if panels < 1 {
        return Err(Error::config("panels must be at least 1"));
    }
    if order < 2 {
        return Err(Error::config("order must be at least 2"));
    }
    if !(lower >= chart.theta_min() && upper <= chart.theta_max() && lower < upper) {
        return Err(Error::config(format!(
            "window [{lower}, {upper}] is not inside the chart [{}, {}]",
            chart.theta_min(),
            chart.theta_max()
        )));
    }
    let rule = GaussLegendre::new(NonZeroUsize::new(order).expect("order >= 2"));
    let mut pairs: Vec<(f64, f64)> = rule.as_node_weight_pairs().to_vec();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let width = (upper - lower) / panels as f64;
    let half = 0.5 * width;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let a = lower + p as f64 * width;
        let mid = a + half;
        for &(t, w) in &pairs {
            nodes.push(mid + half * t);
            weights.push(half * w);
        }
    }

    let guard = CHART_GUARD * chart.length();
    let (first, last) = (nodes[0], nodes[nodes.len() - 1]);
    if first - chart.theta_min() < guard || chart.theta_max() - last < guard {
        return Err(Error::config(format!(
            "grid with {panels} panels of order {order} places nodes inside the chart guard band"
        )));
    }
    let positions = nodes
        .iter()
        .map(|&th| chart.x_of_theta(th))
        .collect::<Result<Vec<_>>>()?;

    Ok(QuadratureGrid {
        chart: *chart,
        nodes,
        weights,
        positions,
        panels,
        order,
        lower,
        upper,
        truncated: OnceLock::new(),
    })
}

impl QuadratureGrid {
    /// Default resolution: 256 panels of order 16 over the whole chart.
    pub fn new(chart: &ThetaChart) -> Self {
        build_grid(chart, DEFAULT_PANELS, DEFAULT_ORDER).expect("default grid is valid")
    }

    pub fn chart(&self) -> &ThetaChart {
        &self.chart
    }

    /// θ-coordinates of the nodes, strictly increasing.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `x(θ)` at every node.
    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn panels(&self) -> usize {
        self.panels
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    /// Same resolution with `DIVERGENCE_GUARD` of the chart removed at both
    /// ends (clipped to this grid's window).
    pub fn truncated(&self) -> &QuadratureGrid {
        self.truncated.get_or_init(|| {
            let cut = DIVERGENCE_GUARD * self.chart.length();
            let lo = self.lower.max(self.chart.theta_min() + cut);
            let hi = self.upper.min(self.chart.theta_max() - cut);
            Box::new(
                build_grid_window(&self.chart, lo, hi, self.panels, self.order)
                    .expect("truncated window lies inside the chart"),
            )
        })
    }

    /// `ħ·Σ wᵢ·term(i)`, pairwise-summed in node order.
    pub fn weighted_sum<F>(&self, term: F) -> Result<C64>
    where
        F: Fn(usize) -> C64 + Sync,
    {
        let terms: Vec<C64> = (0..self.len())
            .into_par_iter()
            .map(|i| self.weights[i] * term(i))
            .collect();
        if let Some(i) = terms.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite { x: self.positions[i] });
        }
        Ok(self.chart.params().hbar() * pairwise_sum(&terms))
    }
}

/// Pairwise (cascade) summation.
pub fn pairwise_sum(terms: &[C64]) -> C64 {
    const BLOCK: usize = 16;
    if terms.len() <= BLOCK {
        return terms.iter().fold(C64::new(0.0, 0.0), |acc, &t| acc + t);
    }
    let mid = terms.len() / 2;
    pairwise_sum(&terms[..mid]) + pairwise_sum(&terms[mid..])
}

/// `∫ dx/D(x) · f(x)`.
pub fn integrate_deformed<F>(f: F, grid: &QuadratureGrid) -> Result<C64>
where
    F: Fn(f64) -> C64 + Sync,
{
    let xs = grid.positions();
    grid.weighted_sum(|i| f(xs[i]))
}

/// `∫ dx · f(x)`.
pub fn integrate_flat<F>(f: F, grid: &QuadratureGrid) -> Result<C64>
where
    F: Fn(f64) -> C64 + Sync,
{
    let params = *grid.chart().params();
    let xs = grid.positions();
    grid.weighted_sum(|i| deformation_factor(xs[i], &params) * f(xs[i]))
}

/// Compare a full-chart result with its guard-truncated counterpart.
pub fn check_convergent(moment: &str, full: C64, guarded: C64) -> Result<C64> {
    let scale = full.norm().max(guarded.norm());
    if (full - guarded).norm() > DIVERGENCE_RTOL * scale + 1e-12 {
        let pick = |z: C64| if z.re.abs() >= z.im.abs() { z.re } else { z.im };
        return Err(Error::DivergentMoment {
            moment: moment.to_string(),
            full: pick(full),
            guarded: pick(guarded),
        });
    }
    Ok(full)
}

/// [`integrate_deformed`] plus the two-guard-band divergence check.
pub fn integrate_deformed_checked<F>(moment: &str, f: F, grid: &QuadratureGrid) -> Result<C64>
where
    F: Fn(f64) -> C64 + Sync,
{
    let full = integrate_deformed(&f, grid)?;
    let guarded = integrate_deformed(&f, grid.truncated())?;
    check_convergent(moment, full, guarded)
}

/// [`integrate_flat`] plus the two-guard-band divergence check.
pub fn integrate_flat_checked<F>(moment: &str, f: F, grid: &QuadratureGrid) -> Result<C64>
where
    F: Fn(f64) -> C64 + Sync,
{
    let full = integrate_flat(&f, grid)?;
    let guarded = integrate_flat(&f, grid.truncated())?;
    check_convergent(moment, full, guarded)
}

/// Integration measure for inner products.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Measure {
    /// `dx / D(x)`, the measure of the deformed algebra.
    Deformed,
    /// Plain `dx`.
    Flat,
}

/// `⟨ψ|φ⟩ = ∫ dx/D ψ*(x) φ(x)`.
pub fn inner_product(psi: &WaveFunction, phi: &WaveFunction, grid: &QuadratureGrid) -> Result<C64> {
    integrate_deformed(|x| psi.value(x).conj() * phi.value(x), grid)
}

/// `∫ dx ψ*(x) φ(x)`, checked for divergence.
pub fn inner_product_flat(
    psi: &WaveFunction,
    phi: &WaveFunction,
    grid: &QuadratureGrid,
) -> Result<C64> {
    integrate_flat_checked("flat inner product", |x| psi.value(x).conj() * phi.value(x), grid)
}

pub fn inner_product_in(
    measure: Measure,
    psi: &WaveFunction,
    phi: &WaveFunction,
    grid: &QuadratureGrid,
) -> Result<C64> {
    match measure {
        Measure::Deformed => inner_product(psi, phi, grid),
        Measure::Flat => inner_product_flat(psi, phi, grid),
    }
}

pub fn norm_squared(psi: &WaveFunction, grid: &QuadratureGrid) -> Result<f64> {
    Ok(integrate_deformed(|x| C64::new(psi.value(x).norm_sqr(), 0.0), grid)?.re)
}

/// Rescale `ψ` to unit norm under the deformed measure.
pub fn normalize(psi: &WaveFunction, grid: &QuadratureGrid) -> Result<WaveFunction> {
    let n2 = norm_squared(psi, grid)?;
    if !(n2 > f64::MIN_POSITIVE) {
        return Err(Error::ZeroNorm);
    }
    let mut out = psi.scaled(C64::new(1.0 / n2.sqrt(), 0.0));
    if let Some(l) = psi.label() {
        out = out.with_label(l.to_string());
    }
    Ok(out)
}
