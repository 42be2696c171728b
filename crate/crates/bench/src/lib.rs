//! Fixtures shared by the criterion benches.

use maxlenqm_core::{normalize, theta_hermite, DeformationParams, QuadratureGrid, ThetaChart, ThetaHermite, WaveFunction};

pub struct Fixture {
    pub params: DeformationParams,
    pub chart: ThetaChart,
    pub grid: QuadratureGrid,
    pub state: WaveFunction,
}

/// Default grid at `τ`, with a normalized θ-Hermite state of degree 2.
pub fn fixture(tau: f64) -> Fixture {
    let params = DeformationParams::with_tau(tau).expect("positive tau");
    let chart = ThetaChart::new(params);
    let grid = QuadratureGrid::new(&chart);
    let state = normalize(&theta_hermite(&ThetaHermite::new(2, &chart)), &grid).expect("nonzero state");
    Fixture { params, chart, grid, state }
}
