use maxlenqm_core::quadrature::normalize;
use maxlenqm_core::states::{eigenstate, lattice_eta, overlap_closed_form};
use maxlenqm_core::transforms::{parseval_factor, roundtrip_error};
use maxlenqm_core::uncertainty::{extremal_uncertainties, moments};
use maxlenqm_core::{inner_product, EtaGrid};
use rayon::prelude::*;
use serde_json::json;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{Cell, Table};
use crate::state_spec::StateSpec;

/// `delta,overlap_closed,overlap_quadrature` over `Δ ∈ [-delta_max, delta_max]`.
///
/// The quadrature column is the real part of `⟨φ_0|φ_Δ⟩`.
pub fn overlap(cfg: &RunConfig, delta_max: Option<f64>, samples: usize) -> CliResult<Table> {
    if samples < 2 {
        return Err(CliError::config("samples must be at least 2"));
    }
    let params = cfg.params()?;
    let delta_max = delta_max.unwrap_or(3.0 * params.momentum_unit());
    if !(delta_max > 0.0 && delta_max.is_finite()) {
        return Err(CliError::config(format!("delta_max must be positive, got {delta_max}")));
    }
    let grid = cfg.grid()?;
    let phi0 = eigenstate(0.0, &params).base;
    let last = (samples - 1) as f64;
    let rows: CliResult<Vec<Vec<Cell>>> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let delta = delta_max * (2.0 * j as f64 - last) / last;
            let closed = overlap_closed_form(delta, 0.0, &params);
            let quad = inner_product(&phi0, &eigenstate(delta, &params).base, &grid)?;
            Ok(vec![Cell::Real(delta), Cell::Real(closed), Cell::Real(quad.re)])
        })
        .collect();
    Ok(Table {
        header: vec!["delta", "overlap_closed", "overlap_quadrature"],
        rows: rows?,
    })
}

/// `n,eta_n,energy` for `n = 0..=n_max`.
pub fn spectrum(cfg: &RunConfig, n_max: i64) -> CliResult<Table> {
    if n_max < 1 {
        return Err(CliError::config("n_max must be at least 1"));
    }
    let params = cfg.params()?;
    let rows = (0..=n_max)
        .map(|n| {
            let eta = lattice_eta(n, &params);
            // η_n²/(2m) with η_n² = 3(τħn)²/4, exact for integer data
            let th = params.tau() * params.hbar() * n as f64;
            vec![Cell::Int(n), Cell::Real(eta), Cell::Real(3.0 * th * th / (8.0 * params.mass()))]
        })
        .collect();
    Ok(Table {
        header: vec!["n", "eta_n", "energy"],
        rows,
    })
}

/// Moments and the bound for a named state, always as JSON.
pub fn uncertainty(cfg: &RunConfig, state: &str) -> CliResult<String> {
    let spec = StateSpec::parse(state)?;
    let params = cfg.params()?;
    let chart = cfg.chart()?;
    let grid = cfg.grid()?;
    let psi = normalize(&spec.build(&chart)?, &grid)?;
    let report = moments(&psi, &params, &grid)?;
    let (dx, dp) = extremal_uncertainties(&params);
    let doc = json!({
        "state": state,
        "report": report,
        "extremal": { "delta_x_max": dx, "delta_p_min": dp },
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    Ok(s)
}

/// `eta_max,roundtrip_error,parseval_factor` for `eta_max` at 1/8, 1/4,
/// 1/2 and 1 times the configured value.
pub fn roundtrip(cfg: &RunConfig, state: &str) -> CliResult<Table> {
    let spec = StateSpec::parse(state)?;
    let params = cfg.params()?;
    let chart = cfg.chart()?;
    let grid = cfg.grid()?;
    let psi = normalize(&spec.build(&chart)?, &grid)?;
    let full = cfg.eta_grid()?;
    let mut rows = Vec::new();
    for frac in [0.125, 0.25, 0.5, 1.0] {
        let eg = EtaGrid::new(full.eta_max * frac, full.eta_step)?;
        let err = roundtrip_error(&psi, &eg, &params, &grid)?;
        let factor = parseval_factor(&psi, &eg, &params, &grid)?;
        rows.push(vec![Cell::Real(eg.eta_max), Cell::Real(err), Cell::Real(factor)]);
    }
    Ok(Table {
        header: vec!["eta_max", "roundtrip_error", "parseval_factor"],
        rows,
    })
}
