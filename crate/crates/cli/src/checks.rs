//! The invariant suite behind `maxlenqm checks`.
//!
//! Each check reports a worst-case error against a named tolerance.
//! Rows marked `info` compare against the sinc kernel with zeros at
//! multiples of `τħ√3/2`; they are reported but never fail the run.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::time::Instant;

use maxlenqm_core::ndim::{
    apply_p_j, commutator_pp_closed, commutator_pp_direct, commutator_xp_residual, hermite_product, jacobi_residual,
    rotation_2d, rotation_3d, HermiteProduct,
};
use maxlenqm_core::operators::{commutator_residual, symmetry_defect};
use maxlenqm_core::quadrature::{integrate_deformed, integrate_flat_checked, norm_squared, normalize};
use maxlenqm_core::states::{kinetic_energy, orthogonal_spacing};
use maxlenqm_core::transforms::{
    apply_p_quasi, apply_x_quasi, parseval_factor, reconstruct, roundtrip_error, to_quasi_momentum,
};
use maxlenqm_core::uncertainty::{delta_x_branches, moments};
use maxlenqm_core::{
    apply_p, apply_x, deformation_factor, eigenstate, general_deformation_factor, inner_product, lattice_eta,
    normalization_constant, overlap_closed_form, overlap_exact, random_state, theta_hermite, DeformationParams,
    DeltaXBranches, EtaGrid, GeneralDeformation, NDimParams, NDimWaveFunction, NormKind, QuadratureGrid, ThetaChart,
    ThetaHermite, WaveFunction, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::{Cell, Table};

/// Default tolerance for every named check.
pub fn default_tolerances() -> BTreeMap<&'static str, f64> {
    BTreeMap::from([
        ("jacobian", 1e-12),
        ("chart_roundtrip", 1e-10),
        ("normalization", 1e-10),
        ("measure_mass", 1e-10),
        ("overlap_exact", 1e-8),
        ("lattice", 1e-8),
        ("kinetic", 1e-8),
        ("eigenrelation", 1e-10),
        ("commutator", 1e-10),
        ("hermiticity", 1e-8),
        ("gup", 1e-9),
        ("branch", 1e-12),
        ("roundtrip", 1e-6),
        ("parseval", 1e-4),
        ("quasi_p", 1e-8),
        ("quasi_x", 1e-6),
        ("ndim_xp", 1e-10),
        ("ndim_pp", 1e-6),
        ("jacobi", 1e-7),
        ("ndim_reduction", 1e-12),
        ("sinc_kernel", 1e-8),
    ])
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Info,
}

impl Status {
    fn as_str(self) -> &'static str {
        match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
            Status::Info => "info",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub status: Status,
    /// Worst observed error; NaN when the check raised an error.
    pub value: f64,
    pub tolerance: f64,
    #[serde(skip)]
    pub seconds: f64,
    pub note: String,
}

struct Ctx {
    params: DeformationParams,
    chart: ThetaChart,
    grid: QuadratureGrid,
    eta_grid: EtaGrid,
}

type CheckFn = fn(&Ctx) -> CliResult<f64>;

/// (name, tolerance key, informational, body).
const CHECKS: &[(&str, &str, bool, CheckFn)] = &[
    ("jacobian", "jacobian", false, jacobian),
    ("chart_roundtrip", "chart_roundtrip", false, chart_roundtrip),
    ("normalization", "normalization", false, normalization),
    ("measure_mass", "measure_mass", false, measure_mass),
    ("overlap_exact", "overlap_exact", false, overlap_exact_kernel),
    ("lattice", "lattice", false, lattice_orthogonality),
    ("kinetic", "kinetic", false, kinetic),
    ("eigenrelation", "eigenrelation", false, eigenrelation),
    ("commutator", "commutator", false, commutator),
    ("hermiticity", "hermiticity", false, hermiticity),
    ("gup", "gup", false, gup),
    ("branch", "branch", false, branch),
    ("roundtrip", "roundtrip", false, roundtrip),
    ("roundtrip_monotone", "roundtrip", false, roundtrip_monotone),
    ("parseval", "parseval", false, parseval),
    ("quasi_p", "quasi_p", false, quasi_p),
    ("quasi_x", "quasi_x", false, quasi_x),
    ("ndim_xp", "ndim_xp", false, ndim_xp),
    ("ndim_pp", "ndim_pp", false, ndim_pp),
    ("jacobi", "jacobi", false, jacobi),
    ("ndim_reduction", "ndim_reduction", false, ndim_reduction),
    ("sinc_kernel_overlap", "sinc_kernel", true, sinc_kernel_overlap),
    ("sinc_kernel_lattice", "sinc_kernel", true, sinc_kernel_lattice),
];

/// Run every check under `cfg`.
pub fn run(cfg: &RunConfig) -> CliResult<Vec<CheckOutcome>> {
    let params = cfg.params()?;
    let ctx = Ctx {
        params,
        chart: cfg.chart()?,
        grid: cfg.grid()?,
        eta_grid: cfg.eta_grid()?,
    };
    Ok(CHECKS
        .iter()
        .map(|&(name, key, info, body)| {
            let tol = cfg.tolerance(key);
            let start = Instant::now();
            let result = body(&ctx);
            let seconds = start.elapsed().as_secs_f64();
            let (value, note) = match result {
                Ok(v) => (v, String::new()),
                Err(e) => (f64::NAN, e.to_string()),
            };
            let status = if info {
                Status::Info
            } else if value <= tol {
                Status::Pass
            } else {
                Status::Fail
            };
            CheckOutcome {
                name,
                status,
                value,
                tolerance: tol,
                seconds,
                note,
            }
        })
        .collect())
}

pub fn failures(outcomes: &[CheckOutcome]) -> usize {
    outcomes.iter().filter(|o| o.status == Status::Fail).count()
}

/// `check,status,value,tolerance`.
pub fn table(outcomes: &[CheckOutcome]) -> Table {
    Table {
        header: vec!["check", "status", "value", "tolerance"],
        rows: outcomes
            .iter()
            .map(|o| {
                vec![
                    Cell::Text(o.name.to_string()),
                    Cell::Text(o.status.as_str().to_string()),
                    Cell::Real(o.value),
                    Cell::Real(o.tolerance),
                ]
            })
            .collect(),
    }
}

fn rng(stream: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(0x6d61_786c ^ stream)
}

fn hermite(k: usize, offset: f64, ctx: &Ctx) -> CliResult<WaveFunction> {
    let mut spec = ThetaHermite::new(k, &ctx.chart);
    spec.center = ctx.chart.midpoint() + offset * ctx.chart.length();
    Ok(normalize(&theta_hermite(&spec), &ctx.grid)?)
}

fn jacobian(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let hbar = ctx.params.hbar();
    let mut r = rng(1);
    Ok((0..500)
        .map(|_| {
            let x = r.gen_range(-100.0..100.0) / tau;
            let dtheta = ctx.chart.theta_series(x, 1).coeff1(1);
            (hbar * deformation_factor(x, &ctx.params) * dtheta - 1.0).abs()
        })
        .fold(0.0, f64::max))
}

fn chart_roundtrip(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let mut r = rng(2);
    let mut worst: f64 = 0.0;
    for _ in 0..500 {
        let x = r.gen_range(-100.0..100.0) / tau;
        let back = ctx.chart.x_of_theta(ctx.chart.theta_of_x(x))?;
        worst = worst.max((back - x).abs() / x.abs().max(1.0 / tau));
    }
    // general profile with f = τs, g = τ²q agrees with D on x ≥ 0
    let gd = GeneralDeformation::standard(tau);
    for k in 0..50 {
        let x = 0.1 * k as f64 / tau;
        let d = deformation_factor(x, &ctx.params);
        worst = worst.max((general_deformation_factor(x, &gd)? - d).abs() / d);
    }
    Ok(worst)
}

fn normalization(ctx: &Ctx) -> CliResult<f64> {
    let a = normalization_constant(&ctx.params);
    let mass = integrate_deformed(|_| C64::new(1.0, 0.0), &ctx.grid)?.re;
    Ok((a * a * mass - 1.0).abs())
}

fn measure_mass(ctx: &Ctx) -> CliResult<f64> {
    let mass = integrate_deformed(|_| C64::new(1.0, 0.0), &ctx.grid)?.re;
    let want = 2.0 * PI / (ctx.params.tau() * 3f64.sqrt());
    Ok((mass - want).abs() / want)
}

fn random_pairs(ctx: &Ctx, n: usize, stream: u64) -> Vec<(f64, f64)> {
    let th = ctx.params.tau() * ctx.params.hbar();
    let mut r = rng(stream);
    (0..n)
        .map(|_| {
            let eta = r.gen_range(-10.0..10.0) * th;
            (eta, eta + r.gen_range(-10.0..10.0) * th)
        })
        .collect()
}

fn max_pair_error<F>(ctx: &Ctx, pairs: &[(f64, f64)], kernel: F) -> CliResult<f64>
where
    F: Fn(f64, f64) -> C64,
{
    let mut worst: f64 = 0.0;
    for &(eta, eta_p) in pairs {
        let q = inner_product(&eigenstate(eta_p, &ctx.params).base, &eigenstate(eta, &ctx.params).base, &ctx.grid)?;
        worst = worst.max((q - kernel(eta, eta_p)).norm());
    }
    Ok(worst)
}

fn overlap_exact_kernel(ctx: &Ctx) -> CliResult<f64> {
    max_pair_error(ctx, &random_pairs(ctx, 100, 3), |e, ep| overlap_exact(e, ep, &ctx.params))
}

fn sinc_kernel_overlap(ctx: &Ctx) -> CliResult<f64> {
    max_pair_error(ctx, &random_pairs(ctx, 100, 3), |e, ep| {
        C64::new(overlap_closed_form(e, ep, &ctx.params), 0.0)
    })
}

/// Worst `|⟨φ_m|φ_n⟩ - δ_mn|` over `|m|, |n| ≤ 20` at the given spacing.
fn gram_defect(ctx: &Ctx, spacing: f64) -> CliResult<f64> {
    let xs = ctx.grid.positions();
    let columns: Vec<Vec<C64>> = (-20..=20)
        .map(|n| {
            let phi = eigenstate(n as f64 * spacing, &ctx.params).base;
            xs.iter().map(|&x| phi.value(x)).collect()
        })
        .collect();
    let mut worst: f64 = 0.0;
    for (a, ca) in columns.iter().enumerate() {
        for (b, cb) in columns.iter().enumerate().skip(a) {
            let g = ctx.grid.weighted_sum(|i| ca[i].conj() * cb[i])?;
            let want = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((g - want).norm());
        }
    }
    Ok(worst)
}

fn lattice_orthogonality(ctx: &Ctx) -> CliResult<f64> {
    gram_defect(ctx, orthogonal_spacing(&ctx.params))
}

fn sinc_kernel_lattice(ctx: &Ctx) -> CliResult<f64> {
    gram_defect(ctx, lattice_eta(1, &ctx.params))
}

fn kinetic(ctx: &Ctx) -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for n in -10..=10i64 {
        if n == 0 {
            continue;
        }
        let eta = lattice_eta(n, &ctx.params);
        let want = eta * eta / (2.0 * ctx.params.mass());
        worst = worst.max((kinetic_energy(eta, &ctx.params, &ctx.grid)? - want).abs() / want);
    }
    let zero = kinetic_energy(0.0, &ctx.params, &ctx.grid)?.abs();
    Ok(worst.max(zero))
}

fn eigenrelation(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let mut worst: f64 = 0.0;
    for n in -10..=10i64 {
        let eta = lattice_eta(n, &ctx.params);
        let phi = eigenstate(eta, &ctx.params).base;
        let p_phi = apply_p(&phi, &ctx.params);
        for k in 0..40 {
            let x = (-4.0 + 0.2 * k as f64) / tau;
            let want = eta * phi.value(x);
            worst = worst.max((p_phi.value(x) - want).norm() / (eta.abs() * phi.value(x).norm()).max(1e-300).max(tau));
        }
    }
    Ok(worst)
}

fn commutator(ctx: &Ctx) -> CliResult<f64> {
    let mut r = rng(4);
    let tau = ctx.params.tau();
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let psi = normalize(&random_state(&mut r, &ctx.chart), &ctx.grid)?;
        let res = commutator_residual(&psi, &ctx.params);
        for k in 0..25 {
            let x = (-3.0 + 0.25 * k as f64) / tau;
            worst = worst.max(res.value(x).norm());
        }
    }
    Ok(worst)
}

fn hermiticity(ctx: &Ctx) -> CliResult<f64> {
    let p = &ctx.params;
    let tau = p.tau();
    let psi = hermite(0, -0.05, ctx)?;
    let phi = hermite(1, 0.04, ctx)?.scaled(C64::new(0.6, 0.8));
    let deformed = symmetry_defect(&psi, &phi, maxlenqm_core::Measure::Deformed, p, &ctx.grid)?.norm();
    let flat = symmetry_defect(&psi, &phi, maxlenqm_core::Measure::Flat, p, &ctx.grid)?;
    let shift = integrate_flat_checked(
        "<psi|i hbar tau (1 - 2 tau x)|phi>",
        |x| psi.value(x).conj() * C64::new(0.0, p.hbar() * tau * (1.0 - 2.0 * tau * x)) * phi.value(x),
        &ctx.grid,
    )?;
    Ok(deformed.max((flat + shift).norm()))
}

fn gup(ctx: &Ctx) -> CliResult<f64> {
    let mut r = rng(5);
    let mut worst: f64 = 0.0;
    for _ in 0..40 {
        let psi = normalize(&random_state(&mut r, &ctx.chart), &ctx.grid)?;
        let rep = moments(&psi, &ctx.params, &ctx.grid)?;
        worst = worst.max(-rep.margin);
    }
    Ok(worst)
}

fn branch(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let ht = ctx.params.hbar() * tau;
    let mut worst = match delta_x_branches(ht, 0.0, &ctx.params)? {
        DeltaXBranches::Roots { lower, upper } => ((lower - 1.0 / tau).abs()).max((upper - 1.0 / tau).abs()) * tau,
        DeltaXBranches::NoRealSolution => f64::INFINITY,
    };
    for k in 1..=20 {
        let dp = ht * (1.0 + 0.25 * k as f64);
        match delta_x_branches(dp, 0.0, &ctx.params)? {
            DeltaXBranches::Roots { lower, upper } if lower > 0.0 => {
                worst = worst.max((lower * upper * tau * tau - 1.0).abs());
            }
            _ => worst = f64::INFINITY,
        }
    }
    Ok(worst)
}

fn smooth_states(ctx: &Ctx) -> CliResult<Vec<WaveFunction>> {
    Ok(vec![hermite(0, 0.0, ctx)?, hermite(1, 0.03, ctx)?, hermite(2, -0.04, ctx)?])
}

fn roundtrip(ctx: &Ctx) -> CliResult<f64> {
    let mut worst: f64 = 0.0;
    for psi in smooth_states(ctx)? {
        worst = worst.max(roundtrip_error(&psi, &ctx.eta_grid, &ctx.params, &ctx.grid)?);
    }
    Ok(worst)
}

/// Largest increase of the round-trip error along the doubling ladder.
fn roundtrip_monotone(ctx: &Ctx) -> CliResult<f64> {
    let psi = hermite(1, 0.03, ctx)?;
    let mut prev = f64::INFINITY;
    let mut worst: f64 = 0.0;
    for frac in [0.125, 0.25, 0.5, 1.0] {
        let g = EtaGrid::new(ctx.eta_grid.eta_max * frac, ctx.eta_grid.eta_step)?;
        let e = roundtrip_error(&psi, &g, &ctx.params, &ctx.grid)?;
        worst = worst.max(e - prev);
        prev = e;
    }
    Ok(worst)
}

fn parseval(ctx: &Ctx) -> CliResult<f64> {
    let want = 3f64.sqrt() * ctx.params.tau() * ctx.params.hbar();
    let mut worst: f64 = 0.0;
    for psi in smooth_states(ctx)? {
        let f = parseval_factor(&psi, &ctx.eta_grid, &ctx.params, &ctx.grid)?;
        worst = worst.max((f - want).abs() / want);
    }
    Ok(worst)
}

fn quasi_p(ctx: &Ctx) -> CliResult<f64> {
    let (p, g, grid) = (&ctx.params, &ctx.eta_grid, &ctx.grid);
    let mut worst: f64 = 0.0;
    for psi in smooth_states(ctx)? {
        let lhs = to_quasi_momentum(&apply_p(&psi, p), g, p, grid)?;
        let rhs = apply_p_quasi(&to_quasi_momentum(&psi, g, p, grid)?);
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            worst = worst.max((a - b).norm());
        }
    }
    // eigenstates sampled on their orthogonal lattice
    let c = orthogonal_spacing(p);
    let lattice = EtaGrid::new(10.0 * c, c)?;
    for n0 in [-3i64, 0, 2] {
        let phi = eigenstate(n0 as f64 * c, p).base;
        let lhs = to_quasi_momentum(&apply_p(&phi, p), &lattice, p, grid)?;
        let rhs = apply_p_quasi(&to_quasi_momentum(&phi, &lattice, p, grid)?);
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            worst = worst.max((a - b).norm() / c);
        }
    }
    Ok(worst)
}

fn quasi_x(ctx: &Ctx) -> CliResult<f64> {
    let (p, g, grid) = (&ctx.params, &ctx.eta_grid, &ctx.grid);
    let psi = hermite(0, 0.0, ctx)?;
    let xs = apply_x_quasi(&to_quasi_momentum(&psi, g, p, grid)?, p, grid)?;
    let back = reconstruct(&xs, p);
    let direct = apply_x(&psi);
    // relative to ‖Xψ‖, which is of order 1/τ
    let scale = norm_squared(&direct, grid)?.sqrt().max(1.0);
    Ok(norm_squared(&back.minus(&direct), grid)?.sqrt() / scale)
}

fn nd_state(dim: usize, tau: f64, r: &mut ChaCha8Rng) -> CliResult<NDimWaveFunction> {
    let rotation = match dim {
        2 => rotation_2d(r.gen_range(0.0..0.5)),
        3 => rotation_3d([1.0, r.gen_range(-1.0..1.0), 0.5], r.gen_range(0.0..0.5)),
        _ => HermiteProduct::ground(dim).rotation,
    };
    Ok(hermite_product(&HermiteProduct {
        degrees: (0..dim).map(|_| r.gen_range(0..3)).collect(),
        center: (0..dim).map(|_| r.gen_range(-0.2..0.2) / tau).collect(),
        width: r.gen_range(0.3..0.6) / tau,
        rotation,
        kick: (0..dim).map(|_| r.gen_range(-1.0..1.0) * tau).collect(),
    })?)
}

fn off_axis(dim: usize, tau: f64, r: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let v: f64 = r.gen_range(0.05..0.8) / tau;
            if r.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect()
}

fn ndim_xp(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let mut r = rng(6);
    let mut worst: f64 = 0.0;
    for dim in [2, 3] {
        for kind in [NormKind::L1, NormKind::Euclidean] {
            let nd = NDimParams::new(dim, ctx.params)?.with_norm(kind);
            let psi = nd_state(dim, tau, &mut r)?;
            for _ in 0..5 {
                let x = off_axis(dim, tau, &mut r);
                for i in 0..dim {
                    for j in 0..dim {
                        let res = commutator_xp_residual(i, j, &psi, &nd)?.value(&x)?;
                        worst = worst.max(res.norm());
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn ndim_pp(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let mut r = rng(7);
    let mut worst: f64 = 0.0;
    for dim in [2, 3] {
        let nd = NDimParams::new(dim, ctx.params)?.with_norm(NormKind::Euclidean);
        for _ in 0..25 {
            let psi = nd_state(dim, tau, &mut r)?;
            let x = off_axis(dim, tau, &mut r);
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let a = commutator_pp_direct(i, j, &psi, &nd)?.value(&x)?;
                    let b = commutator_pp_closed(i, j, &psi, &nd)?.value(&x)?;
                    let scale = a.norm().max(1e-300);
                    if scale > 1e-200 {
                        worst = worst.max((a - b).norm() / scale);
                    }
                }
            }
        }
    }
    Ok(worst)
}

fn jacobi(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let hbar3 = ctx.params.hbar().powi(3);
    let mut r = rng(8);
    let mut worst: f64 = 0.0;
    for kind in [NormKind::L1, NormKind::Euclidean] {
        let nd = NDimParams::new(2, ctx.params)?.with_norm(kind);
        let psi = nd_state(2, tau, &mut r)?;
        for _ in 0..3 {
            let x = off_axis(2, tau, &mut r);
            let scale = psi.value(&x)?.norm().max(1e-3) * hbar3;
            for (i, j, k) in [(0, 1, 0), (0, 1, 1), (1, 0, 1), (0, 0, 1)] {
                worst = worst.max(jacobi_residual(i, j, k, &psi, &nd)?.value(&x)?.norm() / scale);
            }
        }
    }
    Ok(worst)
}

fn ndim_reduction(ctx: &Ctx) -> CliResult<f64> {
    let tau = ctx.params.tau();
    let psi1 = theta_hermite(&ThetaHermite::new(2, &ctx.chart));
    let w = psi1.clone();
    let lifted = NDimWaveFunction::new(1, move |x, k| Ok(w.taylor(x[0], k)));
    let p1 = apply_p(&psi1, &ctx.params);
    let mut worst: f64 = 0.0;
    for kind in [NormKind::L1, NormKind::Euclidean] {
        let nd = NDimParams::new(1, ctx.params)?.with_norm(kind);
        let pn = apply_p_j(0, &lifted, &nd)?;
        for k in 1..40 {
            let x = 0.1 * k as f64 / tau;
            let b = p1.value(x);
            worst = worst.max((pn.value(&[x])? - b).norm() / b.norm().max(tau));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_names_cover_checks() {
        let tols = default_tolerances();
        for &(_, key, _, _) in CHECKS {
            assert!(tols.contains_key(key), "{key}");
        }
    }

    #[test]
    fn unit_tau_suite_passes() {
        let cfg = RunConfig {
            tau: 1.0,
            ..RunConfig::default()
        };
        let out = run(&cfg).unwrap();
        for o in &out {
            assert!(o.status != Status::Fail, "{o:?}");
        }
        assert_eq!(failures(&out), 0);
    }

    #[test]
    fn table_shape() {
        let o = CheckOutcome {
            name: "x",
            status: Status::Info,
            value: 0.5,
            tolerance: 1.0,
            seconds: 0.0,
            note: String::new(),
        };
        let t = table(&[o]);
        assert_eq!(t.render(crate::output::Format::Csv), "check,status,value,tolerance\nx,info,0.5,1\n");
    }
}
