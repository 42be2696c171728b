//! Acceptance criteria 1-10. Each test prints one PASS/FAIL line with the
//! measured error and runtime, then asserts both.
//!
//! Run with `cargo test -p maxlenqm --test acceptance -- --nocapture --test-threads=1`.

use std::f64::consts::PI;
use std::process::Command;
use std::time::{Duration, Instant};

use maxlenqm_core::ndim::{
    apply_p_j, commutator_pp_closed, commutator_pp_direct, commutator_xp_residual, hermite_product, jacobi_residual,
    rotation_2d, rotation_3d, HermiteProduct,
};
use maxlenqm_core::operators::{apply_p_dagger_flat, symmetry_defect};
use maxlenqm_core::quadrature::{
    build_grid_window, integrate_deformed, integrate_flat_checked, norm_squared, normalize, Measure,
};
use maxlenqm_core::states::{kinetic_energy, orthogonal_spacing};
use maxlenqm_core::transforms::{
    apply_p_quasi, apply_x_quasi, parseval_factor, reconstruct, roundtrip_error, to_quasi_momentum,
};
use maxlenqm_core::uncertainty::{delta_x_branches, moments};
use maxlenqm_core::{
    apply_p, apply_x, deformation_factor, eigenstate, inner_product, lattice_eta, normalization_constant,
    overlap_closed_form, random_state, theta_hermite, x_gaussian, DeformationParams, DeltaXBranches, EtaGrid,
    NDimParams, NDimWaveFunction, NormKind, QuadratureGrid, ThetaChart, ThetaHermite, WaveFunction, XGaussian, C64,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TAUS: [f64; 4] = [0.01, 0.1, 1.0, 10.0];

/// Print the verdict line and fail the test if either bound is missed.
fn verdict(id: u32, what: &str, err: f64, tol: f64, elapsed: Duration, limit_s: f64) {
    let secs = elapsed.as_secs_f64();
    let ok = err <= tol && secs < limit_s;
    println!(
        "{} [{id:>2}] {what}: error {err:.3e} (tol {tol:.0e}), {secs:.3} s (limit {limit_s} s)",
        if ok { "PASS" } else { "FAIL" }
    );
    assert!(err <= tol, "criterion {id}: error {err:e} exceeds {tol:e}");
    assert!(secs < limit_s, "criterion {id}: {secs} s exceeds {limit_s} s");
}

fn params(tau: f64, hbar: f64) -> DeformationParams {
    DeformationParams::new(tau, hbar, 1.0).unwrap()
}

fn setup(tau: f64, hbar: f64) -> (DeformationParams, ThetaChart, QuadratureGrid) {
    let p = params(tau, hbar);
    let chart = ThetaChart::new(p);
    let grid = QuadratureGrid::new(&chart);
    (p, chart, grid)
}

fn hermite(k: usize, offset: f64, chart: &ThetaChart, grid: &QuadratureGrid) -> WaveFunction {
    let mut spec = ThetaHermite::new(k, chart);
    spec.center = chart.midpoint() + offset * chart.length();
    normalize(&theta_hermite(&spec), grid).unwrap()
}

fn measure_mass(grid: &QuadratureGrid) -> f64 {
    integrate_deformed(|_| C64::new(1.0, 0.0), grid).unwrap().re
}

#[test]
fn criterion_01_normalization() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for tau in TAUS {
        for hbar in [0.5, 1.0] {
            let (p, _, grid) = setup(tau, hbar);
            let a = normalization_constant(&p);
            worst = worst.max((a * a * measure_mass(&grid) - 1.0).abs());
        }
    }
    verdict(1, "normalization A^2 * int dx/D = 1", worst, 1e-10, start.elapsed(), 1.0);
}

#[test]
fn criterion_02_measure_mass() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for tau in TAUS {
        let (_, _, grid) = setup(tau, 1.0);
        let want = 2.0 * PI / (tau * 3f64.sqrt());
        worst = worst.max((measure_mass(&grid) - want).abs() / want);
    }
    verdict(2, "measure mass int dx/D = 2pi/(tau sqrt3)", worst, 1e-10, start.elapsed(), 1.0);
}

#[test]
fn criterion_03_overlap_kernel() {
    let start = Instant::now();
    let (p, _, grid) = setup(0.1, 1.0);
    let th = p.tau() * p.hbar();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut pair_err: f64 = 0.0;
    for _ in 0..100 {
        let eta_p = rng.gen_range(-10.0..10.0) * th;
        let eta = eta_p + rng.gen_range(-10.0..10.0) * th;
        let q = inner_product(&eigenstate(eta_p, &p).base, &eigenstate(eta, &p).base, &grid).unwrap();
        pair_err = pair_err.max((q - overlap_closed_form(eta, eta_p, &p)).norm());
    }
    let xs = grid.positions();
    let cols: Vec<Vec<C64>> = (-20..=20)
        .map(|n| {
            let phi = eigenstate(lattice_eta(n, &p), &p).base;
            xs.iter().map(|&x| phi.value(x)).collect()
        })
        .collect();
    let mut kron_err: f64 = 0.0;
    for (a, ca) in cols.iter().enumerate() {
        for (b, cb) in cols.iter().enumerate() {
            let g = grid.weighted_sum(|i| ca[i].conj() * cb[i]).unwrap();
            kron_err = kron_err.max((g - if a == b { 1.0 } else { 0.0 }).norm());
        }
    }
    println!("     [ 3] random-pair error {pair_err:.3e}, lattice Kronecker error {kron_err:.3e}");
    verdict(3, "overlap quadrature vs sinc kernel", pair_err.max(kron_err), 1e-8, start.elapsed(), 5.0);
}

#[test]
fn criterion_04_kinetic_energy() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for tau in [0.1, 1.0] {
        let (p, _, grid) = setup(tau, 1.0);
        for n in -10..=10i64 {
            let eta = lattice_eta(n, &p);
            let want = eta * eta / (2.0 * p.mass());
            let got = kinetic_energy(eta, &p, &grid).unwrap();
            worst = worst.max(if n == 0 { got.abs() } else { (got - want).abs() / want });
        }
    }
    verdict(4, "<P^2>/(2m) = eta^2/(2m) on the lattice", worst, 1e-8, start.elapsed(), 2.0);
}

#[test]
fn criterion_05_gup() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut violation: f64 = 0.0;
    let mut root_err: f64 = 0.0;
    for tau in TAUS {
        let (p, chart, grid) = setup(tau, 1.0);
        for _ in 0..250 {
            let psi = normalize(&random_state(&mut rng, &chart), &grid).unwrap();
            let rep = moments(&psi, &p, &grid).unwrap();
            violation = violation.max(-rep.margin);
        }
        match delta_x_branches(p.hbar() * tau, 0.0, &p).unwrap() {
            DeltaXBranches::Roots { lower, upper } => {
                root_err = root_err.max((lower - 1.0 / tau).abs()).max((upper - 1.0 / tau).abs());
            }
            DeltaXBranches::NoRealSolution => root_err = f64::INFINITY,
        }
    }
    println!("     [ 5] worst GUP violation {violation:.3e} (tol 1e-9), double-root error {root_err:.3e} (tol 1e-12)");
    let err = if violation <= 1e-9 { root_err } else { f64::INFINITY };
    verdict(5, "GUP on 1000 random states and double root 1/tau", err, 1e-12, start.elapsed(), 30.0);
}

#[test]
fn criterion_06_hermiticity_defect() {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for tau in [0.1, 1.0] {
        let (p, chart, grid) = setup(tau, 1.0);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let mut pairs = vec![(
            hermite(0, -0.05, &chart, &grid),
            hermite(1, 0.04, &chart, &grid).scaled(C64::new(0.6, 0.8)),
        )];
        for _ in 0..5 {
            let a = normalize(&random_state(&mut rng, &chart), &grid).unwrap();
            let b = normalize(&random_state(&mut rng, &chart), &grid).unwrap();
            pairs.push((a, b));
        }
        for (psi, phi) in &pairs {
            // pointwise adjoint oracle: P†ψ = -iħ(Dψ)′ = Pψ - iħD′ψ
            let dag = apply_p_dagger_flat(psi, &p);
            let pp = apply_p(psi, &p);
            for k in 0..20 {
                let x = (-2.0 + 0.2 * k as f64) / tau;
                let dprime = 2.0 * tau * tau * x - tau;
                let want = pp.value(x) - C64::new(0.0, p.hbar() * dprime) * psi.value(x);
                worst = worst.max((dag.value(x) - want).norm() / want.norm().max(1.0));
            }
            let flat = symmetry_defect(psi, phi, Measure::Flat, &p, &grid).unwrap();
            let shift = integrate_flat_checked(
                "shift",
                |x| psi.value(x).conj() * C64::new(0.0, p.hbar() * tau * (1.0 - 2.0 * tau * x)) * phi.value(x),
                &grid,
            )
            .unwrap();
            worst = worst.max((flat + shift).norm());
            worst = worst.max(symmetry_defect(psi, phi, Measure::Deformed, &p, &grid).unwrap().norm());
        }
    }
    verdict(6, "flat defect = -<psi|i hbar tau(1-2 tau x)|phi>, deformed defect 0", worst, 1e-8, start.elapsed(), 2.0);
}

#[test]
fn criterion_07_transform_pair() {
    let start = Instant::now();
    let (p, chart, grid) = setup(0.1, 1.0);
    let defaults = EtaGrid::default_for(&p);
    let states = [
        hermite(0, 0.0, &chart, &grid),
        hermite(1, 0.03, &chart, &grid),
        hermite(2, -0.04, &chart, &grid).scaled(C64::new(0.0, 1.0)),
    ];
    let mut rt_err: f64 = 0.0;
    let mut non_monotone: f64 = 0.0;
    for psi in &states {
        rt_err = rt_err.max(roundtrip_error(psi, &defaults, &p, &grid).unwrap());
        let mut prev = f64::INFINITY;
        for frac in [0.125, 0.25, 0.5, 1.0] {
            let g = EtaGrid::new(defaults.eta_max * frac, defaults.eta_step).unwrap();
            let e = roundtrip_error(psi, &g, &p, &grid).unwrap();
            non_monotone = non_monotone.max(e - prev);
            prev = e;
        }
    }
    let mut parseval_err: f64 = 0.0;
    for tau in [0.1, 1.0] {
        let (p, chart, grid) = setup(tau, 1.0);
        let want = 3f64.sqrt() * tau * p.hbar();
        let f = parseval_factor(&hermite(1, 0.03, &chart, &grid), &EtaGrid::default_for(&p), &p, &grid).unwrap();
        parseval_err = parseval_err.max((f - want).abs() / want);
    }
    println!(
        "     [ 7] round trip {rt_err:.3e} (tol 1e-6), worst increase along ladder {non_monotone:.3e}, \
         Parseval relative error {parseval_err:.3e} (tol 1e-4)"
    );
    let ok = rt_err < 1e-6 && non_monotone <= 0.0 && parseval_err < 1e-4;
    verdict(7, "transform round trip, monotonicity, Parseval", if ok { rt_err } else { f64::INFINITY }, 1e-6, start.elapsed(), 10.0);
}

#[test]
fn criterion_08_quasi_representation() {
    let start = Instant::now();
    // P acts by multiplication on boundary-vanishing states and on
    // eigenstates sampled on their orthogonal lattice
    let (p, chart, grid) = setup(1.0, 1.0);
    let g = EtaGrid::default_for(&p);
    let mut p_err: f64 = 0.0;
    for psi in [hermite(0, 0.0, &chart, &grid), hermite(1, 0.04, &chart, &grid)] {
        let lhs = to_quasi_momentum(&apply_p(&psi, &p), &g, &p, &grid).unwrap();
        let rhs = apply_p_quasi(&to_quasi_momentum(&psi, &g, &p, &grid).unwrap());
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            p_err = p_err.max((a - b).norm());
        }
    }
    let c = orthogonal_spacing(&p);
    let lattice = EtaGrid::new(10.0 * c, c).unwrap();
    for n0 in [-4i64, 0, 3] {
        let phi = eigenstate(n0 as f64 * c, &p).base;
        let lhs = to_quasi_momentum(&apply_p(&phi, &p), &lattice, &p, &grid).unwrap();
        let rhs = apply_p_quasi(&to_quasi_momentum(&phi, &lattice, &p, &grid).unwrap());
        for (a, b) in lhs.values.iter().zip(&rhs.values) {
            p_err = p_err.max((a - b).norm());
        }
    }

    // flat limit: X acts as iħ d/dη
    let tiny = params(1e-6, 1.0);
    let tiny_chart = ThetaChart::new(tiny);
    let window = build_grid_window(&tiny_chart, tiny_chart.theta_of_x(-12.0), tiny_chart.theta_of_x(12.0), 96, 16).unwrap();
    let psi = x_gaussian(&XGaussian {
        center: 0.3,
        width: 1.0,
        kick: 0.5,
        poly: vec![C64::new(1.0, 0.0)],
    });
    let eg = EtaGrid::new(8.0, 0.01).unwrap();
    let s = to_quasi_momentum(&psi, &eg, &tiny, &window).unwrap();
    let xs = apply_x_quasi(&s, &tiny, &window).unwrap();
    let scale = s.values.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let mut x_limit_err: f64 = 0.0;
    for k in 1..s.values.len() - 1 {
        let d = (s.values[k + 1] - s.values[k - 1]) / (2.0 * eg.eta_step);
        let want = C64::new(0.0, tiny.hbar()) * d;
        x_limit_err = x_limit_err.max((xs.values[k] - want).norm() / scale);
    }

    // conjugation consistency with position-space X
    let mut conj_err: f64 = 0.0;
    for tau in [0.1, 1.0] {
        let (p, chart, grid) = setup(tau, 1.0);
        let psi = hermite(0, 0.0, &chart, &grid);
        let g = EtaGrid::default_for(&p);
        let back = reconstruct(&apply_x_quasi(&to_quasi_momentum(&psi, &g, &p, &grid).unwrap(), &p, &grid).unwrap(), &p);
        conj_err = conj_err.max(norm_squared(&back.minus(&apply_x(&psi)), &grid).unwrap().sqrt());
    }
    println!(
        "     [ 8] P multiplication {p_err:.3e} (tol 1e-8), X vs i hbar d/deta at tau=1e-6 {x_limit_err:.3e} (tol 1e-4), \
         conjugation L2 {conj_err:.3e} (tol 1e-6)"
    );
    let ok = p_err < 1e-8 && x_limit_err < 1e-4 && conj_err < 1e-6;
    verdict(8, "quasi-momentum P, X and conjugation", if ok { p_err } else { f64::INFINITY }, 1e-8, start.elapsed(), 10.0);
}

fn nd_state(dim: usize, rng: &mut ChaCha8Rng) -> NDimWaveFunction {
    let rotation = match dim {
        2 => rotation_2d(rng.gen_range(0.0..0.5)),
        3 => rotation_3d([1.0, rng.gen_range(-1.0..1.0), 0.5], rng.gen_range(0.0..0.5)),
        _ => HermiteProduct::ground(dim).rotation,
    };
    hermite_product(&HermiteProduct {
        degrees: (0..dim).map(|_| rng.gen_range(0..3)).collect(),
        center: (0..dim).map(|_| rng.gen_range(-0.5..0.5)).collect(),
        width: rng.gen_range(0.8..1.5),
        rotation,
        kick: (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect(),
    })
    .unwrap()
}

fn off_axis(dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let v: f64 = rng.gen_range(0.1..2.0);
            if rng.gen_bool(0.5) {
                v
            } else {
                -v
            }
        })
        .collect()
}

#[test]
fn criterion_09_ndim() {
    let start = Instant::now();
    let base = params(0.4, 1.1);
    let mut rng = ChaCha8Rng::seed_from_u64(9);

    let mut xp_err: f64 = 0.0;
    for dim in [2, 3] {
        for kind in [NormKind::L1, NormKind::Euclidean] {
            let nd = NDimParams::new(dim, base).unwrap().with_norm(kind);
            let psi = nd_state(dim, &mut rng);
            for _ in 0..10 {
                let x = off_axis(dim, &mut rng);
                for i in 0..dim {
                    for j in 0..dim {
                        xp_err = xp_err.max(commutator_xp_residual(i, j, &psi, &nd).unwrap().value(&x).unwrap().norm());
                    }
                }
            }
        }
    }

    let mut pp_err: f64 = 0.0;
    for dim in [2, 3] {
        let nd = NDimParams::new(dim, base).unwrap().with_norm(NormKind::Euclidean);
        for _ in 0..100 {
            let psi = nd_state(dim, &mut rng);
            let x = off_axis(dim, &mut rng);
            for i in 0..dim {
                for j in (i + 1)..dim {
                    let a = commutator_pp_direct(i, j, &psi, &nd).unwrap().value(&x).unwrap();
                    let b = commutator_pp_closed(i, j, &psi, &nd).unwrap().value(&x).unwrap();
                    pp_err = pp_err.max((a - b).norm() / a.norm().max(1e-300));
                }
            }
        }
    }

    let mut jac_err: f64 = 0.0;
    for dim in [2, 3] {
        for kind in [NormKind::L1, NormKind::Euclidean] {
            let nd = NDimParams::new(dim, base).unwrap().with_norm(kind);
            let psi = nd_state(dim, &mut rng);
            let x = off_axis(dim, &mut rng);
            let scale = psi.value(&x).unwrap().norm().max(1e-3) * base.hbar().powi(3);
            for (i, j, k) in [(0, 1, 0), (0, 1, 1), (1, 0, 0), (0, 0, 1)] {
                jac_err = jac_err.max(jacobi_residual(i, j, k, &psi, &nd).unwrap().value(&x).unwrap().norm() / scale);
            }
        }
    }

    // n = 1 against the one-dimensional operator, on x > 0 where ‖x‖ = x
    let chart = ThetaChart::new(base);
    let psi1 = theta_hermite(&ThetaHermite::new(2, &chart));
    let w = psi1.clone();
    let lifted = NDimWaveFunction::new(1, move |x, k| Ok(w.taylor(x[0], k)));
    let p1 = apply_p(&psi1, &base);
    let mut red_err: f64 = 0.0;
    for kind in [NormKind::L1, NormKind::Euclidean] {
        let nd = NDimParams::new(1, base).unwrap().with_norm(kind);
        let pn = apply_p_j(0, &lifted, &nd).unwrap();
        for k in 1..40 {
            let x = 0.1 * k as f64;
            let b = p1.value(x);
            red_err = red_err.max((pn.value(&[x]).unwrap() - b).norm() / b.norm().max(1.0));
            let xr = commutator_xp_residual(0, 0, &lifted, &nd).unwrap().value(&[x]).unwrap();
            let want = C64::new(0.0, base.hbar() * deformation_factor(x, &base)) * psi1.value(x);
            red_err = red_err.max((xr).norm() / want.norm().max(1.0));
        }
    }
    println!(
        "     [ 9] [X,P] {xp_err:.3e} (tol 1e-10), [P,P] closed vs direct {pp_err:.3e} (tol 1e-6), \
         Jacobi {jac_err:.3e} (tol 1e-7), n=1 reduction {red_err:.3e} (tol 1e-12)"
    );
    let ok = xp_err < 1e-10 && pp_err < 1e-6 && jac_err < 1e-7 && red_err < 1e-12;
    verdict(9, "n-dimensional algebra", if ok { xp_err } else { f64::INFINITY }, 1e-10, start.elapsed(), 20.0);
}

#[test]
fn criterion_10_overlap_curve() {
    let start = Instant::now();
    let out = Command::new(env!("CARGO_BIN_EXE_maxlenqm"))
        .args(["overlap", "--format", "csv"])
        .output()
        .expect("binary runs");
    let elapsed = start.elapsed();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("delta,overlap_closed,overlap_quadrature"));
    let rows: Vec<[f64; 3]> = lines
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    let p = params(0.1, 1.0);
    let half = 0.5 * p.momentum_unit();

    let centre = rows.iter().find(|r| r[0] == 0.0).expect("row at delta = 0");
    let one_err = (centre[1] - 1.0).abs().max((centre[2] - 1.0).abs());
    let mut zero_err: f64 = 0.0;
    let mut zeros_seen = 0;
    for r in &rows {
        let n = r[0] / half;
        if r[0] != 0.0 && (n - n.round()).abs() < 1e-9 && n.round().abs() <= 6.0 {
            zeros_seen += 1;
            zero_err = zero_err.max(r[1].abs()).max(r[2].abs());
        }
    }
    assert_eq!(zeros_seen, 12, "zeros at n = ±1..±6 must be sampled");
    let agree_err = rows.iter().map(|r| (r[1] - r[2]).abs()).fold(0.0, f64::max);
    println!(
        "     [10] value at 0 off by {one_err:.3e}, worst |overlap| at n*tau*hbar*sqrt3/2 {zero_err:.3e}, \
         worst column disagreement {agree_err:.3e} (tol 1e-8)"
    );
    verdict(10, "overlap curve data", one_err.max(zero_err).max(agree_err), 1e-8, elapsed, 5.0);
}
