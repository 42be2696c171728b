//! Position-representation operators:
//! `X̂ψ = xψ` and `P̂ψ = -iħD(x)ψ'`, with `[X̂, P̂] = iħD(X̂)`.
//!
//! Each operator returns a new [`WaveFunction`] whose Taylor expansion is
//! derived from the input's expansion one order higher, so compositions
//! such as `P̂²` or `X̂P̂ - P̂X̂` are exact up to rounding at every point.

use crate::algebra::{deformation_series, DeformationParams};
use crate::error::Result;
use crate::jet::Series;
use crate::quadrature::{
    inner_product, integrate_flat_checked, Measure, QuadratureGrid,
};
use crate::wave::{WaveFunction, C64};

const I: C64 = C64::new(0.0, 1.0);

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OperatorTag {
    X,
    P,
    PSquared,
    PDaggerFlat,
}

/// An operator applied to a state.
#[derive(Clone, Debug)]
pub struct OperatorApplication {
    pub input: WaveFunction,
    pub output: WaveFunction,
    pub operator_tag: OperatorTag,
}

pub fn apply(tag: OperatorTag, psi: &WaveFunction, params: &DeformationParams) -> OperatorApplication {
    let output = match tag {
        OperatorTag::X => apply_x(psi),
        OperatorTag::P => apply_p(psi, params),
        OperatorTag::PSquared => apply_p_squared(psi, params),
        OperatorTag::PDaggerFlat => apply_p_dagger_flat(psi, params),
    };
    OperatorApplication {
        input: psi.clone(),
        output,
        operator_tag: tag,
    }
}

fn position_series(x: f64, order: usize) -> Series<C64> {
    Series::variable(C64::new(x, 0.0), order)
}

pub fn apply_x(psi: &WaveFunction) -> WaveFunction {
    let a = psi.clone();
    let b = psi.clone();
    WaveFunction::from_taylor(move |x, k| &position_series(x, k) * &a.taylor(x, k))
        .with_value_fn(move |x| x * b.value(x))
}

pub fn apply_p(psi: &WaveFunction, params: &DeformationParams) -> WaveFunction {
    let a = psi.clone();
    let p = *params;
    WaveFunction::from_taylor(move |x, k| {
        let dpsi = a.taylor(x, k + 1).partial(0);
        let d = deformation_series(x, k, &p).to_complex();
        (&d * &dpsi).scale(-I * p.hbar())
    })
}

pub fn apply_p_squared(psi: &WaveFunction, params: &DeformationParams) -> WaveFunction {
    apply_p(&apply_p(psi, params), params)
}

/// `P̂†ψ = P̂ψ + iħτ(1 - 2τx)ψ`, the adjoint of `P̂` under the flat measure.
pub fn apply_p_dagger_flat(psi: &WaveFunction, params: &DeformationParams) -> WaveFunction {
    let pp = apply_p(psi, params);
    let a = psi.clone();
    let p = *params;
    WaveFunction::from_taylor(move |x, k| {
        let tau = p.tau();
        let shift = Series::variable(C64::new(x, 0.0), k)
            .scale(C64::new(-2.0 * tau, 0.0))
            .add_scalar(C64::new(1.0, 0.0));
        let correction = (&shift * &a.taylor(x, k)).scale(I * p.hbar() * tau);
        &pp.taylor(x, k) + &correction
    })
}

/// `(X̂P̂ - P̂X̂ - iħD)ψ`, identically zero.
pub fn commutator_residual(psi: &WaveFunction, params: &DeformationParams) -> WaveFunction {
    let xp = apply_x(&apply_p(psi, params));
    let px = apply_p(&apply_x(psi), params);
    let a = psi.clone();
    let p = *params;
    WaveFunction::from_taylor(move |x, k| {
        let d = deformation_series(x, k, &p).to_complex();
        let rhs = (&d * &a.taylor(x, k)).scale(I * p.hbar());
        &(&xp.taylor(x, k) - &px.taylor(x, k)) - &rhs
    })
}

/// `⟨ψ|P̂φ⟩ - ⟨P̂ψ|φ⟩` under the chosen measure.
///
/// Under the deformed measure this is the boundary term
/// `-iħ[ψ*φ]` and vanishes for boundary-vanishing states. Under the flat
/// measure it equals `⟨(P̂† - P̂)ψ|φ⟩ = -⟨ψ|iħτ(1 - 2τx)φ⟩`; both flat
/// integrals are checked for divergence.
pub fn symmetry_defect(
    psi: &WaveFunction,
    phi: &WaveFunction,
    measure: Measure,
    params: &DeformationParams,
    grid: &QuadratureGrid,
) -> Result<C64> {
    let p_phi = apply_p(phi, params);
    let p_psi = apply_p(psi, params);
    match measure {
        Measure::Deformed => {
            Ok(inner_product(psi, &p_phi, grid)? - inner_product(&p_psi, phi, grid)?)
        }
        Measure::Flat => {
            let lhs = integrate_flat_checked(
                "<psi|P phi> (flat)",
                |x| psi.value(x).conj() * p_phi.value(x),
                grid,
            )?;
            let rhs = integrate_flat_checked(
                "<P psi|phi> (flat)",
                |x| p_psi.value(x).conj() * phi.value(x),
                grid,
            )?;
            Ok(lhs - rhs)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ThetaChart;
    use crate::families::{theta_hermite, x_gaussian, ThetaHermite, XGaussian};
    use crate::quadrature::normalize;
    use crate::states::{eigenstate, lattice_eta};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn params() -> DeformationParams {
        DeformationParams::new(0.8, 1.3, 1.0).unwrap()
    }

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn x_on_constant_is_position() {
        let one = WaveFunction::constant(c(1.0));
        let xs = apply_x(&one);
        assert_eq!(xs.value(2.5), c(2.5));
        assert_eq!(xs.jet(2.5).d1, c(1.0));
    }

    #[test]
    fn x_product_rule() {
        let p = params();
        let psi = eigenstate(1.1, &p).base;
        let xpsi = apply_x(&psi);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let x: f64 = rng.gen_range(-20.0..20.0);
            let j = psi.jet(x);
            let got = xpsi.jet(x).d1;
            let want = j.value + x * j.d1;
            assert!((got - want).norm() <= 1e-12 * want.norm().max(1.0));
            assert!((xpsi.value(x).norm() - x.abs() * psi.value(x).norm()).abs() < 1e-12);
        }
    }

    #[test]
    fn p_on_eigenstate_and_constant() {
        let p = params();
        let phi = eigenstate(2.4, &p).base;
        let pphi = apply_p(&phi, &p);
        for &x in &[-7.0, -0.3, 0.0, 0.6, 15.0] {
            let want = 2.4 * phi.value(x);
            assert!((pphi.value(x) - want).norm() < 1e-12);
        }
        let one = WaveFunction::constant(c(1.0));
        assert_eq!(apply_p(&one, &p).value(0.4), c(0.0));
        assert_eq!(apply_p_squared(&one, &p).value(0.4), c(0.0));
    }

    #[test]
    fn p_squared_on_eigenstate() {
        let p = params();
        let phi = eigenstate(-1.7, &p).base;
        let p2 = apply_p_squared(&phi, &p);
        for &x in &[-3.0, 0.2, 9.0] {
            assert!((p2.value(x) - 1.7 * 1.7 * phi.value(x)).norm() < 1e-12);
        }
    }

    #[test]
    fn p_tends_to_flat_derivative_as_tau_vanishes() {
        let hbar = 1.0;
        let psi = x_gaussian(&XGaussian {
            center: 0.3,
            width: 1.0,
            kick: 0.5,
            poly: vec![c(1.0), c(0.2)],
        });
        let mut prev = f64::INFINITY;
        for &tau in &[1e-2, 1e-4, 1e-6] {
            let p = DeformationParams::new(tau, hbar, 1.0).unwrap();
            let pp = apply_p(&psi, &p);
            let mut err: f64 = 0.0;
            for k in 0..41 {
                let x = -4.0 + 0.2 * k as f64;
                let flat = -I * hbar * psi.jet(x).d1;
                err = err.max((pp.value(x) - flat).norm());
            }
            // O(τ) on bounded states
            assert!(err < 10.0 * tau, "tau={tau} err={err}");
            assert!(err < prev);
            prev = err;
        }
    }

    #[test]
    fn dagger_on_constant() {
        let p = params();
        let one = WaveFunction::constant(c(1.0));
        let d = apply_p_dagger_flat(&one, &p);
        for &x in &[-2.0, 0.0, 1.5] {
            let want = I * p.hbar() * p.tau() * (1.0 - 2.0 * p.tau() * x);
            assert!((d.value(x) - want).norm() < 1e-14);
        }
    }

    #[test]
    fn dagger_matches_derivative_of_d_psi() {
        // Oracle: -iħ d/dx (D ψ), differentiated as one product series.
        let p = params();
        let psi = theta_hermite(&ThetaHermite::new(2, &ThetaChart::new(p)));
        let dag = apply_p_dagger_flat(&psi, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let x: f64 = rng.gen_range(-5.0..5.0);
            let prod = &deformation_series(x, 1, &p).to_complex() * &psi.taylor(x, 1);
            let oracle = -I * p.hbar() * prod.coeff1(1);
            let got = dag.value(x);
            assert!((got - oracle).norm() <= 1e-10 * oracle.norm().max(1e-3));
        }
    }

    #[test]
    fn dagger_reduces_to_p_as_tau_vanishes() {
        let p = DeformationParams::new(1e-12, 1.0, 1.0).unwrap();
        let psi = x_gaussian(&XGaussian::standard());
        let (a, b) = (apply_p_dagger_flat(&psi, &p), apply_p(&psi, &p));
        for &x in &[-1.0, 0.0, 2.0] {
            assert!((a.value(x) - b.value(x)).norm() < 1e-11);
        }
    }

    #[test]
    fn commutator_residual_vanishes() {
        let p = params();
        let chart = ThetaChart::new(p);
        let states = [
            theta_hermite(&ThetaHermite::new(0, &chart)),
            theta_hermite(&ThetaHermite::new(3, &chart)),
            eigenstate(lattice_eta(3, &p), &p).base,
            x_gaussian(&XGaussian {
                center: -0.5,
                width: 0.7,
                kick: 1.2,
                poly: vec![c(0.5), c(-1.0), c(0.25)],
            }),
        ];
        for psi in &states {
            let r = commutator_residual(psi, &p);
            for k in 0..21 {
                let x = -3.0 + 0.3 * k as f64;
                assert!(r.value(x).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn linearity_of_p() {
        let p = params();
        let chart = ThetaChart::new(p);
        let psi = theta_hermite(&ThetaHermite::new(1, &chart));
        let phi = eigenstate(0.9, &p).base;
        let (a, b) = (C64::new(0.3, -2.0), C64::new(-1.1, 0.4));
        let lhs = apply_p(&WaveFunction::linear_combination(a, &psi, b, &phi), &p);
        let pa = apply_p(&psi, &p);
        let pb = apply_p(&phi, &p);
        for k in 0..31 {
            let x = -6.0 + 0.4 * k as f64;
            let rhs = a * pa.value(x) + b * pb.value(x);
            assert!((lhs.value(x) - rhs).norm() <= 1e-12 * rhs.norm().max(1.0));
        }
    }

    #[test]
    fn symmetry_defects() {
        let p = params();
        let chart = ThetaChart::new(p);
        let grid = QuadratureGrid::new(&chart);
        let psi = normalize(&theta_hermite(&ThetaHermite::new(0, &chart)), &grid).unwrap();
        let mut spec = ThetaHermite::new(1, &chart);
        spec.center = chart.theta_of_x(0.2);
        let phi = normalize(&theta_hermite(&spec).scaled(C64::new(0.0, 1.0)), &grid).unwrap();

        let deformed = symmetry_defect(&psi, &phi, Measure::Deformed, &p, &grid).unwrap();
        assert!(deformed.norm() < 1e-10);

        let flat = symmetry_defect(&psi, &phi, Measure::Flat, &p, &grid).unwrap();
        let tau = p.tau();
        let shifted = integrate_flat_checked(
            "shift",
            |x| psi.value(x).conj() * I * p.hbar() * tau * (1.0 - 2.0 * tau * x) * phi.value(x),
            &grid,
        )
        .unwrap();
        assert!((flat + shifted).norm() < 1e-8, "{flat} vs {shifted}");
        assert!(flat.norm() > 1e-3);

        // real ψ = φ: purely imaginary flat defect
        let real = normalize(&theta_hermite(&spec), &grid).unwrap();
        let self_defect = symmetry_defect(&real, &real, Measure::Flat, &p, &grid).unwrap();
        assert!(self_defect.re.abs() < 1e-10);
        assert!(self_defect.im.abs() > 1e-3);
    }

    #[test]
    fn flat_defect_flags_non_decaying_states() {
        let p = params();
        let grid = QuadratureGrid::new(&ThetaChart::new(p));
        let phi = eigenstate(0.5, &p).base;
        let r = symmetry_defect(&phi, &phi, Measure::Flat, &p, &grid);
        assert!(matches!(r, Err(crate::error::Error::DivergentMoment { .. })));
    }

    #[test]
    fn apply_dispatch() {
        let p = params();
        let psi = eigenstate(1.0, &p).base;
        let app = apply(OperatorTag::PSquared, &psi, &p);
        assert_eq!(app.operator_tag, OperatorTag::PSquared);
        assert!((app.output.value(0.4) - psi.value(0.4)).norm() < 1e-12);
    }
}
