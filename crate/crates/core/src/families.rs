//! Smooth test states with closed-form jets.
//!
//! * [`ThetaHermite`]: `H_k(u)·exp(-u²/2)·w(θ)` with `u = (θ(x) - θ_c)/σ`.
//!   The window `w(θ) = (1 - v⁸)^m`, `v` the chart coordinate rescaled to
//!   `(-1, 1)`, is flat in the interior and vanishes to order `m` at both
//!   chart ends. With `m ≥ 3` the state decays like `|x|^-m`, so its
//!   moments exist under both the deformed and the flat measure.
//! * [`XGaussian`]: polynomial × Gaussian in `x` with a plane-wave kick.

use rand::Rng;

use crate::algebra::ThetaChart;
use crate::jet::Series;
use crate::wave::{WaveFunction, C64};

#[derive(Clone, Debug, PartialEq)]
pub struct ThetaHermite {
    pub chart: ThetaChart,
    /// Hermite degree `k`.
    pub k: usize,
    /// Center `θ_c` in chart coordinates.
    pub center: f64,
    /// Width `σ` in chart coordinates.
    pub sigma: f64,
    /// Vanishing order `m` of the edge window; 0 disables the window.
    pub edge_order: u32,
}

impl ThetaHermite {
    /// Degree `k` centered on the chart midpoint, `σ = L/10`, `m = 3`.
    pub fn new(k: usize, chart: &ThetaChart) -> Self {
        ThetaHermite {
            chart: *chart,
            k,
            center: chart.midpoint(),
            sigma: 0.1 * chart.length(),
            edge_order: 3,
        }
    }

    fn window_coordinate(&self, theta: f64) -> f64 {
        (2.0 * theta - self.chart.theta_min() - self.chart.theta_max()) / self.chart.length()
    }
}

/// Physicists' Hermite polynomials by recurrence, on any series.
pub(crate) fn hermite<T>(k: usize, u: &Series<T>) -> Series<T>
where
    T: crate::jet::Scalar,
{
    let one = Series::constant(u.nvars(), u.order(), T::one());
    if k == 0 {
        return one;
    }
    let mut prev = one;
    let mut cur = u.scale(T::from(2.0));
    for n in 1..k {
        let next = &(u * &cur).scale(T::from(2.0)) - &prev.scale(T::from(2.0 * n as f64));
        prev = cur;
        cur = next;
    }
    cur
}

fn hermite_value(k: usize, u: f64) -> f64 {
    let (mut prev, mut cur) = (1.0, 2.0 * u);
    if k == 0 {
        return 1.0;
    }
    for n in 1..k {
        let next = 2.0 * u * cur - 2.0 * n as f64 * prev;
        prev = cur;
        cur = next;
    }
    cur
}

fn theta_hermite_series(spec: &ThetaHermite, theta: &Series<f64>) -> Series<f64> {
    let u = theta.clone().add_scalar(-spec.center).scale(1.0 / spec.sigma);
    let gauss = (&u * &u).scale(-0.5).exp();
    let mut out = &hermite(spec.k, &u) * &gauss;
    if spec.edge_order > 0 {
        let v = theta
            .clone()
            .add_scalar(-(spec.chart.theta_min() + spec.chart.theta_max()) * 0.5)
            .scale(2.0 / spec.chart.length());
        let v2 = &v * &v;
        let v4 = &v2 * &v2;
        let v8 = &v4 * &v4;
        let w = (-v8).add_scalar(1.0);
        for _ in 0..spec.edge_order {
            out = &out * &w;
        }
    }
    out
}

pub fn theta_hermite(spec: &ThetaHermite) -> WaveFunction {
    let s1 = spec.clone();
    let s2 = spec.clone();
    WaveFunction::from_taylor(move |x, order| {
        let theta = s1.chart.theta_series(x, order);
        theta_hermite_series(&s1, &theta).to_complex()
    })
    .with_value_fn(move |x| {
        let theta = s2.chart.theta_of_x(x);
        let u = (theta - s2.center) / s2.sigma;
        let mut v = hermite_value(s2.k, u) * (-0.5 * u * u).exp();
        if s2.edge_order > 0 {
            let w = 1.0 - s2.window_coordinate(theta).powi(8);
            v *= w.powi(s2.edge_order as i32);
        }
        C64::new(v, 0.0)
    })
    .with_label(format!("hermite(k={})", spec.k))
}

/// `poly(x - center)·exp(-(x - center)²/(2·width²))·exp(i·kick·x)`.
#[derive(Clone, Debug, PartialEq)]
pub struct XGaussian {
    pub center: f64,
    pub width: f64,
    pub kick: f64,
    /// Polynomial coefficients in ascending powers of `x - center`.
    pub poly: Vec<C64>,
}

impl XGaussian {
    pub fn standard() -> Self {
        XGaussian {
            center: 0.0,
            width: 1.0,
            kick: 0.0,
            poly: vec![C64::new(1.0, 0.0)],
        }
    }
}

pub fn x_gaussian(spec: &XGaussian) -> WaveFunction {
    let s1 = spec.clone();
    let s2 = spec.clone();
    WaveFunction::from_taylor(move |x, order| {
        let y = Series::variable(C64::new(x - s1.center, 0.0), order);
        let mut poly = Series::constant(1, order, C64::new(0.0, 0.0));
        for &c in s1.poly.iter().rev() {
            poly = (&poly * &y).add_scalar(c);
        }
        let kick = Series::variable(C64::new(x, 0.0), order).scale(C64::new(0.0, s1.kick));
        let expo = &(&y * &y).scale(C64::new(-0.5 / (s1.width * s1.width), 0.0)) + &kick;
        &poly * &expo.exp()
    })
    .with_value_fn(move |x| {
        let y = x - s2.center;
        let poly = s2
            .poly
            .iter()
            .rev()
            .fold(C64::new(0.0, 0.0), |acc, &c| acc * y + c);
        let g = (-0.5 * y * y / (s2.width * s2.width)).exp();
        poly * C64::from_polar(g, s2.kick * x)
    })
    .with_label("x-gaussian")
}

/// A random smooth state with finite moments under both measures (not
/// normalized). Mixes θ-Hermite superpositions and kicked x-Gaussians,
/// scaled to the chart of `chart`.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, chart: &ThetaChart) -> WaveFunction {
    let len = chart.length();
    let tau = chart.params().tau();
    if rng.gen_bool(0.5) {
        let mut spec_a = ThetaHermite::new(rng.gen_range(0..=4), chart);
        spec_a.center = chart.midpoint() + rng.gen_range(-0.15..0.15) * len;
        spec_a.sigma = rng.gen_range(0.04..0.12) * len;
        let mut spec_b = ThetaHermite::new(rng.gen_range(0..=4), chart);
        spec_b.center = chart.midpoint() + rng.gen_range(-0.15..0.15) * len;
        spec_b.sigma = rng.gen_range(0.04..0.12) * len;
        let a = C64::from_polar(1.0, rng.gen_range(0.0..std::f64::consts::TAU));
        let b = C64::from_polar(rng.gen_range(0.0..1.0), rng.gen_range(0.0..std::f64::consts::TAU));
        WaveFunction::linear_combination(a, &theta_hermite(&spec_a), b, &theta_hermite(&spec_b))
    } else {
        let degree = rng.gen_range(0..=2);
        let poly = (0..=degree)
            .map(|_| C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect::<Vec<_>>();
        let mut poly = poly;
        poly[0] += C64::new(1.5, 0.0);
        let spec = XGaussian {
            center: rng.gen_range(-3.0..3.0) / tau,
            width: rng.gen_range(0.2..2.0) / tau,
            kick: rng.gen_range(-5.0..5.0) * tau,
            poly,
        };
        x_gaussian(&spec)
    }
}
