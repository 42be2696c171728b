//! Complex wave functions of one position variable, evaluable as truncated
//! Taylor series so that operator actions stay exact at every point.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::jet::{Jet2, Series};

pub type C64 = Complex64;

type TaylorFn = dyn Fn(f64, usize) -> Series<C64> + Send + Sync;
type ValueFn = dyn Fn(f64) -> C64 + Send + Sync;

/// A state `ψ(x)`.
///
/// `taylor(x, k)` returns the Taylor coefficients of `ψ(x + t)` in `t` up
/// to order `k`. Operators wrap the input in a new closure, so a composite
/// operator requests higher orders from the states it is built on.
#[derive(Clone)]
pub struct WaveFunction {
    taylor: Arc<TaylorFn>,
    value: Option<Arc<ValueFn>>,
    label: Option<String>,
}

impl fmt::Debug for WaveFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WaveFunction").field("label", &self.label).finish()
    }
}

impl WaveFunction {
    pub fn from_taylor<F>(f: F) -> Self
    where
        F: Fn(f64, usize) -> Series<C64> + Send + Sync + 'static,
    {
        WaveFunction {
            taylor: Arc::new(f),
            value: None,
            label: None,
        }
    }

    /// Attach a direct value evaluator used when no derivatives are needed.
    pub fn with_value_fn<F>(mut self, f: F) -> Self
    where
        F: Fn(f64) -> C64 + Send + Sync + 'static,
    {
        self.value = Some(Arc::new(f));
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn constant(c: C64) -> Self {
        WaveFunction::from_taylor(move |_, order| Series::constant(1, order, c))
            .with_value_fn(move |_| c)
    }

    pub fn zero() -> Self {
        Self::constant(C64::new(0.0, 0.0)).with_label("zero")
    }

    pub fn taylor(&self, x: f64, order: usize) -> Series<C64> {
        (self.taylor)(x, order)
    }

    pub fn value(&self, x: f64) -> C64 {
        match &self.value {
            Some(v) => v(x),
            None => (self.taylor)(x, 0).value(),
        }
    }

    pub fn jet(&self, x: f64) -> Jet2<C64> {
        Jet2::from(&self.taylor(x, 2))
    }

    pub fn scaled(&self, c: C64) -> Self {
        let a = self.clone();
        let b = self.clone();
        let mut out = WaveFunction::from_taylor(move |x, k| a.taylor(x, k).scale(c))
            .with_value_fn(move |x| c * b.value(x));
        out.label = self.label.as_ref().map(|l| format!("{c}*{l}"));
        out
    }

    /// `a·ψ + b·φ`.
    pub fn linear_combination(a: C64, psi: &WaveFunction, b: C64, phi: &WaveFunction) -> Self {
        let (p1, q1) = (psi.clone(), phi.clone());
        let (p2, q2) = (psi.clone(), phi.clone());
        WaveFunction::from_taylor(move |x, k| {
            &p1.taylor(x, k).scale(a) + &q1.taylor(x, k).scale(b)
        })
        .with_value_fn(move |x| a * p2.value(x) + b * q2.value(x))
    }

    pub fn plus(&self, other: &WaveFunction) -> Self {
        let one = C64::new(1.0, 0.0);
        Self::linear_combination(one, self, one, other)
    }

    pub fn minus(&self, other: &WaveFunction) -> Self {
        Self::linear_combination(C64::new(1.0, 0.0), self, C64::new(-1.0, 0.0), other)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> WaveFunction {
        WaveFunction::from_taylor(|x, k| {
            let t = Series::variable(C64::new(x, 0.0), k);
            &(&t * &t) * &t
        })
    }

    #[test]
    fn jet_reads_value_and_derivatives() {
        let j = cubic().jet(2.0);
        assert_eq!(j.value, C64::new(8.0, 0.0));
        assert_eq!(j.d1, C64::new(12.0, 0.0));
        assert_eq!(j.d2, C64::new(12.0, 0.0));
    }

    #[test]
    fn jet_first_derivative_matches_central_difference() {
        let psi = cubic().scaled(C64::new(0.3, -1.1));
        for &x in &[-1.7, 0.2, 3.1] {
            let h = 1e-5;
            let fd = (psi.value(x + h) - psi.value(x - h)) / (2.0 * h);
            let d1 = psi.jet(x).d1;
            assert!((fd - d1).norm() <= 1e-6 * d1.norm().max(1.0));
        }
    }

    #[test]
    fn linear_combination_is_pointwise() {
        let c = WaveFunction::constant(C64::new(2.0, 1.0));
        let combo = WaveFunction::linear_combination(C64::new(0.0, 1.0), &cubic(), C64::new(3.0, 0.0), &c);
        let x = 1.5;
        let expected = C64::new(0.0, 1.0) * 3.375 + C64::new(6.0, 3.0);
        assert!((combo.value(x) - expected).norm() < 1e-14);
        assert!((combo.taylor(x, 1).coeff1(1) - C64::new(0.0, 6.75)).norm() < 1e-14);
        assert_eq!(cubic().minus(&cubic()).value(0.7), C64::new(0.0, 0.0));
    }
}
