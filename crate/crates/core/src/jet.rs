//! Truncated multivariate Taylor series ("jets").
//!
//! A [`Series`] holds the Taylor coefficients of a function around a base
//! point, in `nvars` displacement variables, up to total degree `order`.
//! Arithmetic on series is exact up to the truncation order, so operator
//! actions built from products, quotients and partial derivatives give
//! derivative values without finite-difference error.
//!
//! Coefficients are stored densely in a `(order + 1)^nvars` tensor; entries
//! whose total degree exceeds `order` are kept at zero. The intended sizes
//! are small (one to three variables, order at most four or five).

use std::fmt::Debug;
use std::ops::{Add, AddAssign, Div, Mul, MulAssign, Neg, Sub, SubAssign};

use num_complex::Complex64;
use smallvec::{smallvec, SmallVec};

/// Inline capacity covers univariate series up to order 3.
type Coeffs<T> = SmallVec<[T; 4]>;

/// Field of series coefficients: `f64` or `Complex64`.
pub trait Scalar:
    Copy
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + From<f64>
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + AddAssign
    + SubAssign
    + MulAssign
{
    fn zero() -> Self {
        Self::from(0.0)
    }
    fn one() -> Self {
        Self::from(1.0)
    }
    fn exp(self) -> Self;
    fn sqrt(self) -> Self;
    fn is_finite(self) -> bool;
    fn is_zero(self) -> bool;
}

impl Scalar for f64 {
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
    fn is_zero(self) -> bool {
        self == 0.0
    }
}

impl Scalar for Complex64 {
    fn exp(self) -> Self {
        Complex64::exp(self)
    }
    fn sqrt(self) -> Self {
        Complex64::sqrt(self)
    }
    fn is_finite(self) -> bool {
        Complex64::is_finite(self)
    }
    fn is_zero(self) -> bool {
        self.re == 0.0 && self.im == 0.0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Series<T> {
    nvars: usize,
    order: usize,
    coeffs: Coeffs<T>,
}

impl<T: Scalar> Series<T> {
    pub fn zero(nvars: usize, order: usize) -> Self {
        assert!(nvars >= 1, "a series needs at least one variable");
        let len = (order + 1).pow(nvars as u32);
        Series {
            nvars,
            order,
            coeffs: smallvec![T::zero(); len],
        }
    }

    pub fn constant(nvars: usize, order: usize, value: T) -> Self {
        let mut s = Self::zero(nvars, order);
        s.coeffs[0] = value;
        s
    }

    /// The coordinate function `x_axis` expanded around `at`.
    pub fn coordinate(nvars: usize, order: usize, axis: usize, at: T) -> Self {
        assert!(axis < nvars);
        let mut s = Self::constant(nvars, order, at);
        if order >= 1 {
            let idx = (order + 1).pow(axis as u32);
            s.coeffs[idx] = T::one();
        }
        s
    }

    /// Univariate shorthand for `coordinate(1, order, 0, at)`.
    pub fn variable(at: T, order: usize) -> Self {
        Self::coordinate(1, order, 0, at)
    }

    /// Univariate series from raw Taylor coefficients.
    pub fn from_coeffs(coeffs: Vec<T>) -> Self {
        assert!(!coeffs.is_empty());
        Series {
            nvars: 1,
            order: coeffs.len() - 1,
            coeffs: Coeffs::from_vec(coeffs),
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn value(&self) -> T {
        self.coeffs[0]
    }

    fn stride(&self) -> usize {
        self.order + 1
    }

    fn index_of(&self, exps: &[usize]) -> usize {
        debug_assert_eq!(exps.len(), self.nvars);
        let stride = self.stride();
        exps.iter().rev().fold(0, |acc, &e| acc * stride + e)
    }

    fn exponents_of(&self, mut idx: usize) -> Vec<usize> {
        let stride = self.stride();
        (0..self.nvars)
            .map(|_| {
                let e = idx % stride;
                idx /= stride;
                e
            })
            .collect()
    }

    fn degree_of(&self, mut idx: usize) -> usize {
        let stride = self.stride();
        let mut deg = 0;
        while idx > 0 {
            deg += idx % stride;
            idx /= stride;
        }
        deg
    }

    /// Taylor coefficient of the monomial with the given exponents (zero
    /// beyond the truncation order).
    pub fn coeff(&self, exps: &[usize]) -> T {
        if exps.iter().sum::<usize>() > self.order {
            return T::zero();
        }
        self.coeffs[self.index_of(exps)]
    }

    /// Univariate coefficient `k`.
    pub fn coeff1(&self, k: usize) -> T {
        debug_assert_eq!(self.nvars, 1);
        if k > self.order {
            T::zero()
        } else {
            self.coeffs[k]
        }
    }

    /// Partial derivative value `∂^exps f` at the base point.
    pub fn derivative(&self, exps: &[usize]) -> T {
        let fact: f64 = exps
            .iter()
            .map(|&e| (1..=e).map(|k| k as f64).product::<f64>())
            .product();
        self.coeff(exps) * T::from(fact)
    }

    pub fn scale(&self, c: T) -> Self {
        Series {
            nvars: self.nvars,
            order: self.order,
            coeffs: self.coeffs.iter().map(|&a| a * c).collect(),
        }
    }

    pub fn add_scalar(mut self, c: T) -> Self {
        self.coeffs[0] += c;
        self
    }

    fn check_shape(&self, other: &Self) {
        assert!(
            self.nvars == other.nvars && self.order == other.order,
            "series shape mismatch: ({}, {}) vs ({}, {})",
            self.nvars,
            self.order,
            other.nvars,
            other.order
        );
    }

    /// Drop all terms of total degree above `order`.
    pub fn truncated(&self, order: usize) -> Self {
        if order >= self.order {
            return self.clone();
        }
        let mut out = Self::zero(self.nvars, order);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if self.degree_of(idx) <= order {
                let exps = self.exponents_of(idx);
                let j = out.index_of(&exps);
                out.coeffs[j] = c;
            }
        }
        out
    }

    /// `∂f/∂x_axis` as a series of one lower order.
    pub fn partial(&self, axis: usize) -> Self {
        assert!(axis < self.nvars);
        assert!(self.order >= 1, "cannot differentiate an order-0 series");
        let mut out = Self::zero(self.nvars, self.order - 1);
        for (idx, &c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mut exps = self.exponents_of(idx);
            if exps[axis] == 0 || exps.iter().sum::<usize>() > self.order {
                continue;
            }
            let e = exps[axis];
            exps[axis] -= 1;
            let j = out.index_of(&exps);
            out.coeffs[j] = c * T::from(e as f64);
        }
        out
    }

    /// Univariate antiderivative with the given constant term; raises the
    /// order by one.
    pub fn antiderivative(&self, constant: T) -> Self {
        assert_eq!(self.nvars, 1);
        let mut coeffs = Coeffs::with_capacity(self.order + 2);
        coeffs.push(constant);
        coeffs.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, &c)| c / T::from((k + 1) as f64)),
        );
        Series {
            nvars: 1,
            order: self.order + 1,
            coeffs,
        }
    }

    /// Evaluate `g(self)` for a univariate `g` given by its Taylor
    /// coefficients `g_coeffs[k] = g^(k)(a) / k!` around `a = self.value()`.
    pub fn compose(&self, g_coeffs: &[T]) -> Self {
        let mut delta = self.clone();
        delta.coeffs[0] = T::zero();
        let top = g_coeffs.len().min(self.order + 1);
        let mut acc = Self::constant(self.nvars, self.order, g_coeffs[top - 1]);
        for k in (0..top - 1).rev() {
            acc = &acc * &delta;
            acc.coeffs[0] += g_coeffs[k];
        }
        acc
    }

    pub fn exp(&self) -> Self {
        let e = self.value().exp();
        let mut g = Coeffs::with_capacity(self.order + 1);
        let mut term = e;
        for k in 0..=self.order {
            if k > 0 {
                term = term / T::from(k as f64);
            }
            g.push(term);
        }
        self.compose(&g)
    }

    pub fn recip(&self) -> Self {
        let a = self.value();
        let inv = T::one() / a;
        let mut g = Coeffs::with_capacity(self.order + 1);
        let mut term = inv;
        for _ in 0..=self.order {
            g.push(term);
            term = -(term * inv);
        }
        self.compose(&g)
    }

    pub fn sqrt(&self) -> Self {
        let a = self.value();
        let mut g = Coeffs::with_capacity(self.order + 1);
        let mut term = a.sqrt();
        for k in 0..=self.order {
            if k > 0 {
                let kf = k as f64;
                term = term * T::from((1.5 - kf) / kf) / a;
            }
            g.push(term);
        }
        self.compose(&g)
    }

    pub fn is_finite(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_finite())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(T) -> U) -> Series<U> {
        Series {
            nvars: self.nvars,
            order: self.order,
            coeffs: self.coeffs.iter().map(|&c| f(c)).collect(),
        }
    }
}

impl Series<f64> {
    pub fn to_complex(&self) -> Series<Complex64> {
        self.map(|c| Complex64::new(c, 0.0))
    }
}

impl Series<Complex64> {
    pub fn conj(&self) -> Self {
        self.map(|c| c.conj())
    }
}

impl<T: Scalar> Add for &Series<T> {
    type Output = Series<T>;
    fn add(self, rhs: &Series<T>) -> Series<T> {
        self.check_shape(rhs);
        Series {
            nvars: self.nvars,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }
}

impl<T: Scalar> Sub for &Series<T> {
    type Output = Series<T>;
    fn sub(self, rhs: &Series<T>) -> Series<T> {
        self.check_shape(rhs);
        Series {
            nvars: self.nvars,
            order: self.order,
            coeffs: self
                .coeffs
                .iter()
                .zip(&rhs.coeffs)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }
}

impl<T: Scalar> Neg for &Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        self.scale(-T::one())
    }
}

impl<T: Scalar> Mul for &Series<T> {
    type Output = Series<T>;
    fn mul(self, rhs: &Series<T>) -> Series<T> {
        self.check_shape(rhs);
        let mut out = Series::zero(self.nvars, self.order);
        if self.nvars == 1 {
            for (i, &a) in self.coeffs.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (j, &b) in rhs.coeffs[..=self.order - i].iter().enumerate() {
                    out.coeffs[i + j] += a * b;
                }
            }
            return out;
        }
        let degrees: Vec<usize> = (0..self.coeffs.len()).map(|i| self.degree_of(i)).collect();
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a.is_zero() || degrees[i] > self.order {
                continue;
            }
            for (j, &b) in rhs.coeffs.iter().enumerate() {
                // Digit-wise sums never carry while the total degree stays
                // within the order, so the product index is i + j.
                if degrees[i] + degrees[j] <= self.order {
                    out.coeffs[i + j] += a * b;
                }
            }
        }
        out
    }
}

impl<T: Scalar> Div for &Series<T> {
    type Output = Series<T>;
    fn div(self, rhs: &Series<T>) -> Series<T> {
        self * &rhs.recip()
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl<T: Scalar> $tr for Series<T> {
            type Output = Series<T>;
            fn $m(self, rhs: Series<T>) -> Series<T> {
                (&self).$m(&rhs)
            }
        }
        impl<T: Scalar> $tr<&Series<T>> for Series<T> {
            type Output = Series<T>;
            fn $m(self, rhs: &Series<T>) -> Series<T> {
                (&self).$m(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);
forward_owned!(Div, div);

impl<T: Scalar> Neg for Series<T> {
    type Output = Series<T>;
    fn neg(self) -> Series<T> {
        -&self
    }
}

/// Value with first and second derivative of a univariate function.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Jet2<T> {
    pub value: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Scalar> From<&Series<T>> for Jet2<T> {
    fn from(s: &Series<T>) -> Self {
        assert_eq!(s.nvars(), 1);
        Jet2 {
            value: s.coeff1(0),
            d1: s.coeff1(1),
            d2: s.coeff1(2) * T::from(2.0),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * (1.0 + a.abs().max(b.abs()))
    }

    #[test]
    fn exp_of_variable_gives_factorial_coefficients() {
        let x = Series::variable(0.3_f64, 5);
        let e = x.exp();
        let mut fact = 1.0;
        for k in 0..=5 {
            if k > 0 {
                fact *= k as f64;
            }
            assert!(close(e.coeff1(k), 0.3_f64.exp() / fact, 1e-15));
        }
    }

    #[test]
    fn recip_and_sqrt_derivatives() {
        let x = Series::variable(2.0_f64, 3);
        let r = x.recip();
        assert!(close(r.derivative(&[1]), -0.25, 1e-15));
        assert!(close(r.derivative(&[2]), 2.0 / 8.0, 1e-15));
        assert!(close(r.derivative(&[3]), -6.0 / 16.0, 1e-15));
        let s = x.sqrt();
        assert!(close(s.derivative(&[1]), 0.5 / 2f64.sqrt(), 1e-15));
        assert!(close(s.derivative(&[2]), -0.25 * 2f64.powf(-1.5), 1e-15));
    }

    #[test]
    fn multivariate_mixed_partials() {
        // f(x, y) = x^2 y^3 at (1.5, -0.5)
        let x = Series::coordinate(2, 4, 0, 1.5_f64);
        let y = Series::coordinate(2, 4, 1, -0.5_f64);
        let f = &(&x * &x) * &(&(&y * &y) * &y);
        assert!(close(f.derivative(&[1, 1]), 2.0 * 1.5 * 3.0 * 0.25, 1e-14));
        assert!(close(f.derivative(&[2, 1]), 2.0 * 3.0 * 0.25, 1e-14));
        assert!(close(f.derivative(&[0, 2]), 2.25 * 6.0 * -0.5, 1e-14));
        // terms beyond the order are dropped
        assert_eq!(f.coeff(&[2, 3]), 0.0);
    }

    #[test]
    fn partial_lowers_order() {
        let x = Series::coordinate(2, 3, 0, 0.7_f64);
        let y = Series::coordinate(2, 3, 1, 0.2_f64);
        let f = (&x * &y).exp();
        let fx = f.partial(0);
        assert_eq!(fx.order(), 2);
        let expected = 0.2 * (0.14_f64).exp();
        assert!(close(fx.value(), expected, 1e-15));
        let fxy = fx.partial(1);
        let expected_xy = (1.0 + 0.14) * (0.14_f64).exp();
        assert!(close(fxy.value(), expected_xy, 1e-15));
    }

    #[test]
    fn antiderivative_inverts_partial() {
        let x = Series::variable(0.4_f64, 4);
        let f = (&x * &x).exp();
        let back = f.partial(0).antiderivative(f.value());
        for k in 0..=4 {
            assert!(close(back.coeff1(k), f.coeff1(k), 1e-15));
        }
    }

    #[test]
    fn jet2_reads_derivatives() {
        let x = Series::variable(1.0_f64, 2);
        let cube = &(&x * &x) * &x;
        let j = Jet2::from(&cube);
        assert_eq!(j.value, 1.0);
        assert_eq!(j.d1, 3.0);
        assert_eq!(j.d2, 6.0);
    }

    proptest! {
        #[test]
        fn division_inverts_multiplication(a in -3.0f64..3.0, b in 0.5f64..4.0, c in -2.0f64..2.0) {
            let x = Series::coordinate(2, 3, 0, a);
            let y = Series::coordinate(2, 3, 1, c);
            let num = (&x * &y).exp();
            let den = (&(&y * &y) + &Series::constant(2, 3, b)).sqrt();
            let back = &(&num / &den) * &den;
            for i in 0..=3 {
                for j in 0..=(3 - i) {
                    let (p, q) = (back.coeff(&[i, j]), num.coeff(&[i, j]));
                    prop_assert!((p - q).abs() <= 1e-12 * (1.0 + q.abs()));
                }
            }
        }

        #[test]
        fn first_derivative_matches_central_difference(x0 in -2.0f64..2.0) {
            let f = |x: f64| (x * x).exp() / (1.0 + x * x).sqrt();
            let x = Series::variable(x0, 2);
            let s = &(&x * &x).exp() / &(&(&x * &x) + &Series::constant(1, 2, 1.0)).sqrt();
            let h = 1e-5;
            let fd = (f(x0 + h) - f(x0 - h)) / (2.0 * h);
            prop_assert!((s.derivative(&[1]) - fd).abs() <= 1e-6 * (1.0 + fd.abs()));
        }
    }
}
