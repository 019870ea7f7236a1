//! Forward-mode dual numbers, nested to depth 2 for exact second derivatives.
//!
//! A [`Dual<T>`] carries a value and a gradient of up to [`MAX_AD_DIM`]
//! components. Nesting (`Dual<Dual<f64>>`) propagates Hessians through any
//! chart metric written against the [`Scalar`] trait. Gradients are stored
//! inline so evaluation never allocates.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// Maximum number of simultaneous differentiation directions (chart dim cap).
pub const MAX_AD_DIM: usize = 8;

/// Scalar arithmetic shared by `f64` and dual numbers, rich enough for every
/// chart metric in the catalogue.
pub trait Scalar:
    Copy
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn from_f64(v: f64) -> Self;
    /// Underlying real value with all derivative information stripped.
    fn value(&self) -> f64;
    fn sin(self) -> Self;
    fn cos(self) -> Self;
    fn sinh(self) -> Self;
    fn cosh(self) -> Self;
    fn tanh(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn sqrt(self) -> Self;
    fn powi(self, n: i32) -> Self;

    fn zero() -> Self {
        Self::from_f64(0.0)
    }
    fn one() -> Self {
        Self::from_f64(1.0)
    }
}

impl Scalar for f64 {
    fn from_f64(v: f64) -> Self {
        v
    }
    fn value(&self) -> f64 {
        *self
    }
    fn sin(self) -> Self {
        f64::sin(self)
    }
    fn cos(self) -> Self {
        f64::cos(self)
    }
    fn sinh(self) -> Self {
        f64::sinh(self)
    }
    fn cosh(self) -> Self {
        f64::cosh(self)
    }
    fn tanh(self) -> Self {
        f64::tanh(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn powi(self, n: i32) -> Self {
        f64::powi(self, n)
    }
}

/// Dual number with value `re` and an inline gradient.
///
/// Constants keep `len == 0`; binary operations widen to the larger active
/// length, treating missing components as zero.
#[derive(Clone, Copy, Debug)]
pub struct Dual<T: Scalar> {
    pub re: T,
    len: u8,
    du: [T; MAX_AD_DIM],
}

/// First-derivative scalar.
pub type D1 = Dual<f64>;
/// Second-derivative (nested) scalar.
pub type D2 = Dual<Dual<f64>>;

impl<T: Scalar> Dual<T> {
    pub fn constant(re: T) -> Self {
        Dual {
            re,
            len: 0,
            du: [T::zero(); MAX_AD_DIM],
        }
    }

    /// Variable with unit derivative in direction `dir` out of `n_dirs`.
    pub fn variable(re: T, dir: usize, n_dirs: usize) -> Self {
        assert!(dir < n_dirs && n_dirs <= MAX_AD_DIM);
        let mut du = [T::zero(); MAX_AD_DIM];
        du[dir] = T::one();
        Dual {
            re,
            len: n_dirs as u8,
            du,
        }
    }

    pub fn grad(&self, dir: usize) -> T {
        if dir < self.len as usize {
            self.du[dir]
        } else {
            T::zero()
        }
    }

    fn chain(self, value: T, slope: T) -> Self {
        let mut du = [T::zero(); MAX_AD_DIM];
        for i in 0..self.len as usize {
            du[i] = self.du[i] * slope;
        }
        Dual {
            re: value,
            len: self.len,
            du,
        }
    }
}

impl<T: Scalar> Add for Dual<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let len = self.len.max(rhs.len);
        let mut du = [T::zero(); MAX_AD_DIM];
        for i in 0..len as usize {
            du[i] = self.grad(i) + rhs.grad(i);
        }
        Dual {
            re: self.re + rhs.re,
            len,
            du,
        }
    }
}

impl<T: Scalar> Sub for Dual<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let len = self.len.max(rhs.len);
        let mut du = [T::zero(); MAX_AD_DIM];
        for i in 0..len as usize {
            du[i] = self.grad(i) - rhs.grad(i);
        }
        Dual {
            re: self.re - rhs.re,
            len,
            du,
        }
    }
}

impl<T: Scalar> Mul for Dual<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let len = self.len.max(rhs.len);
        let mut du = [T::zero(); MAX_AD_DIM];
        for i in 0..len as usize {
            du[i] = self.grad(i) * rhs.re + self.re * rhs.grad(i);
        }
        Dual {
            re: self.re * rhs.re,
            len,
            du,
        }
    }
}

impl<T: Scalar> Div for Dual<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        let len = self.len.max(rhs.len);
        let q = self.re / rhs.re;
        let mut du = [T::zero(); MAX_AD_DIM];
        for i in 0..len as usize {
            du[i] = (self.grad(i) - q * rhs.grad(i)) / rhs.re;
        }
        Dual { re: q, len, du }
    }
}

impl<T: Scalar> Neg for Dual<T> {
    type Output = Self;
    fn neg(self) -> Self {
        let mut du = [T::zero(); MAX_AD_DIM];
        for i in 0..self.len as usize {
            du[i] = -self.du[i];
        }
        Dual {
            re: -self.re,
            len: self.len,
            du,
        }
    }
}

impl<T: Scalar> Scalar for Dual<T> {
    fn from_f64(v: f64) -> Self {
        Dual::constant(T::from_f64(v))
    }
    fn value(&self) -> f64 {
        self.re.value()
    }
    fn sin(self) -> Self {
        self.chain(self.re.sin(), self.re.cos())
    }
    fn cos(self) -> Self {
        self.chain(self.re.cos(), -self.re.sin())
    }
    fn sinh(self) -> Self {
        self.chain(self.re.sinh(), self.re.cosh())
    }
    fn cosh(self) -> Self {
        self.chain(self.re.cosh(), self.re.sinh())
    }
    fn tanh(self) -> Self {
        let t = self.re.tanh();
        self.chain(t, T::one() - t * t)
    }
    fn exp(self) -> Self {
        let e = self.re.exp();
        self.chain(e, e)
    }
    fn ln(self) -> Self {
        self.chain(self.re.ln(), T::one() / self.re)
    }
    fn sqrt(self) -> Self {
        let s = self.re.sqrt();
        self.chain(s, T::one() / (T::from_f64(2.0) * s))
    }
    fn powi(self, n: i32) -> Self {
        self.chain(
            self.re.powi(n),
            T::from_f64(n as f64) * self.re.powi(n - 1),
        )
    }
}

/// Seeds for one round of first derivatives in all `x.len()` directions.
pub fn seed_first(x: &[f64]) -> Vec<D1> {
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(i, &xi)| D1::variable(xi, i, n))
        .collect()
}

/// Seeds for nested duals carrying the full Hessian.
pub fn seed_second(x: &[f64]) -> Vec<D2> {
    let n = x.len();
    x.iter()
        .enumerate()
        .map(|(i, &xi)| {
            let inner = D1::variable(xi, i, n);
            let mut v = D2::variable(inner, i, n);
            // Outer derivative directions are constants at the inner level.
            for j in 0..n {
                v.du[j] = D1::constant(if i == j { 1.0 } else { 0.0 });
            }
            v
        })
        .collect()
}

/// Value, gradient, and Hessian of one nested-dual result.
pub fn unpack_second(v: &D2, n: usize) -> (f64, Vec<f64>, Vec<f64>) {
    let value = v.re.re;
    let grad: Vec<f64> = (0..n).map(|k| v.re.grad(k)).collect();
    let mut hess = vec![0.0; n * n];
    for l in 0..n {
        let dl = v.grad(l);
        for k in 0..n {
            hess[k * n + l] = dl.grad(k);
        }
    }
    (value, grad, hess)
}
