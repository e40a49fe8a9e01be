//! Bivariate power series in `(t, x)` truncated at a total degree.

use num_complex::Complex;

use crate::expr::{Algebra, EvalErrorKind};
use crate::scalar::{count, lit, real, Real};

/// Coefficients `a_ij` for `i + j <= degree`, stored by total degree.
#[derive(Debug, Clone, PartialEq)]
pub struct TruncSeries<T> {
    degree: usize,
    coef: Vec<Complex<T>>,
}

#[inline]
fn idx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + i
}

impl<T: Real> TruncSeries<T> {
    pub fn zero(degree: usize) -> Self {
        Self { degree, coef: vec![real(T::zero()); idx(0, degree) + degree + 1] }
    }

    pub fn constant(degree: usize, c: Complex<T>) -> Self {
        let mut s = Self::zero(degree);
        s.coef[0] = c;
        s
    }

    /// The monomial `t`.
    pub fn t(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.coef[idx(1, 0)] = real(T::one());
        }
        s
    }

    /// The monomial `x`.
    pub fn x(degree: usize) -> Self {
        let mut s = Self::zero(degree);
        if degree >= 1 {
            s.coef[idx(0, 1)] = real(T::one());
        }
        s
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        if i + j <= self.degree {
            self.coef[idx(i, j)]
        } else {
            real(T::zero())
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        assert!(i + j <= self.degree, "coefficient ({i},{j}) beyond degree {}", self.degree);
        self.coef[idx(i, j)] = v;
    }

    /// Drops every term of total degree above `degree`.
    pub fn truncate(&self, degree: usize) -> Self {
        let degree = degree.min(self.degree);
        Self { degree, coef: self.coef[..idx(0, degree) + degree + 1].to_vec() }
    }

    /// `d/dx`; the top-degree part is lost.
    pub fn dx(&self) -> Self {
        let mut out = Self::zero(self.degree);
        for n in 0..self.degree {
            for i in 0..=n {
                let j = n - i;
                out.coef[idx(i, j)] = self.get(i, j + 1) * count::<T>(j + 1);
            }
        }
        out
    }

    /// `x d/dx`.
    pub fn euler_x(&self) -> Self {
        let mut out = self.clone();
        for n in 0..=self.degree {
            for i in 0..=n {
                out.coef[idx(i, n - i)] = out.coef[idx(i, n - i)] * count::<T>(n - i);
            }
        }
        out
    }

    /// `t d/dt`.
    pub fn euler_t(&self) -> Self {
        let mut out = self.clone();
        for n in 0..=self.degree {
            for i in 0..=n {
                out.coef[idx(i, n - i)] = out.coef[idx(i, n - i)] * count::<T>(i);
            }
        }
        out
    }

    // Total-degree Euler operator t d/dt + x d/dx.
    fn theta(&self) -> Self {
        let mut out = self.clone();
        for n in 0..=self.degree {
            for i in 0..=n {
                out.coef[idx(i, n - i)] = out.coef[idx(i, n - i)] * count::<T>(n);
            }
        }
        out
    }

    fn zip(&self, o: &Self, f: impl Fn(Complex<T>, Complex<T>) -> Complex<T>) -> Self {
        debug_assert_eq!(self.degree, o.degree);
        Self { degree: self.degree, coef: self.coef.iter().zip(&o.coef).map(|(&a, &b)| f(a, b)).collect() }
    }

    fn inverse(&self) -> Result<Self, EvalErrorKind> {
        let a0 = self.coef[0];
        if a0.norm() <= lit::<T>(1e-300).max(T::min_positive_value()) {
            return Err(EvalErrorKind::DivisionByZero);
        }
        let inv0 = a0.inv();
        let mut b = Self::zero(self.degree);
        b.coef[0] = inv0;
        for n in 1..=self.degree {
            for i in 0..=n {
                let j = n - i;
                let mut acc = real(T::zero());
                for k in 0..=i {
                    for l in 0..=j {
                        if k + l == 0 {
                            continue;
                        }
                        acc += self.coef[idx(k, l)] * b.coef[idx(i - k, j - l)];
                    }
                }
                b.coef[idx(i, j)] = -acc * inv0;
            }
        }
        Ok(b)
    }
}

impl<T: Real> Algebra<T> for TruncSeries<T> {
    type Ctx = usize;

    fn constant(degree: &usize, c: Complex<T>) -> Self {
        TruncSeries::constant(*degree, c)
    }

    fn add(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a + b)
    }

    fn sub(&self, o: &Self) -> Self {
        self.zip(o, |a, b| a - b)
    }

    fn neg(&self) -> Self {
        Self { degree: self.degree, coef: self.coef.iter().map(|&a| -a).collect() }
    }

    fn mul(&self, o: &Self) -> Self {
        let d = self.degree;
        let mut out = Self::zero(d);
        let zero = real(T::zero());
        for n1 in 0..=d {
            for i1 in 0..=n1 {
                let a = self.coef[idx(i1, n1 - i1)];
                if a == zero {
                    continue;
                }
                for n2 in 0..=(d - n1) {
                    for i2 in 0..=n2 {
                        let b = o.coef[idx(i2, n2 - i2)];
                        out.coef[idx(i1 + i2, n1 - i1 + n2 - i2)] += a * b;
                    }
                }
            }
        }
        out
    }

    fn div(&self, o: &Self) -> Result<Self, EvalErrorKind> {
        Ok(self.mul(&o.inverse()?))
    }

    // theta E = E theta A, solved degree by degree.
    fn exp(&self) -> Result<Self, EvalErrorKind> {
        let d = self.degree;
        let mut e = Self::zero(d);
        e.coef[0] = self.coef[0].exp();
        let ta = self.theta();
        for n in 1..=d {
            let inv_n = T::one() / count::<T>(n);
            for i in 0..=n {
                let j = n - i;
                let mut acc = real(T::zero());
                for k in 0..=i {
                    for l in 0..=j {
                        if k + l == 0 {
                            continue;
                        }
                        acc += ta.coef[idx(k, l)] * e.coef[idx(i - k, j - l)];
                    }
                }
                e.coef[idx(i, j)] = acc * inv_n;
            }
        }
        Ok(e)
    }

    // theta L = theta A / A.
    fn ln(&self) -> Result<Self, EvalErrorKind> {
        let a0 = self.coef[0];
        if a0.norm() <= lit::<T>(1e-300).max(T::min_positive_value()) {
            return Err(EvalErrorKind::LogOfZero);
        }
        let q = self.theta().mul(&self.inverse()?);
        let mut out = Self::zero(self.degree);
        out.coef[0] = a0.ln();
        for n in 1..=self.degree {
            let inv_n = T::one() / count::<T>(n);
            for i in 0..=n {
                out.coef[idx(i, n - i)] = q.coef[idx(i, n - i)] * inv_n;
            }
        }
        Ok(out)
    }

    fn one_like(&self) -> Self {
        Self::constant(self.degree, real(T::one()))
    }
}
