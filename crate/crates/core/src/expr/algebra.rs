use num_complex::Complex;
use thiserror::Error;

use super::Expr;
use crate::scalar::{lit, real, Real};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogOfZero,
    NonFinite,
}

impl std::fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogOfZero => "log of zero",
            EvalErrorKind::NonFinite => "non-finite value",
        })
    }
}

/// Evaluation failure, located by the printed offending subexpression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} in `{node}`")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub node: String,
}

/// Anything an [`Expr`] can be evaluated into.
///
/// Implemented for complex scalars and for truncated bivariate series.
pub trait Algebra<T: Real>: Sized + Clone {
    type Ctx;

    fn constant(ctx: &Self::Ctx, c: Complex<T>) -> Self;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, other: &Self) -> Result<Self, EvalErrorKind>;
    fn exp(&self) -> Result<Self, EvalErrorKind>;
    fn ln(&self) -> Result<Self, EvalErrorKind>;

    fn powu(&self, n: u32) -> Self {
        let mut acc: Option<Self> = None;
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = Some(match acc {
                    Some(a) => a.mul(&base),
                    None => base.clone(),
                });
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc.unwrap_or_else(|| self.one_like())
    }

    /// Multiplicative identity compatible with `self`.
    fn one_like(&self) -> Self;
}

fn tiny<T: Real>() -> T {
    lit::<T>(1e-300).max(T::min_positive_value())
}

impl<T: Real> Algebra<T> for Complex<T> {
    type Ctx = ();

    fn constant(_: &(), c: Complex<T>) -> Self {
        c
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn div(&self, o: &Self) -> Result<Self, EvalErrorKind> {
        if o.norm() < tiny::<T>() {
            return Err(EvalErrorKind::DivisionByZero);
        }
        Ok(self / o)
    }
    fn exp(&self) -> Result<Self, EvalErrorKind> {
        Ok(Complex::exp(*self))
    }
    fn ln(&self) -> Result<Self, EvalErrorKind> {
        if self.norm() < tiny::<T>() {
            return Err(EvalErrorKind::LogOfZero);
        }
        Ok(Complex::ln(*self))
    }
    fn powu(&self, n: u32) -> Self {
        Complex::powu(self, n)
    }
    fn one_like(&self) -> Self {
        real(T::one())
    }
}

/// Structural evaluation of `e` with variable values `vars` indexed by
/// [`super::Var::index`].
pub fn evaluate<T: Real, A: Algebra<T>>(e: &Expr<T>, ctx: &A::Ctx, vars: &[A; 4]) -> Result<A, EvalError> {
    let fail = |kind| EvalError { kind, node: e.to_string() };
    Ok(match e {
        Expr::Const(c) => A::constant(ctx, *c),
        Expr::Var(v) => vars[v.index()].clone(),
        Expr::Neg(a) => evaluate(a, ctx, vars)?.neg(),
        Expr::Add(a, b) => evaluate(a, ctx, vars)?.add(&evaluate(b, ctx, vars)?),
        Expr::Sub(a, b) => evaluate(a, ctx, vars)?.sub(&evaluate(b, ctx, vars)?),
        Expr::Mul(a, b) => evaluate(a, ctx, vars)?.mul(&evaluate(b, ctx, vars)?),
        Expr::Div(a, b) => evaluate(a, ctx, vars)?.div(&evaluate(b, ctx, vars)?).map_err(fail)?,
        Expr::Pow(a, n) => evaluate(a, ctx, vars)?.powu(*n),
        Expr::Exp(a) => evaluate(a, ctx, vars)?.exp().map_err(fail)?,
        Expr::Log(a) => evaluate(a, ctx, vars)?.ln().map_err(fail)?,
    })
}
