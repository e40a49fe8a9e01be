//! Right-hand sides `F(t, x, u, v)`: AST, printing, substitution,
//! symbolic differentiation and evaluation.
//!
//! Grammar (whitespace insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' integer)*
//! primary := number | number 'i' | 'i' | 'pi' | 't' | 'x' | 'u' | 'v'
//!          | ('exp' | 'log') '(' expr ')' | '(' expr ')'
//! ```

mod algebra;
mod diff;
mod parse;

use std::fmt;

use num_complex::Complex;
use thiserror::Error;

use crate::geometry::Sector;
use crate::scalar::{real, Real};
use crate::weight::WeightFn;

pub use algebra::{evaluate, Algebra, EvalError, EvalErrorKind};
pub use parse::{parse, ParseError, ParseErrorKind};

/// The four independent slots of `F`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X,
    U,
    V,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::T, Var::X, Var::U, Var::V];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::U => "u",
            Var::V => "v",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Var {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "t" => Ok(Var::T),
            "x" => Ok(Var::X),
            "u" => Ok(Var::U),
            "v" => Ok(Var::V),
            other => Err(format!("unknown variable `{other}`")),
        }
    }
}

/// Expression tree over complex constants.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr<T> {
    Const(Complex<T>),
    Var(Var),
    Neg(Box<Expr<T>>),
    Add(Box<Expr<T>>, Box<Expr<T>>),
    Sub(Box<Expr<T>>, Box<Expr<T>>),
    Mul(Box<Expr<T>>, Box<Expr<T>>),
    Div(Box<Expr<T>>, Box<Expr<T>>),
    Pow(Box<Expr<T>>, u32),
    Exp(Box<Expr<T>>),
    Log(Box<Expr<T>>),
}

impl<T: Real> Expr<T> {
    pub fn var(v: Var) -> Self {
        Expr::Var(v)
    }

    pub fn constant(c: Complex<T>) -> Self {
        Expr::Const(c)
    }

    pub fn real(x: T) -> Self {
        Expr::Const(real(x))
    }

    pub fn zero() -> Self {
        Self::real(T::zero())
    }

    pub fn one() -> Self {
        Self::real(T::one())
    }

    pub fn as_const(&self) -> Option<Complex<T>> {
        match self {
            Expr::Const(c) => Some(*c),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.as_const().is_some_and(|c| c.re == T::zero() && c.im == T::zero())
    }

    pub fn is_one(&self) -> bool {
        self.as_const().is_some_and(|c| c.re == T::one() && c.im == T::zero())
    }

    // Folding constructors. Only constants are folded; no algebraic rewriting.

    pub fn neg(a: Self) -> Self {
        match a {
            Expr::Const(c) => Expr::Const(-c),
            a => Expr::Neg(Box::new(a)),
        }
    }

    pub fn add(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x + y),
            _ if a.is_zero() => b,
            _ if b.is_zero() => a,
            _ => Expr::Add(Box::new(a), Box::new(b)),
        }
    }

    pub fn sub(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x - y),
            _ if b.is_zero() => a,
            _ if a.is_zero() => Self::neg(b),
            _ => Expr::Sub(Box::new(a), Box::new(b)),
        }
    }

    pub fn mul(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) => Expr::Const(x * y),
            _ if a.is_zero() || b.is_zero() => Self::zero(),
            _ if a.is_one() => b,
            _ if b.is_one() => a,
            _ => Expr::Mul(Box::new(a), Box::new(b)),
        }
    }

    pub fn div(a: Self, b: Self) -> Self {
        match (a.as_const(), b.as_const()) {
            (Some(x), Some(y)) if y.norm_sqr() > T::zero() => Expr::Const(x / y),
            _ if b.is_one() => a,
            _ if a.is_zero() && !b.is_zero() => Self::zero(),
            _ => Expr::Div(Box::new(a), Box::new(b)),
        }
    }

    pub fn pow(a: Self, n: u32) -> Self {
        match (&a, n) {
            (_, 0) => Self::one(),
            (_, 1) => a,
            (Expr::Const(c), n) => Expr::Const(c.powu(n)),
            _ => Expr::Pow(Box::new(a), n),
        }
    }

    pub fn exp(a: Self) -> Self {
        match a {
            Expr::Const(c) => Expr::Const(c.exp()),
            a => Expr::Exp(Box::new(a)),
        }
    }

    pub fn log(a: Self) -> Self {
        match a {
            Expr::Const(c) if c.norm_sqr() > T::zero() => Expr::Const(c.ln()),
            a => Expr::Log(Box::new(a)),
        }
    }

    /// Rebuilds the tree bottom-up through the folding constructors.
    pub fn fold(&self) -> Self {
        self.map_children(|e| e.fold())
    }

    fn map_children(&self, mut f: impl FnMut(&Self) -> Self) -> Self {
        match self {
            Expr::Const(_) | Expr::Var(_) => self.clone(),
            Expr::Neg(a) => Self::neg(f(a)),
            Expr::Add(a, b) => Self::add(f(a), f(b)),
            Expr::Sub(a, b) => Self::sub(f(a), f(b)),
            Expr::Mul(a, b) => Self::mul(f(a), f(b)),
            Expr::Div(a, b) => Self::div(f(a), f(b)),
            Expr::Pow(a, n) => Self::pow(f(a), *n),
            Expr::Exp(a) => Self::exp(f(a)),
            Expr::Log(a) => Self::log(f(a)),
        }
    }

    /// Replaces every occurrence of `var` by `with`, folding constants.
    pub fn subst(&self, var: Var, with: &Self) -> Self {
        match self {
            Expr::Var(v) if *v == var => with.clone(),
            _ => self.map_children(|e| e.subst(var, with)),
        }
    }

    /// `self / x^k`, cancelled term by term when every term carries the
    /// factor; otherwise the plain quotient.
    pub fn div_x_pow(&self, k: u32) -> Self {
        self.cancel_x(k)
            .unwrap_or_else(|| Self::div(self.clone(), Self::pow(Self::var(Var::X), k)))
    }

    fn cancel_x(&self, k: u32) -> Option<Self> {
        if k == 0 || self.is_zero() {
            return Some(self.clone());
        }
        match self {
            Expr::Var(Var::X) if k == 1 => Some(Self::one()),
            Expr::Pow(a, n) if **a == Expr::Var(Var::X) && *n >= k => Some(Self::pow(Self::var(Var::X), n - k)),
            Expr::Neg(a) => a.cancel_x(k).map(Self::neg),
            Expr::Add(a, b) => Some(Self::add(a.cancel_x(k)?, b.cancel_x(k)?)),
            Expr::Sub(a, b) => Some(Self::sub(a.cancel_x(k)?, b.cancel_x(k)?)),
            Expr::Mul(a, b) => {
                if let Some(a) = a.cancel_x(k) {
                    return Some(Self::mul(a, (**b).clone()));
                }
                if let Some(b) = b.cancel_x(k) {
                    return Some(Self::mul((**a).clone(), b));
                }
                (1..k).find_map(|i| Some(Self::mul(a.cancel_x(i)?, b.cancel_x(k - i)?)))
            }
            Expr::Div(a, b) if !b.depends_on(Var::X) => a.cancel_x(k).map(|a| Self::div(a, (**b).clone())),
            _ => None,
        }
    }

    /// Substitutes constants for the given variables.
    pub fn bind(&self, values: &[(Var, Complex<T>)]) -> Self {
        values
            .iter()
            .fold(self.clone(), |e, &(v, c)| e.subst(v, &Expr::Const(c)))
    }

    pub fn depends_on(&self, var: Var) -> bool {
        match self {
            Expr::Const(_) => false,
            Expr::Var(v) => *v == var,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) => a.depends_on(var),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.depends_on(var) || b.depends_on(var)
            }
        }
    }

    /// Top-level additive terms (a `-` contributes its right operand).
    pub fn summands(&self) -> Vec<&Self> {
        match self {
            Expr::Add(a, b) | Expr::Sub(a, b) => {
                let mut out = a.summands();
                out.extend(b.summands());
                out
            }
            e => vec![e],
        }
    }

    pub fn node_count(&self) -> usize {
        match self {
            Expr::Const(_) | Expr::Var(_) => 1,
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Exp(a) | Expr::Log(a) => 1 + a.node_count(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                1 + a.node_count() + b.node_count()
            }
        }
    }

    /// Complex value at `(t, x, u, v)`.
    pub fn eval(&self, t: T, x: Complex<T>, u: Complex<T>, v: Complex<T>) -> Result<Complex<T>, EvalError> {
        evaluate(self, &(), &[real(t), x, u, v])
    }

    /// Complex value with a complex `t` (used when `t` appears only
    /// polynomially and a Taylor probe is needed).
    pub fn eval_c(&self, vars: [Complex<T>; 4]) -> Result<Complex<T>, EvalError> {
        evaluate(self, &(), &vars)
    }

    /// Exact partial derivative with respect to `var`.
    pub fn diff(&self, var: Var) -> Self {
        diff::diff(self, var)
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Pow(..) => 4,
            Expr::Const(c) if c.im != T::zero() || c.re < T::zero() => 1,
            _ => 5,
        }
    }

    fn write_child(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        if self.precedence() < min {
            write!(f, "({self})")
        } else {
            write!(f, "{self}")
        }
    }
}

impl<T: Real> fmt::Display for Expr<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) => {
                // adding +0 turns -0 into 0
                let c = Complex::new(c.re + T::zero(), c.im + T::zero());
                if c.im == T::zero() {
                    write!(f, "{:?}", c.re)
                } else if c.re == T::zero() {
                    write!(f, "{:?}i", c.im)
                } else if c.im < T::zero() {
                    write!(f, "{:?}-{:?}i", c.re, -c.im)
                } else {
                    write!(f, "{:?}+{:?}i", c.re, c.im)
                }
            }
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => {
                f.write_str("-")?;
                a.write_child(f, 4)
            }
            Expr::Add(a, b) => {
                a.write_child(f, 1)?;
                f.write_str(" + ")?;
                b.write_child(f, 2)
            }
            Expr::Sub(a, b) => {
                a.write_child(f, 1)?;
                f.write_str(" - ")?;
                b.write_child(f, 2)
            }
            Expr::Mul(a, b) => {
                a.write_child(f, 2)?;
                f.write_str("*")?;
                b.write_child(f, 3)
            }
            Expr::Div(a, b) => {
                a.write_child(f, 2)?;
                f.write_str("/")?;
                b.write_child(f, 4)
            }
            Expr::Pow(a, n) => {
                a.write_child(f, 5)?;
                write!(f, "^{n}")
            }
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Log(a) => write!(f, "log({a})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecError {
    #[error("domain parameter {name} must be positive, got {value}")]
    NonPositive { name: &'static str, value: f64 },
}

/// A singular equation `t u_t = F(t, x, u, v)` together with its domain.
///
/// When `euler_form` is set the slot `v` stands for `x u_x` instead of `u_x`.
#[derive(Debug, Clone)]
pub struct PdeSpec<T> {
    pub rhs: Expr<T>,
    pub euler_form: bool,
    pub weight: WeightFn<T>,
    pub t0: T,
    pub r0: T,
    pub rho0: T,
    pub sector: Option<Sector<T>>,
}

impl<T: Real> PdeSpec<T> {
    pub fn new(rhs: Expr<T>, euler_form: bool, weight: WeightFn<T>, t0: T, r0: T, rho0: T) -> Result<Self, SpecError> {
        for (name, value) in [("T0", t0), ("R0", r0), ("rho0", rho0)] {
            if !(value > T::zero()) {
                return Err(SpecError::NonPositive { name, value: crate::scalar::to_f64(value) });
            }
        }
        Ok(Self { rhs, euler_form, weight, t0, r0, rho0, sector: None })
    }

    /// Convenience constructor with `mu(t) = t` and unit-scale domain.
    pub fn simple(rhs: Expr<T>, euler_form: bool) -> Self {
        let one = T::one();
        let half = crate::scalar::lit(0.5);
        Self::new(rhs, euler_form, WeightFn::identity(half), half, one, one).expect("positive defaults")
    }

    pub fn with_sector(mut self, sector: Sector<T>) -> Self {
        self.sector = Some(sector);
        self
    }

    /// `F` evaluated against a solution value `u` and its x-derivative `ux`,
    /// inserting `x ux` into the `v` slot for Euler-form equations.
    pub fn rhs_on(&self, t: T, x: Complex<T>, u: Complex<T>, ux: Complex<T>) -> Result<Complex<T>, EvalError> {
        let v = if self.euler_form { x * ux } else { ux };
        self.rhs.eval(t, x, u, v)
    }
}
