//! Case 1/2/3 classification from the `(u, v)`-linear jet of `F` at the
//! origin, standing-hypothesis checks and the Case 3 rotation.

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::expr::{EvalError, Expr, PdeSpec, Var};
use crate::geometry::Disc;
use crate::grid::{disc_points, Grid};
use crate::scalar::{c_to_pair, count, lit, real, to_f64, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClassifyError {
    #[error("x_order must be at least 2")]
    BadOrder,
    #[error("indeterminate classification: x^{index} coefficient has size {magnitude:e}, between tol/10 and tol")]
    Indeterminate { index: usize, magnitude: f64 },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("rotation needs a Case 3 classification")]
    NotCase3,
    #[error("c(0,0) vanishes, contradicting Case 3")]
    ZeroC00,
}

/// Which factorization of `dF/dv(t,x,0,0)` was matched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// `b(t) + x^{p+1} c(t,x)`, `v = u_x`.
    XPowPPlusOne,
    /// `beta(t,x) + x^p c(t,x)` multiplying `v = x u_x`.
    EulerXPowP,
}

#[derive(Debug, Clone, Copy)]
pub struct ClassifyOptions<T> {
    pub x_order: usize,
    pub t_samples: usize,
    pub tol: T,
}

impl<T: Real> Default for ClassifyOptions<T> {
    fn default() -> Self {
        Self { x_order: 6, t_samples: 16, tol: lit(1e-9) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HypothesisFlags {
    pub re_lambda00_negative: bool,
    /// Case 2 only: sampled `Re c <= 0`.
    pub re_c_nonpositive: Option<bool>,
    /// Case 3 only: `c(0,0)` is a negative real.
    pub c00_negative: Option<bool>,
}

#[derive(Debug, Clone)]
pub struct CaseClass<T> {
    pub case_id: u8,
    /// `None` in Case 1.
    pub p: Option<u32>,
    pub convention: Convention,
    pub supported_shape: bool,
    /// `dF/dv(t,x,0,0)`.
    pub g: Expr<T>,
    /// `g(t,0)` (non-Euler) or `beta(t,x)` (Euler).
    pub b: Expr<T>,
    /// `c(t,x)` with the power of `x` removed; zero in Case 1.
    pub c: Expr<T>,
    /// `dF/du(t,x,0,0)`.
    pub lambda: Expr<T>,
    pub lambda00: Complex<T>,
    pub c00: Option<Complex<T>>,
    /// Taylor coefficients `c_k(t)` of `c(t,x)` in `x`, used near `x = 0`.
    c_taylor: Vec<Expr<T>>,
    /// Max over sampled `t` of `|g_j(t)|` (non-Euler) or `|g_j(0)|` (Euler).
    pub coefficient_sizes: Vec<T>,
    pub flags: HypothesisFlags,
}

/// Evaluates at `t`, retrying at a tiny positive time if `t = 0` is singular.
fn eval_at<T: Real>(e: &Expr<T>, t: T, x: Complex<T>) -> Result<Complex<T>, EvalError> {
    let zero = real(T::zero());
    match e.eval(t, x, zero, zero) {
        Ok(v) if v.re.is_finite() && v.im.is_finite() => Ok(v),
        Err(err) if t > T::zero() => Err(err),
        other if t > T::zero() => other,
        _ => e.eval(t_floor(), x, zero, zero),
    }
}

fn t_floor<T: Real>() -> T {
    T::min_positive_value().sqrt()
}

fn factorial<T: Real>(j: usize) -> T {
    (1..=j).fold(T::one(), |acc, k| acc * count::<T>(k))
}

/// `[d^j/dx^j g / j!]` at `x = 0` for `j = 0..=order`, as expressions in `t`.
pub fn taylor_in_x<T: Real>(g: &Expr<T>, order: usize) -> Vec<Expr<T>> {
    let zero = Expr::zero();
    let mut out = Vec::with_capacity(order + 1);
    let mut d = g.clone();
    for j in 0..=order {
        let at0 = d.subst(Var::X, &zero);
        out.push(Expr::div(at0, Expr::real(factorial::<T>(j))));
        if j < order {
            d = d.diff(Var::X);
        }
    }
    out
}

impl<T: Real> CaseClass<T> {
    pub fn lambda_at(&self, t: T, x: Complex<T>) -> Result<Complex<T>, EvalError> {
        eval_at(&self.lambda, t, x)
    }

    pub fn b_at(&self, t: T, x: Complex<T>) -> Result<Complex<T>, EvalError> {
        eval_at(&self.b, t, x)
    }

    /// `c(t,x)`; near `x = 0` the Taylor polynomial replaces the quotient.
    pub fn c_at(&self, t: T, x: Complex<T>) -> Result<Complex<T>, EvalError> {
        if self.case_id == 1 {
            return Ok(real(T::zero()));
        }
        if x.norm() < lit(1e-3) {
            let mut acc = real(T::zero());
            for coef in self.c_taylor.iter().rev() {
                acc = acc * x + eval_at(coef, t, real(T::zero()))?;
            }
            return Ok(acc);
        }
        eval_at(&self.c, t, x)
    }

    pub fn summary(&self) -> CaseSummary {
        CaseSummary {
            case_id: self.case_id,
            p: self.p,
            convention: self.convention,
            supported_shape: self.supported_shape,
            lambda00: c_to_pair(self.lambda00),
            c00: self.c00.map(c_to_pair),
            b: self.b.to_string(),
            c: self.c.to_string(),
            lambda: self.lambda.to_string(),
            coefficient_sizes: self.coefficient_sizes.iter().map(|&v| to_f64(v)).collect(),
            flags: self.flags,
        }
    }
}

/// Serializable view of a [`CaseClass`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CaseSummary {
    pub case_id: u8,
    pub p: Option<u32>,
    pub convention: Convention,
    pub supported_shape: bool,
    pub lambda00: [f64; 2],
    pub c00: Option<[f64; 2]>,
    pub b: String,
    pub c: String,
    pub lambda: String,
    pub coefficient_sizes: Vec<f64>,
    pub flags: HypothesisFlags,
}

fn sample_times<T: Real>(t0: T, n: usize) -> Vec<T> {
    let n = n.max(2);
    (0..n).map(|k| t0 * count::<T>(k) / count::<T>(n - 1)).collect()
}

fn pick_index<T: Real>(sizes: &[T], start: usize, tol: T) -> Result<Option<usize>, ClassifyError> {
    for (j, &m) in sizes.iter().enumerate().skip(start) {
        if !m.is_finite() || m > tol {
            return Ok(Some(j));
        }
        if m >= tol / lit(10.0) {
            return Err(ClassifyError::Indeterminate { index: j, magnitude: to_f64(m) });
        }
    }
    Ok(None)
}

/// Classifies `t u_t = F` by the vanishing pattern of `dF/dv(t,x,0,0)` in `x`.
pub fn classify<T: Real>(pde: &PdeSpec<T>, opts: &ClassifyOptions<T>) -> Result<CaseClass<T>, ClassifyError> {
    if opts.x_order < 2 {
        return Err(ClassifyError::BadOrder);
    }
    let zero = Expr::zero();
    let at_origin = |e: Expr<T>| e.subst(Var::U, &zero).subst(Var::V, &zero);
    let g = at_origin(pde.rhs.diff(Var::V));
    let lambda = at_origin(pde.rhs.diff(Var::U));
    let lambda00 = eval_at(&lambda, T::zero(), real(T::zero()))?;
    let coefs = taylor_in_x(&g, opts.x_order);
    let times = sample_times(pde.t0, opts.t_samples);
    let tol = opts.tol;

    let (case_id, p, convention, b, c, c_taylor, sizes) = if !pde.euler_form {
        let mut sizes = Vec::with_capacity(coefs.len());
        for coef in &coefs {
            let mut m = T::zero();
            for &t in &times {
                let v = eval_at(coef, t, real(T::zero()))?.norm();
                m = if v.is_finite() { m.max(v) } else { T::infinity() };
            }
            sizes.push(m);
        }
        let b = coefs[0].clone();
        match pick_index(&sizes, 1, tol)? {
            None => (1, None, Convention::XPowPPlusOne, b, Expr::zero(), Vec::new(), sizes),
            Some(j) => {
                let head = coefs[..j]
                    .iter()
                    .enumerate()
                    .fold(Expr::zero(), |acc, (k, ck)| Expr::add(acc, Expr::mul(ck.clone(), Expr::pow(Expr::var(Var::X), k as u32))));
                let c = Expr::sub(g.clone(), head).div_x_pow(j as u32);
                let case_id = if j == 1 { 2 } else { 3 };
                (case_id, Some(j as u32 - 1), Convention::XPowPPlusOne, b, c, coefs[j..].to_vec(), sizes)
            }
        }
    } else {
        let t_base = match g.eval(T::zero(), real(lit(0.05)), real(T::zero()), real(T::zero())) {
            Ok(v) if v.re.is_finite() && v.im.is_finite() => T::zero(),
            _ => t_floor(),
        };
        let tb = Expr::real(t_base);
        let mut sizes = Vec::with_capacity(coefs.len());
        for coef in &coefs {
            sizes.push(eval_at(coef, t_base, real(T::zero()))?.norm());
        }
        let g0 = g.subst(Var::T, &tb);
        match pick_index(&sizes, 0, tol)? {
            None => (1, None, Convention::EulerXPowP, g.clone(), Expr::zero(), Vec::new(), sizes),
            Some(j) => {
                let c = g0.div_x_pow(j as u32);
                let beta = if g.depends_on(Var::T) { Expr::sub(g.clone(), g0) } else { Expr::zero() };
                let c_taylor = coefs[j..].iter().map(|e| e.subst(Var::T, &tb)).collect();
                let case_id = if j == 0 { 2 } else { 3 };
                (case_id, Some(j as u32), Convention::EulerXPowP, beta, c, c_taylor, sizes)
            }
        }
    };

    let mut cc = CaseClass {
        case_id,
        p,
        convention,
        supported_shape: !(case_id == 3 && !pde.euler_form),
        g,
        b,
        c,
        lambda,
        lambda00,
        c00: None,
        c_taylor,
        coefficient_sizes: sizes,
        flags: HypothesisFlags { re_lambda00_negative: lambda00.re < T::zero(), re_c_nonpositive: None, c00_negative: None },
    };
    if case_id >= 2 {
        let c00 = cc.c_at(T::zero(), real(T::zero()))?;
        cc.c00 = Some(c00);
        if case_id == 2 {
            let disc = Disc::new(pde.r0).expect("positive radius");
            let pts = disc_points(disc, 4, 16, lit(1e-3));
            let slack = lit::<T>(1e-12);
            let mut ok = true;
            for &t in &times {
                for &x in &pts {
                    let c = cc.c_at(t, x)?;
                    ok &= c.re <= slack;
                }
            }
            cc.flags.re_c_nonpositive = Some(ok);
        } else {
            let scale = c00.norm().max(T::one());
            cc.flags.c00_negative = Some(c00.re < T::zero() && c00.im.abs() <= tol * scale);
        }
    }
    Ok(cc)
}

/// Ratios behind assumption A2 along descending grid times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct A2Report {
    pub times: Vec<f64>,
    /// `sup_x |F(t,x,0,0)| / mu(t)`.
    pub forcing_ratio: Vec<f64>,
    /// `|dF/dv(t,0,0,0)| / mu(t)`, or `sup_x |beta(t,x)| / mu(t)` in Euler form.
    pub drift_ratio: Vec<f64>,
    pub forcing_bounded: bool,
    pub drift_bounded: bool,
}

// Unbounded when the smallest-time value exceeds the value one decade up by
// more than 10% while increasing monotonically across that decade.
fn bounded_trend(times: &[f64], ratio: &[f64]) -> bool {
    if ratio.iter().any(|r| !r.is_finite()) {
        return false;
    }
    let Some(&t_last) = times.last() else { return true };
    let start = times.iter().position(|&t| t <= 10.0 * t_last).unwrap_or(0);
    let window = &ratio[start.saturating_sub(1)..];
    if window.len() < 2 {
        return true;
    }
    let first = window[0];
    let last = *window.last().unwrap();
    let monotone = window.windows(2).all(|w| w[1] >= w[0]);
    !(monotone && last > 1.1 * first + 1e-12)
}

pub fn check_a2<T: Real>(pde: &PdeSpec<T>, cc: &CaseClass<T>, grid: &Grid<T>) -> Result<A2Report, ClassifyError> {
    let zero = real(T::zero());
    let forcing = pde.rhs.subst(Var::U, &Expr::zero()).subst(Var::V, &Expr::zero());
    let times = grid.times_descending();
    let mut out = A2Report {
        times: Vec::new(),
        forcing_ratio: Vec::new(),
        drift_ratio: Vec::new(),
        forcing_bounded: true,
        drift_bounded: true,
    };
    for &t in &times {
        let mu = pde.weight.eval(t.min(pde.weight.t0())).unwrap_or(T::nan());
        let mut sup_f = T::zero();
        for &x in &grid.points {
            sup_f = sup_f.max(forcing.eval(t, x, zero, zero)?.norm());
        }
        let drift = if pde.euler_form {
            let mut s = T::zero();
            for &x in &grid.points {
                s = s.max(cc.b.eval(t, x, zero, zero)?.norm());
            }
            s
        } else {
            cc.g.eval(t, zero, zero, zero)?.norm()
        };
        out.times.push(to_f64(t));
        out.forcing_ratio.push(to_f64(sup_f / mu));
        out.drift_ratio.push(to_f64(drift / mu));
    }
    out.forcing_bounded = bounded_trend(&out.times, &out.forcing_ratio);
    out.drift_bounded = bounded_trend(&out.times, &out.drift_ratio);
    Ok(out)
}

/// Replaces `x` by `e^{i theta} x` so that the new `c(0,0)` is negative real.
pub fn rotate_x<T: Real>(pde: &PdeSpec<T>, cc: &CaseClass<T>) -> Result<(PdeSpec<T>, T), ClassifyError> {
    if cc.case_id != 3 {
        return Err(ClassifyError::NotCase3);
    }
    let c00 = cc.c00.ok_or(ClassifyError::ZeroC00)?;
    if c00.norm() == T::zero() {
        return Err(ClassifyError::ZeroC00);
    }
    let p = cc.p.unwrap_or(1).max(1);
    let theta = (T::PI() - c00.arg()) / count::<T>(p as usize);
    let rot = Complex::from_polar(T::one(), theta);
    let mut rhs = pde.rhs.subst(Var::X, &Expr::mul(Expr::constant(rot), Expr::var(Var::X)));
    if !pde.euler_form {
        rhs = rhs.subst(Var::V, &Expr::mul(Expr::constant(rot.conj()), Expr::var(Var::V)));
    }
    let mut out = pde.clone();
    out.rhs = rhs;
    Ok((out, theta))
}
