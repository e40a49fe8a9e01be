//! Truncated formal solution `u0(t,x) = sum_{i>=1, j>=0} u_ij t^i x^j`.
//!
//! Coefficients are fixed in order of total degree `i + j` and, inside a
//! degree, by increasing `i`. Matching the `t^i x^j` coefficient of
//! `t u_t = F(t,x,u,v)` gives
//!
//! ```text
//! (i - lambda(0,0) - j c(0,0)) u_ij = [F(t,x,u,v)]_ij  with u_ij set to 0
//! ```
//!
//! where `c(0,0) = 0` in Case 1. The right side is obtained by evaluating
//! `F` over [`TruncSeries`], so no sampling is involved.

pub mod trunc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::classify::CaseClass;
use crate::expr::{evaluate, EvalError, PdeSpec};
use crate::grid::Grid;
use crate::scalar::{count, lit, real, to_f64, Real};

pub use trunc::TruncSeries;

pub const SCHEMA: &str = "series-v1";

/// A denominator `i - lambda(0,0) - j c(0,0)` that is small.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Resonance {
    pub i: usize,
    pub j: usize,
    pub denominator: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series are built only in Cases 1 and 2 (got Case {0})")]
    UnsupportedCase(u8),
    #[error("not of Briot-Bouquet shape: {0}")]
    Shape(String),
    #[error("resonance at {}", fmt_res(.0))]
    Resonance(Vec<Resonance>),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

fn fmt_res(r: &[Resonance]) -> String {
    r.iter().map(|r| format!("({},{})", r.i, r.j)).collect::<Vec<_>>().join(", ")
}

#[derive(Debug, Clone, Copy)]
pub struct BuildOptions<T> {
    pub m: usize,
    pub n: usize,
    pub res_tol: T,
    /// Upper end of the near-resonance warning band.
    pub warn_tol: T,
}

impl<T: Real> BuildOptions<T> {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n, res_tol: lit(1e-8), warn_tol: lit(1e-3) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DoubleSeries<T> {
    m: usize,
    n: usize,
    euler_form: bool,
    /// Rows `i = 1..=m`, columns `j = 0..=n`.
    coeffs: Vec<Complex<T>>,
    pub warnings: Vec<Resonance>,
}

impl<T: Real> DoubleSeries<T> {
    pub fn zero(m: usize, n: usize, euler_form: bool) -> Self {
        Self { m, n, euler_form, coeffs: vec![real(T::zero()); m * (n + 1)], warnings: Vec::new() }
    }

    pub fn orders(&self) -> (usize, usize) {
        (self.m, self.n)
    }

    pub fn euler_form(&self) -> bool {
        self.euler_form
    }

    /// `u_ij`; zero for `i = 0` and outside the table.
    pub fn get(&self, i: usize, j: usize) -> Complex<T> {
        if i == 0 || i > self.m || j > self.n {
            real(T::zero())
        } else {
            self.coeffs[(i - 1) * (self.n + 1) + j]
        }
    }

    pub fn set(&mut self, i: usize, j: usize, v: Complex<T>) {
        assert!(i >= 1 && i <= self.m && j <= self.n, "({i},{j}) outside the table");
        self.coeffs[(i - 1) * (self.n + 1) + j] = v;
    }

    /// Iterates `(i, j, u_ij)` row-major.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, Complex<T>)> + '_ {
        let w = self.n + 1;
        self.coeffs.iter().enumerate().map(move |(k, &c)| (k / w + 1, k % w, c))
    }

    fn horner(&self, t: T, x: Complex<T>, dj: bool, ti: bool) -> Complex<T> {
        let mut acc = real(T::zero());
        for i in (1..=self.m).rev() {
            let mut row = real(T::zero());
            for j in (0..=self.n).rev() {
                let mut c = self.get(i, j);
                if dj {
                    c *= count::<T>(j);
                }
                if ti {
                    c *= count::<T>(i);
                }
                row = row * x + c;
            }
            acc = (acc + row) * t;
        }
        acc
    }

    /// `u0(t,x)`, Horner in `x` then `t`.
    pub fn eval(&self, t: T, x: Complex<T>) -> Complex<T> {
        self.horner(t, x, false, false)
    }

    /// `x du0/dx`.
    pub fn eval_euler_x(&self, t: T, x: Complex<T>) -> Complex<T> {
        self.horner(t, x, true, false)
    }

    /// `du0/dx`.
    pub fn eval_dx(&self, t: T, x: Complex<T>) -> Complex<T> {
        let mut acc = real(T::zero());
        for i in (1..=self.m).rev() {
            let mut row = real(T::zero());
            for j in (1..=self.n).rev() {
                row = row * x + self.get(i, j) * count::<T>(j);
            }
            acc = (acc + row) * t;
        }
        acc
    }

    /// `t du0/dt`.
    pub fn eval_euler_t(&self, t: T, x: Complex<T>) -> Complex<T> {
        self.horner(t, x, false, true)
    }

    pub fn to_doc(&self) -> SeriesDoc {
        SeriesDoc {
            schema: SCHEMA.to_string(),
            m: self.m,
            n: self.n,
            euler_form: self.euler_form,
            coeffs: self.coeffs.iter().map(|c| [to_f64(c.re), to_f64(c.im)]).collect(),
            warnings: self.warnings.clone(),
        }
    }

    pub fn from_doc(doc: &SeriesDoc) -> Result<Self, String> {
        if doc.schema != SCHEMA {
            return Err(format!("expected schema {SCHEMA}, got {}", doc.schema));
        }
        if doc.coeffs.len() != doc.m * (doc.n + 1) {
            return Err(format!("expected {} coefficients, got {}", doc.m * (doc.n + 1), doc.coeffs.len()));
        }
        Ok(Self {
            m: doc.m,
            n: doc.n,
            euler_form: doc.euler_form,
            coeffs: doc.coeffs.iter().map(|&[re, im]| Complex::new(lit(re), lit(im))).collect(),
            warnings: doc.warnings.clone(),
        })
    }
}

/// Serialized form; `coeffs` holds `[re, im]` pairs row-major over
/// `i = 1..=M`, `j = 0..=N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeriesDoc {
    pub schema: String,
    #[serde(rename = "M")]
    pub m: usize,
    #[serde(rename = "N")]
    pub n: usize,
    pub euler_form: bool,
    pub coeffs: Vec<[f64; 2]>,
    #[serde(default)]
    pub warnings: Vec<Resonance>,
}

fn required(m: usize, n: usize) -> impl Iterator<Item = (usize, usize)> {
    (1..=m + n).flat_map(move |deg| (1..=deg.min(m)).map(move |i| (i, deg - i)))
}

/// Every `i - lambda00 - j c0` with modulus below `tol` over the required
/// index set `1 <= i <= M`, `i + j <= M + N`.
pub fn resonances<T: Real>(lambda00: Complex<T>, c0: Complex<T>, m: usize, n: usize, tol: T) -> Vec<Resonance> {
    required(m, n)
        .filter_map(|(i, j)| {
            let d = (real::<T>(count(i)) - lambda00 - c0 * count::<T>(j)).norm();
            (d < tol).then(|| Resonance { i, j, denominator: to_f64(d) })
        })
        .collect()
}

fn series_vars<T: Real>(u: &TruncSeries<T>, euler: bool) -> [TruncSeries<T>; 4] {
    let d = u.degree();
    let v = if euler { u.euler_x() } else { u.dx() };
    [TruncSeries::t(d), TruncSeries::x(d), u.clone(), v]
}

/// Builds the formal solution up to `t^M x^N`.
pub fn build_solution<T: Real>(pde: &PdeSpec<T>, cc: &CaseClass<T>, opts: &BuildOptions<T>) -> Result<DoubleSeries<T>, SeriesError> {
    if cc.case_id > 2 {
        return Err(SeriesError::UnsupportedCase(cc.case_id));
    }
    let (m, n) = (opts.m, opts.n);
    let deg = m + n;
    let euler = pde.euler_form;
    let shape_tol = lit::<T>(1e-12);

    let base = evaluate(&pde.rhs, &deg, &series_vars(&TruncSeries::zero(deg), euler))?;
    for j in 0..=deg {
        if base.get(0, j).norm() > shape_tol {
            return Err(SeriesError::Shape(format!("F(0,x,0,0) has a nonzero x^{j} coefficient")));
        }
    }
    let g00 = cc.g.eval(T::zero(), real(T::zero()), real(T::zero()), real(T::zero()))?;
    if !euler && g00.norm() > shape_tol {
        return Err(SeriesError::Shape("dF/dv(0,0,0,0) must vanish".into()));
    }

    let c0 = if cc.case_id == 2 { cc.c00.unwrap_or(real(T::zero())) } else { real(T::zero()) };
    let lambda00 = cc.lambda00;
    let bad = resonances(lambda00, c0, m, n, opts.res_tol);
    if !bad.is_empty() {
        return Err(SeriesError::Resonance(bad));
    }

    let mut out = DoubleSeries::zero(m, n, euler);
    out.warnings = resonances(lambda00, c0, m, n, opts.warn_tol);
    let mut u = TruncSeries::zero(deg);
    for d in 1..=deg {
        // coefficients of total degree d only need the series through degree d
        for i in 1..=d.min(m) {
            let j = d - i;
            let ud = u.truncate(d);
            let f = evaluate(&pde.rhs, &d, &series_vars(&ud, euler))?;
            let denom = real::<T>(count(i)) - lambda00 - c0 * count::<T>(j);
            let value = f.get(i, j) / denom;
            u.set(i, j, value);
            if j <= n {
                out.set(i, j, value);
            }
        }
    }
    Ok(out)
}

/// Pointwise `t u_t - F(t, x, u, v)` for the series.
pub fn residual_at<T: Real>(pde: &PdeSpec<T>, s: &DoubleSeries<T>, t: T, x: Complex<T>) -> Result<Complex<T>, EvalError> {
    let u = s.eval(t, x);
    let v = if pde.euler_form { s.eval_euler_x(t, x) } else { s.eval_dx(t, x) };
    Ok(s.eval_euler_t(t, x) - pde.rhs.eval(t, x, u, v)?)
}

/// Maximum residual modulus over the grid.
pub fn residual<T: Real>(pde: &PdeSpec<T>, s: &DoubleSeries<T>, grid: &Grid<T>) -> Result<T, EvalError> {
    let mut worst = T::zero();
    for &t in &grid.times {
        for &x in &grid.points {
            let r = residual_at(pde, s, t, x)?.norm();
            worst = if r.is_finite() { worst.max(r) } else { T::infinity() };
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests;
