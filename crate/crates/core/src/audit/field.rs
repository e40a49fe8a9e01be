use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::expr::{Expr, Var};
use crate::quadrature::cauchy_derivative;
use crate::scalar::{lit, real, Real};
use crate::series::DoubleSeries;

pub type CFn<T> = Arc<dyn Fn(T, Complex<T>) -> Complex<T> + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    /// Closed form with symbolic derivatives.
    Analytic,
    /// Truncated double series.
    Series,
    /// Black-box values, `u_x` by Cauchy circles and `u_t` by central differences.
    Cauchy,
}

/// A candidate solution `u(t,x)` with its derivatives.
#[derive(Clone)]
pub struct SolutionField<T> {
    pub name: String,
    pub provenance: Provenance,
    pub expr: Option<Expr<T>>,
    u: CFn<T>,
    ux: CFn<T>,
    ut: CFn<T>,
}

impl<T: Real> std::fmt::Debug for SolutionField<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SolutionField").field("name", &self.name).field("provenance", &self.provenance).finish_non_exhaustive()
    }
}

fn nan<T: Real>() -> Complex<T> {
    Complex::new(T::nan(), T::nan())
}

fn eval_fn<T: Real>(e: Expr<T>) -> CFn<T> {
    let z = real(T::zero());
    Arc::new(move |t, x| e.eval(t, x, z, z).unwrap_or_else(|_| nan()))
}

/// Radius of the circle used for `d/dx`, kept off `x = 0` when `x != 0` so
/// sector fields stay inside their sector.
pub(crate) fn cauchy_radius<T: Real>(x: Complex<T>) -> T {
    let cap = lit::<T>(1e-3);
    if x.norm() > T::zero() {
        cap.min(x.norm() * lit(0.5))
    } else {
        cap
    }
}

impl<T: Real> SolutionField<T> {
    pub fn from_expr(name: impl Into<String>, e: Expr<T>) -> Self {
        Self {
            name: name.into(),
            provenance: Provenance::Analytic,
            u: eval_fn(e.clone()),
            ux: eval_fn(e.diff(Var::X)),
            ut: eval_fn(e.diff(Var::T)),
            expr: Some(e),
        }
    }

    pub fn zero() -> Self {
        Self::from_expr("zero", Expr::zero())
    }

    pub fn from_series(name: impl Into<String>, s: DoubleSeries<T>) -> Self {
        let s = Arc::new(s);
        let (a, b, c) = (s.clone(), s.clone(), s);
        Self {
            name: name.into(),
            provenance: Provenance::Series,
            expr: None,
            u: Arc::new(move |t, x| a.eval(t, x)),
            ux: Arc::new(move |t, x| b.eval_dx(t, x)),
            ut: Arc::new(move |t, x| c.eval_euler_t(t, x) / t),
        }
    }

    /// Values only; derivatives are computed numerically.
    pub fn from_fn(name: impl Into<String>, f: impl Fn(T, Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        let f: CFn<T> = Arc::new(f);
        let (fx, ft) = (f.clone(), f.clone());
        Self {
            name: name.into(),
            provenance: Provenance::Cauchy,
            expr: None,
            u: f,
            ux: Arc::new(move |t, x| cauchy_derivative(|z| fx(t, z), x, cauchy_radius(x), 32)),
            ut: Arc::new(move |t, x| {
                let h = t * lit(1e-4);
                (ft(t + h, x) - ft(t - h, x)) / (h + h)
            }),
        }
    }

    pub fn u(&self, t: T, x: Complex<T>) -> Complex<T> {
        (self.u)(t, x)
    }

    pub fn ux(&self, t: T, x: Complex<T>) -> Complex<T> {
        (self.ux)(t, x)
    }

    pub fn ut(&self, t: T, x: Complex<T>) -> Complex<T> {
        (self.ut)(t, x)
    }

    /// The fourth argument of `F`: `u_x`, or `x u_x` in Euler form.
    pub fn v(&self, t: T, x: Complex<T>, euler_form: bool) -> Complex<T> {
        if euler_form {
            x * self.ux(t, x)
        } else {
            self.ux(t, x)
        }
    }

    /// Largest `|u_x - central difference|` relative to `|u_x|`, with a
    /// small absolute floor, over the given points.
    pub fn derivative_check(&self, pts: &[(T, Complex<T>)]) -> T {
        let mut worst = T::zero();
        for &(t, x) in pts {
            let h = lit::<T>(1e-5) * x.norm().max(lit(1e-2));
            let hc = real(h);
            let fd = (self.u(t, x + hc) - self.u(t, x - hc)) / (h + h);
            let d = self.ux(t, x);
            let scale = d.norm() + lit::<T>(1e-6) * (T::one() + self.u(t, x).norm());
            worst = worst.max((fd - d).norm() / scale);
        }
        worst
    }
}
