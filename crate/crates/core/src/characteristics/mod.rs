//! Complex characteristics `t dx/dt = -drift(t, x)` integrated toward
//! `t -> 0` in backward log-time `s = log(t0 / t)`, transport of `w*` and
//! `q*` along them, and numerical checks of the decay, position, escape
//! and sector estimates.

pub mod stepper;
mod verify;

use std::fmt::Write as _;
use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::expr::{Expr, PdeSpec};
use crate::geometry::Domain;
use crate::scalar::{count, lit, real, to_f64, Real};

pub use stepper::{Outcome, StepOptions};
pub use verify::*;

/// A coefficient field `(t, x) -> complex`. Non-finite values mark failure.
pub type CField<T> = Arc<dyn Fn(T, Complex<T>) -> Complex<T> + Send + Sync>;

pub fn constant_field<T: Real>(c: Complex<T>) -> CField<T> {
    Arc::new(move |_, _| c)
}

/// Wraps an expression in `t, x` (with `u = v = 0`) as a field.
pub fn expr_field<T: Real>(e: Expr<T>) -> CField<T> {
    let zero = real(T::zero());
    Arc::new(move |t, x| {
        e.eval(t, x, zero, zero)
            .unwrap_or_else(|_| Complex::new(T::nan(), T::nan()))
    })
}

/// Which characteristic system the drift belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum DriftShape {
    /// `t x' = -b`.
    Plain,
    /// `t x' = -(b + x c)`.
    Regular,
    /// `t x' = -x (b + x^p c)`.
    Euler { p: u32 },
}

/// Coefficients of the linear equations satisfied by `w = u - u0` and its
/// x-derivative (or Euler derivative) `q`.
#[derive(Clone)]
pub struct FieldSpec<T> {
    pub shape: DriftShape,
    pub b: CField<T>,
    pub c: CField<T>,
    pub lambda: CField<T>,
    pub a: CField<T>,
    pub gamma: CField<T>,
    pub ell: CField<T>,
    /// The `a > 0` with `Re(lambda + a) < -a`.
    pub a_decay: T,
}

impl<T: Real> std::fmt::Debug for FieldSpec<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FieldSpec").field("shape", &self.shape).field("a_decay", &self.a_decay).finish_non_exhaustive()
    }
}

impl<T: Real> FieldSpec<T> {
    /// All coefficients zero.
    pub fn new(shape: DriftShape, a_decay: T) -> Self {
        let z = constant_field(real(T::zero()));
        Self { shape, b: z.clone(), c: z.clone(), lambda: z.clone(), a: z.clone(), gamma: z.clone(), ell: z, a_decay }
    }

    pub fn with_b(mut self, f: impl Fn(T, Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.b = Arc::new(f);
        self
    }

    pub fn with_c(mut self, f: impl Fn(T, Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.c = Arc::new(f);
        self
    }

    pub fn with_lambda(mut self, f: impl Fn(T, Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.lambda = Arc::new(f);
        self
    }

    pub fn with_a(mut self, f: impl Fn(T, Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.a = Arc::new(f);
        self
    }

    pub fn with_gamma(mut self, f: impl Fn(T, Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.gamma = Arc::new(f);
        self
    }

    pub fn with_ell(mut self, f: impl Fn(T, Complex<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        self.ell = Arc::new(f);
        self
    }

    /// `dx/ds` with `s = log(t0/t)`, i.e. the right side of `-t dx/dt`.
    pub fn drift(&self, t: T, x: Complex<T>) -> Complex<T> {
        match self.shape {
            DriftShape::Plain => (self.b)(t, x),
            DriftShape::Regular => (self.b)(t, x) + x * (self.c)(t, x),
            DriftShape::Euler { p } => x * ((self.b)(t, x) + x.powu(p) * (self.c)(t, x)),
        }
    }

    pub fn p(&self) -> u32 {
        match self.shape {
            DriftShape::Euler { p } => p,
            _ => 0,
        }
    }

    /// Rate in `t q*' = gamma w* + rate q*`.
    pub fn q_rate(&self, t: T, x: Complex<T>) -> Complex<T> {
        let base = (self.lambda)(t, x) + (self.a)(t, x) + (self.ell)(t, x);
        match self.shape {
            DriftShape::Regular => base + (self.c)(t, x),
            _ => base,
        }
    }
}

/// Field section of a problem file: expressions in `t` and `x`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FieldExprs {
    pub shape: DriftShape,
    #[serde(default)]
    pub b: Option<String>,
    #[serde(default)]
    pub c: Option<String>,
    #[serde(default)]
    pub lambda: Option<String>,
    #[serde(default)]
    pub a: Option<String>,
    #[serde(default)]
    pub gamma: Option<String>,
    #[serde(default)]
    pub ell: Option<String>,
    pub a_decay: f64,
}

impl FieldExprs {
    pub fn build<T: Real>(&self) -> Result<FieldSpec<T>, crate::expr::ParseError> {
        let mut f = FieldSpec::new(self.shape, lit(self.a_decay));
        let slots: [(&Option<String>, &mut CField<T>); 6] = [
            (&self.b, &mut f.b),
            (&self.c, &mut f.c),
            (&self.lambda, &mut f.lambda),
            (&self.a, &mut f.a),
            (&self.gamma, &mut f.gamma),
            (&self.ell, &mut f.ell),
        ];
        for (src, slot) in slots {
            if let Some(src) = src {
                *slot = expr_field(crate::expr::parse(src)?);
            }
        }
        Ok(f)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "status")]
pub enum TraceStatus {
    ReachedTmin,
    ExitedDomain { t: f64, x: [f64; 2] },
    StepFailure { t: f64, reason: String },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample<T> {
    pub t: T,
    pub sigma: T,
    pub x: Complex<T>,
    /// `int_t^{t0} b(tau, x(tau)) dtau/tau`.
    pub ib: Complex<T>,
    /// `int_t^{t0} c(tau, x(tau)) / phi(tau)^p dtau/tau`.
    pub j: Complex<T>,
    pub w: Complex<T>,
    pub q: Complex<T>,
}

#[derive(Debug, Clone)]
pub struct CharTrace<T> {
    pub t0: T,
    pub xi: Complex<T>,
    pub samples: Vec<TraceSample<T>>,
    pub status: TraceStatus,
    pub transported: bool,
}

#[derive(Debug, Clone)]
pub struct TraceOptions<T> {
    pub step: StepOptions<T>,
    /// Times at which a sample is forced.
    pub checkpoints: Vec<T>,
}

impl<T: Real> Default for TraceOptions<T> {
    fn default() -> Self {
        Self { step: StepOptions::default(), checkpoints: Vec::new() }
    }
}

impl<T: Real> TraceOptions<T> {
    pub fn with_tol(tol: T) -> Self {
        let mut o = Self::default();
        o.step.tol = tol;
        o
    }
}

/// Integrates the characteristic through `(t0, xi)` down to `t_min`.
pub fn trace<T: Real>(f: &FieldSpec<T>, t0: T, xi: Complex<T>, t_min: T, dom: &Domain<T>, opts: &TraceOptions<T>) -> CharTrace<T> {
    let zero = real(T::zero());
    let p = count::<T>(f.p() as usize);
    let s_end = (t0 / t_min).ln();
    let checkpoints: Vec<T> = opts.checkpoints.iter().filter(|&&t| t < t0 && t > t_min).map(|&t| (t0 / t).ln()).collect();
    let rhs = |s: T, y: &[Complex<T>; 3]| {
        let t = t0 * (-s).exp();
        let x = y[0];
        let b = (f.b)(t, x);
        let j_rate = if f.p() > 0 { (f.c)(t, x) * (y[1] * p).exp() } else { zero };
        [f.drift(t, x), b, j_rate]
    };
    let sol = stepper::integrate(rhs, [xi, zero, zero], T::zero(), s_end, &checkpoints, &opts.step, |y| dom.contains(y[0]));
    let samples: Vec<TraceSample<T>> = sol
        .sigmas
        .iter()
        .zip(&sol.states)
        .map(|(&s, y)| TraceSample { t: t0 * (-s).exp(), sigma: s, x: y[0], ib: y[1], j: y[2], w: zero, q: zero })
        .collect();
    let last = *samples.last().expect("at least the initial sample");
    let status = match sol.outcome {
        Outcome::Completed => TraceStatus::ReachedTmin,
        Outcome::Exited => TraceStatus::ExitedDomain { t: to_f64(last.t), x: [to_f64(last.x.re), to_f64(last.x.im)] },
        Outcome::Failed { sigma, reason } => TraceStatus::StepFailure { t: to_f64(t0 * (-sigma).exp()), reason },
    };
    CharTrace { t0, xi, samples, status, transported: false }
}

/// Solves `t w*' = (lambda + a) w*` and `t q*' = gamma w* + rate q*` along
/// the trace, re-integrating `x` jointly between consecutive samples.
pub fn transport<T: Real>(f: &FieldSpec<T>, tr: &CharTrace<T>, w0: Complex<T>, q0: Complex<T>, step: &StepOptions<T>) -> CharTrace<T> {
    let mut out = tr.clone();
    let t0 = tr.t0;
    let rhs = |s: T, y: &[Complex<T>; 3]| {
        let t = t0 * (-s).exp();
        let x = y[0];
        let la = (f.lambda)(t, x) + (f.a)(t, x);
        [f.drift(t, x), -(la * y[1]), -((f.gamma)(t, x) * y[1] + f.q_rate(t, x) * y[2])]
    };
    out.samples[0].w = w0;
    out.samples[0].q = q0;
    for k in 1..out.samples.len() {
        let prev = out.samples[k - 1];
        let s1 = out.samples[k].sigma;
        if s1 <= prev.sigma {
            out.samples[k].w = prev.w;
            out.samples[k].q = prev.q;
            continue;
        }
        let sol = stepper::integrate(rhs, [prev.x, prev.w, prev.q], prev.sigma, s1, &[], step, |_| true);
        let y = sol.states.last().copied().unwrap_or([prev.x, prev.w, prev.q]);
        if !matches!(sol.outcome, Outcome::Completed) {
            let nan = Complex::new(T::nan(), T::nan());
            for s in &mut out.samples[k..] {
                s.w = nan;
                s.q = nan;
            }
            break;
        }
        out.samples[k].w = y[1];
        out.samples[k].q = y[2];
    }
    out.transported = true;
    out
}

pub const CSV_HEADER: &str = "t,re(x),im(x),re(w*),im(w*),re(q*),im(q*)";

impl<T: Real> CharTrace<T> {
    pub fn times(&self) -> Vec<T> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn last(&self) -> &TraceSample<T> {
        self.samples.last().expect("nonempty trace")
    }

    /// Trace CSV, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        for s in &self.samples {
            let v = [s.t, s.x.re, s.x.im, s.w.re, s.w.im, s.q.re, s.q.im];
            let row: Vec<String> = v.iter().map(|&z| format!("{:e}", to_f64(z))).collect();
            let _ = writeln!(out, "{}", row.join(","));
        }
        out
    }
}

/// Field of the pure Case 3 model `t u_t = lambda u + x^p c (x u_x)` with
/// constant coefficients, used as a reference in checks.
pub fn euler_model<T: Real>(p: u32, b: Complex<T>, c: Complex<T>, lambda: Complex<T>, a_decay: T) -> FieldSpec<T> {
    FieldSpec::new(DriftShape::Euler { p }, a_decay)
        .with_b(move |_, _| b)
        .with_c(move |_, _| c)
        .with_lambda(move |_, _| lambda)
}

/// The drift shape matching a classified equation.
pub fn shape_for<T: Real>(pde: &PdeSpec<T>, case_id: u8, p: Option<u32>) -> DriftShape {
    match (pde.euler_form, case_id) {
        (true, 1) => DriftShape::Euler { p: 0 },
        (true, _) => DriftShape::Euler { p: p.unwrap_or(0) },
        (false, 1) => DriftShape::Plain,
        (false, _) => DriftShape::Regular,
    }
}
