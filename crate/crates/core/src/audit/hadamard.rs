use std::sync::Arc;

use num_complex::Complex;
use thiserror::Error;

use super::field::{cauchy_radius, SolutionField};
use crate::characteristics::{shape_for, DriftShape, FieldSpec};
use crate::classify::CaseClass;
use crate::expr::{Expr, PdeSpec, Var};
use crate::grid::Grid;
use crate::quadrature::{cauchy_derivative, gauss_legendre_16_unit};
use crate::scalar::{is_finite_c, real, to_f64, Real};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HadamardError {
    #[error("F_{which} not finite at t={t}, x={x:?}, s={s}")]
    Pole { which: char, t: f64, x: [f64; 2], s: f64 },
    #[error("solution {name} not finite at t={t}, x={x:?}")]
    Solution { name: String, t: f64, x: [f64; 2] },
}

/// `F_u` and `F_v` of an equation, prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Hadamard<T> {
    fu: Expr<T>,
    fv: Expr<T>,
    rhs: Expr<T>,
    euler_form: bool,
}

/// `A = int_0^1 F_u ds` and `B = int_0^1 F_v ds` at one point, so that
/// `F(u) - F(u0) = A w + B q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients<T> {
    pub a_total: Complex<T>,
    pub b_total: Complex<T>,
    pub w: Complex<T>,
    pub q: Complex<T>,
}

fn pair<T: Real>(x: Complex<T>) -> [f64; 2] {
    [to_f64(x.re), to_f64(x.im)]
}

impl<T: Real> Hadamard<T> {
    pub fn new(pde: &PdeSpec<T>) -> Self {
        Self { fu: pde.rhs.diff(Var::U), fv: pde.rhs.diff(Var::V), rhs: pde.rhs.clone(), euler_form: pde.euler_form }
    }

    pub fn coefficients(&self, u0: &SolutionField<T>, u: &SolutionField<T>, t: T, x: Complex<T>) -> Result<Coefficients<T>, HadamardError> {
        let e = self.euler_form;
        let (a0, v0) = (u0.u(t, x), u0.v(t, x, e));
        let (a1, v1) = (u.u(t, x), u.v(t, x, e));
        for (f, vals) in [(u0, [a0, v0]), (u, [a1, v1])] {
            if !vals.iter().all(|z| is_finite_c(*z)) {
                return Err(HadamardError::Solution { name: f.name.clone(), t: to_f64(t), x: pair(x) });
            }
        }
        let (w, q) = (a1 - a0, v1 - v0);
        let mut at = real(T::zero());
        let mut bt = real(T::zero());
        for (s, wt) in gauss_legendre_16_unit::<T>() {
            let args = [real(t), x, a0 + w * s, v0 + q * s];
            let fu = self.fu.eval_c(args).ok().filter(|z| is_finite_c(*z));
            let fu = fu.ok_or(HadamardError::Pole { which: 'u', t: to_f64(t), x: pair(x), s: to_f64(s) })?;
            let fv = self.fv.eval_c(args).ok().filter(|z| is_finite_c(*z));
            let fv = fv.ok_or(HadamardError::Pole { which: 'v', t: to_f64(t), x: pair(x), s: to_f64(s) })?;
            at += fu * wt;
            bt += fv * wt;
        }
        Ok(Coefficients { a_total: at, b_total: bt, w, q })
    }

    /// `t w_t - B q - A w`, the defect of the linear equation for `w`.
    pub fn identity_residual(&self, u0: &SolutionField<T>, u: &SolutionField<T>, t: T, x: Complex<T>) -> Result<Complex<T>, HadamardError> {
        let k = self.coefficients(u0, u, t, x)?;
        let wt = u.ut(t, x) - u0.ut(t, x);
        Ok(wt * t - k.b_total * k.q - k.a_total * k.w)
    }

    /// Max identity residual over a grid.
    pub fn identity_residual_max(&self, u0: &SolutionField<T>, u: &SolutionField<T>, grid: &Grid<T>) -> Result<T, HadamardError> {
        let mut m = T::zero();
        for &t in &grid.times {
            for &x in &grid.points {
                m = m.max(self.identity_residual(u0, u, t, x)?.norm());
            }
        }
        Ok(m)
    }

    /// `F(t, x, u, v)` of a solution, for residual checks.
    pub fn pde_residual(&self, u: &SolutionField<T>, t: T, x: Complex<T>) -> Complex<T> {
        let args = [real(t), x, u.u(t, x), u.v(t, x, self.euler_form)];
        match self.rhs.eval_c(args) {
            Ok(f) => u.ut(t, x) * t - f,
            Err(_) => Complex::new(T::nan(), T::nan()),
        }
    }
}

/// Coefficient fields of the linear equation satisfied by `w = u - u0`,
/// in the form expected by the characteristics module. `A` splits as
/// `lambda + a`; `B` as `b`, `b + x c` or `b + x^p c` by case.
pub fn hadamard_fields<T: Real>(pde: &PdeSpec<T>, cc: &CaseClass<T>, u0: &SolutionField<T>, u: &SolutionField<T>, a_decay: T) -> FieldSpec<T> {
    let h = Arc::new(Hadamard::new(pde));
    let shape = shape_for(pde, cc.case_id, cc.p);
    let nan = Complex::new(T::nan(), T::nan());
    let (u0a, ua) = (Arc::new(u0.clone()), Arc::new(u.clone()));
    let cca = Arc::new(cc.clone());
    let total = {
        let (h, u0a, ua) = (h.clone(), u0a.clone(), ua.clone());
        move |t: T, x: Complex<T>| h.coefficients(&u0a, &ua, t, x).map(|k| (k.a_total, k.b_total)).unwrap_or((nan, nan))
    };
    let total = Arc::new(total);
    let c_of = {
        let cca = cca.clone();
        move |t: T, x: Complex<T>| cca.c_at(t, x).unwrap_or(nan)
    };
    let lambda_of = {
        let cca = cca.clone();
        move |t: T, x: Complex<T>| cca.lambda_at(t, x).unwrap_or(nan)
    };
    let lambda_of = Arc::new(lambda_of);
    let c_of = Arc::new(c_of);

    let b_of = {
        let (total, c_of) = (total.clone(), c_of.clone());
        Arc::new(move |t: T, x: Complex<T>| {
            let b = total(t, x).1;
            match shape {
                DriftShape::Plain => b,
                DriftShape::Regular => b - x * c_of(t, x),
                DriftShape::Euler { p } => b - x.powu(p) * c_of(t, x),
            }
        })
    };
    let a_of = {
        let (total, lambda_of) = (total.clone(), lambda_of.clone());
        Arc::new(move |t: T, x: Complex<T>| total(t, x).0 - lambda_of(t, x))
    };
    let euler = matches!(shape, DriftShape::Euler { .. });
    let scale = move |x: Complex<T>, d: Complex<T>| if euler { x * d } else { d };
    let gamma = {
        let total = total.clone();
        move |t: T, x: Complex<T>| scale(x, cauchy_derivative(|z| total(t, z).0, x, cauchy_radius(x), 32))
    };
    let ell = {
        let (total, b_of, c_of) = (total.clone(), b_of.clone(), c_of.clone());
        move |t: T, x: Complex<T>| match shape {
            DriftShape::Plain => cauchy_derivative(|z| b_of(t, z), x, cauchy_radius(x), 32),
            DriftShape::Regular => {
                let r = cauchy_radius(x);
                cauchy_derivative(|z| b_of(t, z), x, r, 32) + x * cauchy_derivative(|z| c_of(t, z), x, r, 32)
            }
            DriftShape::Euler { .. } => x * cauchy_derivative(|z| total(t, z).1, x, cauchy_radius(x), 32),
        }
    };
    let c_field = {
        let c_of = c_of.clone();
        move |t: T, x: Complex<T>| if matches!(shape, DriftShape::Plain) { real(T::zero()) } else { c_of(t, x) }
    };
    FieldSpec::new(shape, a_decay)
        .with_b(move |t, x| b_of(t, x))
        .with_c(c_field)
        .with_lambda(move |t, x| lambda_of(t, x))
        .with_a(move |t, x| a_of(t, x))
        .with_gamma(gamma)
        .with_ell(ell)
}
