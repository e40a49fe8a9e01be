//! Dormand-Prince 5(4) with PI step control for complex state vectors.

use num_complex::Complex;

use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy)]
pub struct StepOptions<T> {
    /// Per-step error target, scaled by `1 + |y_k|`.
    pub tol: T,
    pub max_step: T,
    pub min_step: T,
    /// Width of the bracket when localizing a domain exit.
    pub exit_tol: T,
}

impl<T: Real> Default for StepOptions<T> {
    fn default() -> Self {
        Self { tol: lit(1e-10), max_step: lit(0.25), min_step: lit(1e-12), exit_tol: lit(1e-12) }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Outcome<T> {
    Completed,
    /// First sample outside the domain is the last stored state.
    Exited,
    Failed { sigma: T, reason: String },
}

#[derive(Debug, Clone)]
pub struct Solution<T, const N: usize> {
    pub sigmas: Vec<T>,
    pub states: Vec<[Complex<T>; N]>,
    pub outcome: Outcome<T>,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One step of size `h`; returns the fifth-order state and the embedded
/// error estimate.
pub fn dp_step<T: Real, const N: usize>(
    f: &mut impl FnMut(T, &[Complex<T>; N]) -> [Complex<T>; N],
    s: T,
    y: &[Complex<T>; N],
    h: T,
) -> ([Complex<T>; N], [Complex<T>; N]) {
    let zero = Complex::new(T::zero(), T::zero());
    let mut k = [[zero; N]; 7];
    for stage in 0..7 {
        let mut ys = *y;
        for (prev, &a) in A[stage].iter().enumerate().take(stage) {
            if a != 0.0 {
                let a: T = lit(a);
                for n in 0..N {
                    ys[n] += k[prev][n] * (h * a);
                }
            }
        }
        k[stage] = f(s + h * lit::<T>(C[stage]), &ys);
    }
    let mut y5 = *y;
    let mut err = [zero; N];
    for stage in 0..7 {
        let b5: T = lit(B5[stage]);
        let de: T = lit(B5[stage] - B4[stage]);
        for n in 0..N {
            y5[n] += k[stage][n] * (h * b5);
            err[n] += k[stage][n] * (h * de);
        }
    }
    (y5, err)
}

fn finite<T: Real, const N: usize>(y: &[Complex<T>; N]) -> bool {
    y.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Integrates `dy/ds = f(s, y)` from `s0` to `s_end > s0`, storing every
/// accepted step and landing exactly on each `checkpoint` in `(s0, s_end)`.
/// Stops early when `inside` fails, after bisecting the exit.
pub fn integrate<T: Real, const N: usize>(
    mut f: impl FnMut(T, &[Complex<T>; N]) -> [Complex<T>; N],
    y0: [Complex<T>; N],
    s0: T,
    s_end: T,
    checkpoints: &[T],
    opts: &StepOptions<T>,
    mut inside: impl FnMut(&[Complex<T>; N]) -> bool,
) -> Solution<T, N> {
    let mut stops: Vec<T> = checkpoints.iter().copied().filter(|&c| c > s0 && c < s_end).collect();
    stops.sort_by(|a, b| a.partial_cmp(b).unwrap());
    stops.push(s_end);
    let mut stop_idx = 0;

    let mut sol = Solution { sigmas: vec![s0], states: vec![y0], outcome: Outcome::Completed };
    let mut s = s0;
    let mut y = y0;
    let mut h = opts.max_step.min(lit(1e-2)).min(s_end - s0);
    let mut err_prev = T::one();
    let safety: T = lit(0.9);
    let (alpha, beta): (T, T) = (lit(0.7 / 5.0), lit(0.4 / 5.0));

    while stop_idx < stops.len() {
        let target = stops[stop_idx];
        let remaining = target - s;
        let last = h >= remaining;
        let h_try = if last { remaining } else { h };
        let (y_new, e) = dp_step(&mut f, s, &y, h_try);
        let mut err = T::zero();
        for n in 0..N {
            let scale = opts.tol * (T::one() + y[n].norm().max(y_new[n].norm()));
            err = err.max(e[n].norm() / scale);
        }
        if !finite(&y_new) || !err.is_finite() {
            h = h_try * lit(0.25);
            if h < opts.min_step {
                sol.outcome = Outcome::Failed { sigma: s, reason: "non-finite field value".into() };
                return sol;
            }
            continue;
        }
        if err > T::one() {
            let fac = (safety * err.powf(-alpha)).max(lit(0.2));
            h = h_try * fac;
            if h < opts.min_step {
                sol.outcome = Outcome::Failed { sigma: s, reason: "step size collapsed".into() };
                return sol;
            }
            continue;
        }
        if !inside(&y_new) {
            let (mut lo, mut hi) = (T::zero(), h_try);
            let mut y_hi = y_new;
            while hi - lo > opts.exit_tol {
                let mid = (lo + hi) * lit(0.5);
                let (y_mid, _) = dp_step(&mut f, s, &y, mid);
                if finite(&y_mid) && inside(&y_mid) {
                    lo = mid;
                } else {
                    hi = mid;
                    y_hi = y_mid;
                }
            }
            sol.sigmas.push(s + hi);
            sol.states.push(y_hi);
            sol.outcome = Outcome::Exited;
            return sol;
        }
        s = if last { target } else { s + h_try };
        y = y_new;
        sol.sigmas.push(s);
        sol.states.push(y);
        if last {
            stop_idx += 1;
        }
        let e = err.max(lit(1e-10));
        let fac = (safety * e.powf(-alpha) * err_prev.powf(beta)).min(lit(5.0)).max(lit(0.2));
        err_prev = e;
        // a checkpoint-truncated step says little about the next one
        let base = if last { h.max(h_try) } else { h_try };
        h = (base * fac).min(opts.max_step);
    }
    sol
}

/// Fixed-step integration, for convergence-order checks.
pub fn integrate_fixed<T: Real, const N: usize>(
    mut f: impl FnMut(T, &[Complex<T>; N]) -> [Complex<T>; N],
    y0: [Complex<T>; N],
    s0: T,
    s_end: T,
    steps: usize,
) -> [Complex<T>; N] {
    let h = (s_end - s0) / crate::scalar::count::<T>(steps);
    let mut y = y0;
    for k in 0..steps {
        let s = s0 + h * crate::scalar::count::<T>(k);
        y = dp_step(&mut f, s, &y, h).0;
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    #[test]
    fn exponential_growth() {
        let sol = integrate(
            |_, y: &[Complex<f64>; 1]| [y[0] * cplx(0.5, 1.0)],
            [cplx(1.0, 0.0)],
            0.0,
            3.0,
            &[1.0],
            &StepOptions::default(),
            |_| true,
        );
        assert_eq!(sol.outcome, Outcome::Completed);
        assert!(sol.sigmas.contains(&1.0));
        let want = (cplx(0.5, 1.0) * 3.0).exp();
        assert!((sol.states.last().unwrap()[0] - want).norm() < 1e-8 * want.norm());
    }

    #[test]
    fn exit_is_localized() {
        let sol = integrate(
            |_, y: &[Complex<f64>; 1]| [y[0]],
            [cplx(0.5, 0.0)],
            0.0,
            5.0,
            &[],
            &StepOptions::default(),
            |y| y[0].norm() < 1.0,
        );
        assert_eq!(sol.outcome, Outcome::Exited);
        let s_exit = *sol.sigmas.last().unwrap();
        assert!((s_exit - 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn blow_up_fails() {
        let sol = integrate(
            |_, y: &[Complex<f64>; 1]| [y[0] * y[0]],
            [cplx(1.0, 0.0)],
            0.0,
            2.0,
            &[],
            &StepOptions::default(),
            |_| true,
        );
        assert!(matches!(sol.outcome, Outcome::Failed { .. }));
    }

    #[test]
    fn fifth_order() {
        let exact = (-1.0f64).exp();
        let f = |_: f64, y: &[Complex<f64>; 1]| [-y[0]];
        let e1 = (integrate_fixed(f, [cplx(1.0, 0.0)], 0.0, 1.0, 4)[0] - exact).norm();
        let e2 = (integrate_fixed(f, [cplx(1.0, 0.0)], 0.0, 1.0, 8)[0] - exact).norm();
        assert!(e1 / e2 > 16.0, "{}", e1 / e2);
    }
}
