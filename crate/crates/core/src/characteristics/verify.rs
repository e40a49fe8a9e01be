use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::{trace, CharTrace, FieldSpec, TraceOptions, TraceStatus};
use crate::geometry::{Disc, Domain, Sector};
use crate::grid::sector_points;
use crate::quadrature::{adaptive_gk, cauchy_derivative, cumulative_trapezoid};
use crate::scalar::{count, lit, real, to_f64, Real};
use crate::weight::PhiWeight;

const SLACK: f64 = 1e-9;

fn le(lhs: f64, rhs: f64) -> bool {
    lhs <= rhs * (1.0 + SLACK) + SLACK * 1e-6
}

/// Index pairs `(i, j)` with `t_i > t_j`, spread evenly over the trace.
fn sample_pairs(n: usize, wanted: usize) -> Vec<(usize, usize)> {
    if n < 2 {
        return Vec::new();
    }
    let mut k = 2;
    while k < n && k * (k - 1) / 2 < wanted {
        k += 1;
    }
    let idx: Vec<usize> = (0..k).map(|m| m * (n - 1) / (k - 1)).collect();
    let mut out = Vec::new();
    for a in 0..k {
        for b in (a + 1)..k {
            if idx[a] != idx[b] {
                out.push((idx[a], idx[b]));
            }
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub a: f64,
    pub gamma_bound: f64,
    pub pairs_checked: usize,
    /// `(t1, tau)` pairs breaking the `w*` or `q*` estimate.
    pub violations: Vec<(f64, f64)>,
    /// `(t_min / t0)^a sup |w*|`, which must vanish as `t_min -> 0`.
    pub limit_bound: f64,
    pub pass: bool,
}

/// Sup of `|gamma(t, x(t))|` over the trace samples.
pub fn gamma_on_trace<T: Real>(f: &FieldSpec<T>, tr: &CharTrace<T>) -> T {
    tr.samples.iter().fold(T::zero(), |m, s| m.max((f.gamma)(s.t, s.x).norm()))
}

/// Checks `|w*(tau)| <= (t1/tau)^a |w*(t1)|` and
/// `|q*(tau)| <= (t1/tau)^a (Gamma |w*(t1)| log(tau/t1) + |q*(t1)|)`
/// on about `wanted` deterministic sample pairs `t1 < tau`.
pub fn verify_decay<T: Real>(tr: &CharTrace<T>, a: T, gamma_bound: T, wanted: usize) -> DecayReport {
    let n = tr.samples.len();
    let a64 = to_f64(a);
    let g64 = to_f64(gamma_bound);
    let mut violations = Vec::new();
    let pairs = sample_pairs(n, wanted);
    for &(i, j) in &pairs {
        // i is earlier in the trace, so tau = t_i > t1 = t_j
        let (hi, lo) = (&tr.samples[i], &tr.samples[j]);
        let (tau, t1) = (to_f64(hi.t), to_f64(lo.t));
        let ratio = (t1 / tau).powf(a64);
        let w1 = to_f64(lo.w.norm());
        let ok_w = le(to_f64(hi.w.norm()), ratio * w1);
        let ok_q = le(to_f64(hi.q.norm()), ratio * (g64 * w1 * (tau / t1).ln() + to_f64(lo.q.norm())));
        if !(ok_w && ok_q) {
            violations.push((t1, tau));
        }
    }
    let r1 = tr.samples.iter().fold(0.0f64, |m, s| m.max(to_f64(s.w.norm())));
    let t_last = to_f64(tr.last().t);
    let limit_bound = (t_last / to_f64(tr.t0)).powf(a64) * r1;
    DecayReport {
        a: a64,
        gamma_bound: g64,
        pairs_checked: pairs.len(),
        pass: violations.is_empty() && tr.transported,
        violations,
        limit_bound,
    }
}

/// `int_{t1}^{t0} (t1/tau)^a dtau/tau` and
/// `int_{t1}^{t0} (t1/tau)^a log(tau/t1) dtau/tau` by quadrature.
pub fn helper_integrals<T: Real>(a: T, t1_over_t0: T) -> (T, T) {
    let len = -t1_over_t0.ln();
    let tol = lit::<T>(1e-13);
    let (i1, _) = adaptive_gk(|s: T| (-a * s).exp(), T::zero(), len, tol, tol);
    let (i2, _) = adaptive_gk(|s: T| s * (-a * s).exp(), T::zero(), len, tol, tol);
    (i1, i2)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PositionReport {
    /// Samples breaking the position estimate, as `(t1, |x|, bound)`.
    pub violations: Vec<(f64, f64, f64)>,
    /// Samples where `|b| <= B0 mu + B1 |w*| + B2 |q*|` fails.
    pub drift_bound_violations: usize,
    pub helper_integral_max: (f64, f64),
    pub helper_ok: bool,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct DriftBound<T> {
    pub b0: T,
    pub b1: T,
    pub b2: T,
}

/// Checks the position estimate
/// `|x(t1)| <= |xi| + B0 (phi(t0) - phi(t1)) + (B1/a + B2 Gamma/a^2)|w*(t1)| + (B2/a)|q*(t1)|`.
pub fn verify_position<T: Real>(f: &FieldSpec<T>, tr: &CharTrace<T>, bound: DriftBound<T>, phi: &PhiWeight<T>, gamma: T) -> PositionReport {
    let a = f.a_decay;
    let t0 = tr.t0;
    let phi0 = phi.eval(t0).unwrap_or(T::nan());
    let mut violations = Vec::new();
    let mut drift_bad = 0;
    let (mut h1, mut h2) = (T::zero(), T::zero());
    let mut helper_ok = true;
    for s in &tr.samples {
        let phi1 = phi.eval(s.t).unwrap_or(T::nan());
        let rhs = tr.xi.norm()
            + bound.b0 * (phi0 - phi1)
            + (bound.b1 / a + bound.b2 * gamma / (a * a)) * s.w.norm()
            + bound.b2 / a * s.q.norm();
        if !le(to_f64(s.x.norm()), to_f64(rhs)) {
            violations.push((to_f64(s.t), to_f64(s.x.norm()), to_f64(rhs)));
        }
        let mu = phi.weight.eval(s.t).unwrap_or(T::nan());
        let b = (f.b)(s.t, s.x).norm();
        if !le(to_f64(b), to_f64(bound.b0 * mu + bound.b1 * s.w.norm() + bound.b2 * s.q.norm())) {
            drift_bad += 1;
        }
        if s.t < t0 {
            let (i1, i2) = helper_integrals(a, s.t / t0);
            h1 = h1.max(i1);
            h2 = h2.max(i2);
            helper_ok &= i1 <= T::one() / a && i2 <= T::one() / (a * a);
        }
    }
    PositionReport {
        pass: violations.is_empty() && drift_bad == 0 && helper_ok,
        violations,
        drift_bound_violations: drift_bad,
        helper_integral_max: (to_f64(h1), to_f64(h2)),
        helper_ok,
    }
}

/// Constants entering the escape budget. `A`, `L`, `Gamma` are sups of
/// `|a|`, `|ell|`, `|gamma|`; `r1`, `r2` sups of `|w|`, `|q|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DriftBudget {
    pub a: f64,
    pub big_a: f64,
    pub big_l: f64,
    pub gamma: f64,
    pub b0: f64,
    pub b1: f64,
    pub b2: f64,
    pub r1: f64,
    pub r2: f64,
    pub sigma: f64,
    pub radius: f64,
}

impl DriftBudget {
    /// Grid sups of `|a|`, `|ell|`, `|gamma|` over `times x points`.
    pub fn sample_field<T: Real>(f: &FieldSpec<T>, times: &[T], points: &[Complex<T>]) -> (f64, f64, f64) {
        let (mut a, mut l, mut g) = (0.0f64, 0.0f64, 0.0f64);
        for &t in times {
            for &x in points {
                a = a.max(to_f64((f.a)(t, x).norm()));
                l = l.max(to_f64((f.ell)(t, x).norm()));
                g = g.max(to_f64((f.gamma)(t, x).norm()));
            }
        }
        (a, l, g)
    }

    pub fn rate_ok(&self) -> bool {
        self.big_a + self.big_l < self.a
    }

    /// `B0 phi(sigma) + (B1/a + B2 Gamma/a^2) r1 + (B2/a) r2`.
    pub fn position_lhs(&self, phi_sigma: f64) -> f64 {
        let a = self.a;
        self.b0 * phi_sigma + (self.b1 / a + self.b2 * self.gamma / (a * a)) * self.r1 + self.b2 / a * self.r2
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EscapeReport {
    pub budget: DriftBudget,
    pub rate_ok: bool,
    pub position_lhs: f64,
    pub half_radius: f64,
    pub budget_ok: bool,
    pub traces: usize,
    pub confined: usize,
    pub statuses: Vec<TraceStatus>,
    pub max_abs_x: f64,
    pub pass: bool,
}

/// Traces from every start point must reach `t_min` inside the disc
/// whenever the budget inequalities hold.
pub fn escape_check<T: Real>(
    f: &FieldSpec<T>,
    disc: Disc<T>,
    xi_set: &[Complex<T>],
    t0: T,
    t_min: T,
    budget: DriftBudget,
    phi: &PhiWeight<T>,
    opts: &TraceOptions<T>,
) -> EscapeReport {
    let phi_sigma = to_f64(phi.eval(lit(budget.sigma)).unwrap_or(T::nan()));
    let lhs = budget.position_lhs(phi_sigma);
    let rate_ok = budget.rate_ok();
    let budget_ok = rate_ok && lhs < budget.radius / 2.0;
    let dom = Domain::Disc(disc);
    let mut statuses = Vec::new();
    let mut confined = 0;
    let mut max_abs = 0.0f64;
    for &xi in xi_set {
        let tr = trace(f, t0, xi, t_min, &dom, opts);
        let inside = tr.samples.iter().all(|s| disc.contains(s.x));
        max_abs = tr.samples.iter().fold(max_abs, |m, s| m.max(to_f64(s.x.norm())));
        if tr.status == TraceStatus::ReachedTmin && inside {
            confined += 1;
        }
        statuses.push(tr.status);
    }
    EscapeReport {
        budget,
        rate_ok,
        position_lhs: lhs,
        half_radius: budget.radius / 2.0,
        budget_ok,
        traces: xi_set.len(),
        confined,
        statuses,
        max_abs_x: max_abs,
        pass: budget_ok && confined == xi_set.len(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhiReport {
    pub min_abs: f64,
    pub max_abs: f64,
    pub theta_phi: f64,
    /// `delta` used for the angle bound.
    pub delta: f64,
    /// `sup |int_t^{t0} b dtau/tau|` observed on the trace.
    pub delta_observed: f64,
    pub modulus_ok: bool,
    /// `None` when `2 delta >= 1` and the bound is vacuous.
    pub angle_ok: Option<bool>,
    /// Largest gap between the carried integral and a trapezoid rule.
    pub trapezoid_gap: f64,
    pub pass: bool,
}

/// `phi(t) = exp(-int_t^{t0} b dtau/tau)` on the trace, with the checks
/// `1/2 <= |phi| <= 2` and `theta_phi <= asin(2 delta)`.
pub fn phi_factor<T: Real>(f: &FieldSpec<T>, tr: &CharTrace<T>, delta: Option<T>) -> PhiReport {
    let (mut lo, mut hi, mut th, mut dobs) = (f64::INFINITY, 0.0f64, 0.0f64, 0.0f64);
    for s in &tr.samples {
        let phi = (-s.ib).exp();
        lo = lo.min(to_f64(phi.norm()));
        hi = hi.max(to_f64(phi.norm()));
        th = th.max(to_f64(phi.arg().abs()));
        dobs = dobs.max(to_f64(s.ib.norm()));
    }
    let sig: Vec<T> = tr.samples.iter().map(|s| s.sigma).collect();
    let bs: Vec<Complex<T>> = tr.samples.iter().map(|s| (f.b)(s.t, s.x)).collect();
    let trap = cumulative_trapezoid(&sig, &bs);
    let gap = tr.samples.iter().zip(&trap).fold(0.0f64, |m, (s, q)| m.max(to_f64((s.ib - q).norm())));
    let delta = delta.map(to_f64).unwrap_or(dobs);
    let modulus_ok = lo >= 0.5 && hi <= 2.0;
    let angle_ok = (2.0 * delta < 1.0).then(|| th <= (2.0 * delta).asin() + 1e-12);
    PhiReport {
        min_abs: lo,
        max_abs: hi,
        theta_phi: th,
        delta,
        delta_observed: dobs,
        modulus_ok,
        angle_ok,
        trapezoid_gap: gap,
        pass: modulus_ok && angle_ok.unwrap_or(true),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReconstructReport {
    pub p: u32,
    pub max_rel_deviation: f64,
    pub compared: usize,
    pub branch_flagged: usize,
    pub c0: f64,
    pub eps1: f64,
    pub theta_phi: f64,
    pub envelope_applies: bool,
    pub envelope_violations: usize,
    pub never_zero: bool,
}

/// Compares each sample with
/// `x(t1) = (xi/phi(t1)) / (1 - p xi^p int_{t1}^{t0} c/phi^p dtau/tau)^{1/p}`
/// (principal root) and checks the modulus and argument envelopes.
pub fn sector_reconstruct<T: Real>(f: &FieldSpec<T>, tr: &CharTrace<T>, p: u32) -> ReconstructReport {
    let pp = count::<T>(p as usize);
    let xi = tr.xi;
    let one = real(T::one());
    let mut worst = 0.0f64;
    let (mut compared, mut flagged) = (0, 0);
    let (mut c0, mut eps1, mut th) = (0.0f64, 0.0f64, 0.0f64);
    for s in &tr.samples {
        let c = (f.c)(s.t, s.x);
        c0 = c0.max(to_f64(c.norm()));
        eps1 = eps1.max(to_f64((-c).arg().abs()));
        th = th.max(to_f64((-s.ib).exp().arg().abs()));
    }
    let never_zero = tr.samples.iter().all(|s| s.x.norm() > T::zero());
    let p64 = p as f64;
    let arg_xi = to_f64(xi.arg().abs());
    let envelope_applies = p64 * arg_xi + eps1 + p64 * th <= std::f64::consts::FRAC_PI_2;
    let mut env_bad = 0;
    for s in &tr.samples {
        let phi = (-s.ib).exp();
        let radicand = one - xi.powu(p) * pp * s.j;
        if to_f64(radicand.arg().abs()) > std::f64::consts::PI - 0.1 {
            flagged += 1;
        } else {
            let root = radicand.powf(T::one() / pp);
            let rec = xi / phi / root;
            let dev = to_f64((rec - s.x).norm() / s.x.norm());
            worst = worst.max(dev);
            compared += 1;
        }
        if envelope_applies {
            let l = to_f64((tr.t0 / s.t).ln());
            let xin = to_f64(xi.norm());
            let lower = xin / 2.0 / (1.0 + p64 * xin.powf(p64) * c0 * 2f64.powf(p64) * l).powf(1.0 / p64);
            let ax = to_f64(s.x.norm());
            let arg_ok = to_f64(s.x.arg().abs()) <= 2.0 * arg_xi + 2.0 * th + eps1 / p64 + 1e-12;
            if !(lower <= ax * (1.0 + 1e-12) && ax <= 2.0 * xin && arg_ok) {
                env_bad += 1;
            }
        }
    }
    ReconstructReport {
        p,
        max_rel_deviation: worst,
        compared,
        branch_flagged: flagged,
        c0,
        eps1,
        theta_phi: th,
        envelope_applies,
        envelope_violations: env_bad,
        never_zero,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NagumoReport {
    pub sup_f: f64,
    pub checked: usize,
    pub excluded: usize,
    pub violations: usize,
    /// Largest `|x f'(x)| d_S(x) / sup|f|`.
    pub worst_ratio: f64,
    pub pass: bool,
}

/// Checks `|x f'(x)| <= sup_S |f| / d_S(x)` on a sector lattice, with
/// `f'` from a Cauchy circle kept inside the sector.
pub fn nagumo_check<T: Real>(f: impl Fn(Complex<T>) -> Complex<T>, s: Sector<T>, n_radii: usize, n_angles: usize) -> NagumoReport {
    // sup over the sector from a lattice reaching close to the boundary
    let dense = sector_points(s, 4 * n_radii, 4 * n_angles, lit(1e-4), lit(1e-4));
    let sup = dense.iter().fold(T::zero(), |m, &x| m.max(f(x).norm()));
    let pts = sector_points(s, n_radii, n_angles, lit(1e-3), lit(1e-2));
    let slack = lit::<T>(1.05);
    let (mut checked, mut excluded, mut bad) = (0, 0, 0);
    let mut worst = 0.0f64;
    for &x in &pts {
        let d = match s.distance(x) {
            Ok(d) if d >= lit(1e-3) => d,
            _ => {
                excluded += 1;
                continue;
            }
        };
        let r = s.euclidean_margin(x) * lit(0.5);
        let df = cauchy_derivative(&f, x, r, 32);
        let lhs = (x * df).norm();
        checked += 1;
        if sup > T::zero() {
            worst = worst.max(to_f64(lhs * d / sup));
        }
        if lhs > sup / d * slack + lit(1e-14) {
            bad += 1;
        }
    }
    NagumoReport { sup_f: to_f64(sup), checked, excluded, violations: bad, worst_ratio: worst, pass: bad == 0 }
}

/// `sup_{S(eta/2 theta, eta/2 R)} |x f'| / eta^{m-1}` along an `eta` ladder.
pub fn nagumo_scaling<T: Real>(f: impl Fn(Complex<T>) -> Complex<T>, s: Sector<T>, m: u32, etas: &[T]) -> Vec<f64> {
    let half = lit::<T>(0.5);
    etas.iter()
        .map(|&eta| {
            let small = s.shrunk(eta * half).expect("eta in (0,1]");
            let pts = sector_points(small, 6, 9, lit(1e-3), lit(1e-2));
            let sup = pts.iter().fold(T::zero(), |acc, &x| {
                let r = small.euclidean_margin(x).max(lit(1e-12)) * lit(0.5);
                acc.max((x * cauchy_derivative(&f, x, r, 32)).norm())
            });
            to_f64(sup / eta.powi(m as i32 - 1))
        })
        .collect()
}
