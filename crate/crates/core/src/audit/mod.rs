//! Numerical estimate of the uniqueness criterion
//! `limsup_{R->0} lim_{sigma->0} sup_{(0,sigma) x D_R} |u| / R^2`
//! (or its sector form with `eta`), Hadamard coefficient fields, and the
//! combined verdict.

mod field;
mod hadamard;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use crate::classify::{check_a2, CaseClass, HypothesisFlags};
use crate::expr::{Expr, PdeSpec, Var};
use crate::geometry::{Disc, Sector};
use crate::grid::{disc_points, geometric_inclusive, sector_points, Grid};
use crate::scalar::{lit, to_f64, Real};
use crate::series::{build_solution, BuildOptions, DoubleSeries};
use crate::weight::WeightFn;

pub use field::{CFn, Provenance, SolutionField};
pub use hadamard::{hadamard_fields, Coefficients, Hadamard, HadamardError};

pub const SCHEMA: &str = "audit-v1";

/// Sampling of the double limit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditConfig {
    /// Decades below each `sigma` covered by the time window.
    pub window_decades: f64,
    pub n_times: usize,
    pub n_circles: usize,
    pub n_angles: usize,
    /// Values at or below this are treated as zero.
    pub zero_tol: f64,
    /// Allowed `sup |u - u0|` scale for a positive verdict.
    pub audit_tol: f64,
}

impl Default for AuditConfig {
    fn default() -> Self {
        Self { window_decades: 2.0, n_times: 9, n_circles: 4, n_angles: 32, zero_tol: 1e-10, audit_tol: 1e-6 }
    }
}

impl AuditConfig {
    /// Scales sample counts by an integer density factor.
    pub fn with_density(mut self, k: usize) -> Self {
        let k = k.max(1);
        self.n_times *= k;
        self.n_circles *= k;
        self.n_angles *= k;
        self
    }
}

/// Default ladders: radii (or `eta`) halving four times from half the
/// reference size, and `sigma` from `t0/10` down by factors of 100.
pub fn default_ladders(top: f64, t0: f64) -> (Vec<f64>, Vec<f64>) {
    let r = (0..4).map(|k| top * 0.5f64.powi(k + 1)).collect();
    let s = (0..4).map(|k| t0 * 0.1 * 0.01f64.powi(k)).collect();
    (r, s)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AuditDomain<T> {
    Disc,
    Sector(Sector<T>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InnerStatus {
    /// The `sigma` column decreases toward zero.
    Vanishing,
    /// Settles at a positive value.
    Positive,
    /// Grows by more than 10x down the `sigma` ladder.
    Diverging,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InnerEstimate {
    /// `Q` at the smallest `sigma`.
    pub value: f64,
    pub status: InnerStatus,
    /// `Q` nonincreasing as `sigma` shrinks.
    pub monotone: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Trend {
    TendsToZero,
    TendsToPositive { estimate: f64, extrapolated: f64 },
    Diverges,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalFailure {
    pub t: f64,
    pub x: [f64; 2],
}

/// Weaker side conditions on the largest rung: `sup_x |u(t,.)| -> 0` and
/// `sup_x |u(t,.)| = O(mu(t)^eps)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SideFlags {
    pub sup_tends_to_zero: bool,
    /// Smallest log-slope of `sup |u|` against `mu` over the last samples;
    /// `None` when `u` vanishes there.
    pub mu_power_rate: Option<f64>,
    pub mu_power_bounded: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    UniquenessApplies,
    CriterionFails,
    HypothesesFail,
    Inconclusive,
}

impl Verdict {
    /// CLI exit code.
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::UniquenessApplies => 0,
            Verdict::CriterionFails => 5,
            Verdict::HypothesesFail => 6,
            Verdict::Inconclusive => 7,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Ladders {
    /// `"R"` for discs, `"eta"` for sectors.
    pub space_name: String,
    pub space: Vec<f64>,
    pub sigma: Vec<f64>,
    pub window_decades: f64,
    pub n_times: usize,
    pub space_points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub against: String,
    pub sup_diff: f64,
    pub t_range: [f64; 2],
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictFlags {
    pub hypotheses: HypothesisFlags,
    pub case_id: u8,
    pub supported_shape: bool,
    /// Forcing `F(t,x,0,0)` and drift part are `O(mu)` along the time ladder.
    pub forcing_bounded: bool,
    pub drift_bounded: bool,
    pub hypotheses_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditReport {
    pub schema: String,
    pub solution: String,
    pub provenance: Provenance,
    pub domain: String,
    pub ladders: Ladders,
    /// Rows follow the space ladder, columns the `sigma` ladder.
    #[serde(rename = "Q")]
    pub q: Vec<Vec<f64>>,
    pub inner: Vec<InnerEstimate>,
    pub trend: Trend,
    pub side: SideFlags,
    pub failure: Option<EvalFailure>,
    pub flags: Option<VerdictFlags>,
    pub comparison: Option<Comparison>,
    pub verdict: Option<Verdict>,
    pub notes: Vec<String>,
}

impl AuditReport {
    /// Outer estimate: 0 when tending to zero, infinite when diverging.
    pub fn estimate(&self) -> f64 {
        match self.trend {
            Trend::TendsToZero => 0.0,
            Trend::TendsToPositive { estimate, .. } => estimate,
            Trend::Diverges => f64::INFINITY,
        }
    }
}

fn space_samples<T: Real>(dom: AuditDomain<T>, rung: T, cfg: &AuditConfig) -> Vec<Complex<T>> {
    match dom {
        // boundary circle included: by maximum modulus it carries the sup
        AuditDomain::Disc => disc_points(Disc::new(rung).expect("positive rung"), cfg.n_circles, cfg.n_angles, T::zero()),
        AuditDomain::Sector(s) => {
            let small = s.shrunk(rung).expect("eta in (0,1]");
            sector_points(small, cfg.n_circles * 2, cfg.n_angles / 2 + 1, T::zero(), lit(1e-2))
        }
    }
}

fn normalizer<T: Real>(dom: AuditDomain<T>, rung: T) -> T {
    match dom {
        AuditDomain::Disc | AuditDomain::Sector(_) => rung * rung,
    }
}

fn window<T: Real>(sigma: T, cfg: &AuditConfig) -> Vec<T> {
    let lo = sigma * lit::<T>(10f64.powf(-cfg.window_decades));
    geometric_inclusive(lo, sigma, cfg.n_times.max(2))
}

fn sup_abs<T: Real>(u: &SolutionField<T>, times: &[T], pts: &[Complex<T>]) -> Result<T, EvalFailure> {
    let mut m = T::zero();
    for &t in times {
        for &x in pts {
            let v = u.u(t, x).norm();
            if !v.is_finite() {
                return Err(EvalFailure { t: to_f64(t), x: [to_f64(x.re), to_f64(x.im)] });
            }
            m = m.max(v);
        }
    }
    Ok(m)
}

/// `true` when a positive sequence, sampled at increasing `l`, decreases
/// and its reciprocal grows at a non-decreasing rate in `l`, so that it
/// cannot level off at a positive value.
fn reciprocal_vanishes(vals: &[f64], l: &[f64], zero_tol: f64) -> bool {
    if vals.last().is_some_and(|&v| v <= zero_tol) {
        return true;
    }
    if vals.len() < 3 || vals.iter().any(|&v| !(v > 0.0)) {
        return false;
    }
    let rec: Vec<f64> = vals.iter().map(|v| 1.0 / v).collect();
    let slopes: Vec<f64> = (1..rec.len()).map(|k| (rec[k] - rec[k - 1]) / (l[k] - l[k - 1])).collect();
    let rising = slopes.iter().zip(&rec).all(|(s, r)| *s > 1e-9 * r);
    let n = slopes.len();
    rising && slopes[n - 1] >= 0.9 * slopes[n - 2]
}

fn aitken(a: f64, b: f64, c: f64) -> Option<f64> {
    let d2 = c - 2.0 * b + a;
    (d2.abs() > 1e-14 * (a.abs() + b.abs() + c.abs())).then(|| c - (c - b) * (c - b) / d2)
}

fn classify_inner(row: &[f64], sigma: &[f64], zero_tol: f64) -> InnerEstimate {
    let value = *row.last().expect("nonempty ladder");
    let monotone = row.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + zero_tol);
    let first = row[0];
    let status = if row.iter().any(|v| !v.is_finite()) || (value > 10.0 * first && value > zero_tol) {
        InnerStatus::Diverging
    } else {
        let l: Vec<f64> = sigma.iter().map(|s| -s.ln()).collect();
        if monotone && reciprocal_vanishes(row, &l, zero_tol) {
            InnerStatus::Vanishing
        } else {
            InnerStatus::Positive
        }
    };
    InnerEstimate { value, status, monotone }
}

fn outer_trend(inner: &[InnerEstimate], space: &[f64], zero_tol: f64) -> Trend {
    if inner.iter().any(|e| e.status == InnerStatus::Diverging) {
        return Trend::Diverges;
    }
    let lim: Vec<f64> = inner.iter().map(|e| if e.status == InnerStatus::Vanishing { 0.0 } else { e.value }).collect();
    let n = lim.len();
    let estimate = lim[n.saturating_sub(2)..].iter().fold(0.0f64, |m, &v| m.max(v));
    if estimate <= zero_tol {
        return Trend::TendsToZero;
    }
    let increasing = lim.windows(2).all(|w| w[1] >= w[0]);
    if increasing && lim[n - 1] > 4.0 * lim[0] {
        return Trend::Diverges;
    }
    let l: Vec<f64> = space.iter().map(|r| -r.ln()).collect();
    let decreasing = lim.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12));
    let extrapolated = if n >= 3 { aitken(lim[n - 3], lim[n - 2], lim[n - 1]).unwrap_or(lim[n - 1]) } else { lim[n - 1] }.max(0.0);
    if decreasing && (extrapolated <= zero_tol.max(1e-6 * lim[0]) || reciprocal_vanishes(&lim, &l, zero_tol)) {
        return Trend::TendsToZero;
    }
    Trend::TendsToPositive { estimate, extrapolated }
}

fn side_flags<T: Real>(u: &SolutionField<T>, pts: &[Complex<T>], t_top: T, mu: &WeightFn<T>, zero_tol: f64) -> SideFlags {
    let times: Vec<T> = geometric_inclusive(t_top * lit(1e-9), t_top, 19).into_iter().rev().collect();
    let sups: Vec<f64> = times.iter().map(|&t| sup_abs(u, &[t], pts).map(to_f64).unwrap_or(f64::INFINITY)).collect();
    let l: Vec<f64> = times.iter().map(|t| -to_f64(*t).ln()).collect();
    let monotone = sups.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + zero_tol);
    let to_zero = monotone && reciprocal_vanishes(&sups, &l, zero_tol);
    let mus: Vec<f64> = times.iter().map(|&t| mu.eval(t).map(to_f64).unwrap_or(f64::NAN)).collect();
    let k = sups.len();
    let rate = sups[k - 4..].iter().all(|&s| s > 0.0 && s.is_finite()).then(|| {
        (k - 4..k - 1).fold(f64::INFINITY, |m, i| m.min((sups[i + 1] / sups[i]).ln() / (mus[i + 1] / mus[i]).ln()))
    });
    let bounded = match rate {
        Some(r) => r.is_finite() && r >= 0.05,
        None => sups[k - 4..].iter().all(|&s| s <= zero_tol),
    };
    SideFlags { sup_tends_to_zero: to_zero, mu_power_rate: rate.filter(|r| r.is_finite()), mu_power_bounded: bounded }
}

/// Estimates the criterion from the `Q` table over the given ladders.
/// `space` holds radii for discs and `eta` values in `(0,1]` for sectors;
/// both ladders are expected in descending order.
pub fn audit<T: Real>(u: &SolutionField<T>, dom: AuditDomain<T>, space: &[T], sigma: &[T], weight: &WeightFn<T>, cfg: &AuditConfig) -> AuditReport {
    assert!(!space.is_empty() && !sigma.is_empty());
    let mut q = Vec::with_capacity(space.len());
    let mut failure = None;
    let mut inner = Vec::new();
    let mut notes = Vec::new();
    let sig64: Vec<f64> = sigma.iter().map(|&s| to_f64(s)).collect();
    let mut n_pts = 0;
    for &rung in space {
        let pts = space_samples(dom, rung, cfg);
        n_pts = pts.len();
        let norm = normalizer(dom, rung);
        let mut row = Vec::with_capacity(sigma.len());
        for &s in sigma {
            match sup_abs(u, &window(s, cfg), &pts) {
                Ok(m) => row.push(to_f64(m / norm)),
                Err(f) => {
                    failure.get_or_insert(f);
                    row.push(f64::INFINITY);
                }
            }
        }
        let est = classify_inner(&row, &sig64, cfg.zero_tol);
        if !est.monotone {
            notes.push(format!("Q not monotone in sigma at {} = {}", if matches!(dom, AuditDomain::Disc) { "R" } else { "eta" }, to_f64(rung)));
        }
        inner.push(est);
        q.push(row);
    }
    let space64: Vec<f64> = space.iter().map(|&r| to_f64(r)).collect();
    let trend = outer_trend(&inner, &space64, cfg.zero_tol);
    let top_pts = space_samples(dom, space[0], cfg);
    let side = side_flags(u, &top_pts, sigma[0], weight, cfg.zero_tol);
    let (space_name, domain) = match dom {
        AuditDomain::Disc => ("R", "disc".to_string()),
        AuditDomain::Sector(s) => ("eta", format!("sector(theta={}, R={})", to_f64(s.theta()), to_f64(s.radius()))),
    };
    AuditReport {
        schema: SCHEMA.to_string(),
        solution: u.name.clone(),
        provenance: u.provenance,
        domain,
        ladders: Ladders {
            space_name: space_name.to_string(),
            space: space64,
            sigma: sig64,
            window_decades: cfg.window_decades,
            n_times: cfg.n_times,
            space_points: n_pts,
        },
        q,
        inner,
        trend,
        side,
        failure,
        flags: None,
        comparison: None,
        verdict: None,
        notes,
    }
}

/// `Q(R, sigma) = sup_{(0,sigma) x D_R} |u| / R^2` over the ladders.
pub fn audit_disc<T: Real>(u: &SolutionField<T>, r_ladder: &[T], sigma_ladder: &[T], weight: &WeightFn<T>, cfg: &AuditConfig) -> AuditReport {
    audit(u, AuditDomain::Disc, r_ladder, sigma_ladder, weight, cfg)
}

/// `Q(eta, sigma) = sup_{(0,sigma) x S(eta theta, eta R)} |u| / eta^2`.
pub fn audit_sector<T: Real>(u: &SolutionField<T>, s: Sector<T>, eta_ladder: &[T], sigma_ladder: &[T], weight: &WeightFn<T>, cfg: &AuditConfig) -> AuditReport {
    audit(u, AuditDomain::Sector(s), eta_ladder, sigma_ladder, weight, cfg)
}

/// Domain and ladders for a problem: its sector if it has one, else the
/// disc of radius `R0`; default ladders unless given.
pub fn plan<T: Real>(pde: &PdeSpec<T>, space: Option<Vec<T>>, sigma: Option<Vec<T>>) -> (AuditDomain<T>, Vec<T>, Vec<T>) {
    let (dom, top) = match pde.sector {
        Some(s) => (AuditDomain::Sector(s), 2.0),
        None => (AuditDomain::Disc, to_f64(pde.r0)),
    };
    let (r, s) = default_ladders(top, to_f64(pde.t0));
    let space = space.unwrap_or_else(|| r.into_iter().map(lit).collect());
    let sigma = sigma.unwrap_or_else(|| s.into_iter().map(lit).collect());
    (dom, space, sigma)
}

/// Standing hypotheses for the classified case.
pub fn hypotheses_hold(cc: &CaseClass<impl Real>) -> bool {
    let f = &cc.flags;
    f.re_lambda00_negative && cc.supported_shape && f.re_c_nonpositive.unwrap_or(true) && f.c00_negative.unwrap_or(true)
}

/// Base solution `u0`: the formal series to order `(m, n)` when it builds,
/// otherwise zero when the forcing `F(t,x,0,0)` vanishes identically.
pub fn base_solution<T: Real>(pde: &PdeSpec<T>, cc: &CaseClass<T>, m: usize, n: usize) -> Option<SolutionField<T>> {
    if let Ok(s) = build_solution(pde, cc, &BuildOptions::new(m, n)) {
        return Some(SolutionField::from_series("u0", s));
    }
    let forcing = pde.rhs.subst(Var::U, &Expr::zero()).subst(Var::V, &Expr::zero());
    forcing.is_zero().then(|| SolutionField::from_series("u0", DoubleSeries::zero(m, n, pde.euler_form)))
}

/// Audits `u`, compares it with `u0` near `t = 0`, and combines both with
/// the hypothesis flags into a verdict.
pub fn verdict<T: Real>(
    pde: &PdeSpec<T>,
    cc: &CaseClass<T>,
    u: &SolutionField<T>,
    u0: &SolutionField<T>,
    dom: AuditDomain<T>,
    space: &[T],
    sigma: &[T],
    cfg: &AuditConfig,
) -> AuditReport {
    let mut rep = audit(u, dom, space, sigma, &pde.weight, cfg);
    let t_lo = *sigma.last().expect("nonempty ladder") * lit(1e-2);
    let a2_grid = Grid { times: geometric_inclusive(t_lo, pde.t0, 25), points: space_samples(dom, space[0], cfg) };
    let (forcing_bounded, drift_bounded) = match check_a2(pde, cc, &a2_grid) {
        Ok(r) => (r.forcing_bounded, r.drift_bounded),
        Err(e) => {
            rep.notes.push(format!("weight conditions not evaluated: {e}"));
            (false, false)
        }
    };
    let ok = hypotheses_hold(cc) && forcing_bounded && drift_bounded;
    rep.flags = Some(VerdictFlags {
        hypotheses: cc.flags,
        case_id: cc.case_id,
        supported_shape: cc.supported_shape,
        forcing_bounded,
        drift_bounded,
        hypotheses_ok: ok,
    });

    let rung = *space.last().expect("nonempty ladder");
    let pts = space_samples(dom, rung, cfg);
    let t_hi = *sigma.first().expect("nonempty ladder");
    let times = geometric_inclusive(t_hi * lit(1e-4), t_hi, 9);
    let mut diff = T::zero();
    for &t in &times {
        for &x in &pts {
            let d = (u.u(t, x) - u0.u(t, x)).norm();
            diff = if d.is_finite() { diff.max(d) } else { T::infinity() };
        }
    }
    let diff = to_f64(diff);
    rep.comparison = Some(Comparison { against: u0.name.clone(), sup_diff: diff, t_range: [to_f64(times[0]), to_f64(t_hi)], points: pts.len() });

    let v = if !cc.supported_shape {
        rep.notes.push("equation shape outside the supported cases".into());
        Verdict::Inconclusive
    } else if !ok {
        Verdict::HypothesesFail
    } else {
        match rep.trend {
            Trend::TendsToZero if diff > 10.0 * cfg.audit_tol => {
                rep.notes.push("criterion holds numerically but u differs from u0".into());
                Verdict::Inconclusive
            }
            Trend::TendsToZero => Verdict::UniquenessApplies,
            _ => Verdict::CriterionFails,
        }
    };
    rep.verdict = Some(v);
    rep
}

#[cfg(test)]
mod tests;
