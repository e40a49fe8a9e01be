use num_complex::Complex;

use super::*;
use crate::classify::{classify, ClassifyOptions};
use crate::expr::{parse, PdeSpec};
use crate::grid::Grid;
use crate::series::{build_solution, BuildOptions};

type C = Complex<f64>;

fn field(src: &str) -> SolutionField<f64> {
    SolutionField::from_expr(src, parse(src).unwrap())
}

fn pde(rhs: &str, euler: bool) -> PdeSpec<f64> {
    PdeSpec::simple(parse(rhs).unwrap(), euler)
}

fn run_disc(u: &SolutionField<f64>) -> AuditReport {
    let p = pde("0", false);
    let (dom, r, s) = plan(&p, None, None);
    audit(u, dom, &r, &s, &p.weight, &AuditConfig::default())
}

fn sector() -> Sector<f64> {
    Sector::new(0.2, 0.1).unwrap()
}

fn run_sector(u: &SolutionField<f64>) -> AuditReport {
    let p = pde("0", true).with_sector(sector());
    let (dom, r, s) = plan(&p, None, None);
    audit(u, dom, &r, &s, &p.weight, &AuditConfig::default())
}

#[test]
fn quarter_square_gives_one_quarter() {
    let rep = run_disc(&field("x^2/4"));
    match rep.trend {
        Trend::TendsToPositive { estimate, .. } => assert!((estimate - 0.25).abs() < 1e-12),
        ref t => panic!("{t:?}"),
    }
    assert!(rep.q.iter().flatten().all(|&v| (v - 0.25).abs() < 1e-12));
    assert!(rep.inner.iter().all(|e| e.status == InnerStatus::Positive && e.monotone));
}

#[test]
fn zero_tends_to_zero() {
    let rep = run_disc(&SolutionField::zero());
    assert_eq!(rep.trend, Trend::TendsToZero);
    assert!(rep.side.sup_tends_to_zero && rep.side.mu_power_bounded);
    assert_eq!(rep.estimate(), 0.0);
}

#[test]
fn x_over_t_diverges() {
    let rep = run_disc(&field("x/t"));
    assert_eq!(rep.trend, Trend::Diverges);
    assert!(rep.inner.iter().all(|e| e.status == InnerStatus::Diverging));
    let rep = run_sector(&field("x/t"));
    assert_eq!(rep.trend, Trend::Diverges);
}

#[test]
fn pole_in_grid_is_located() {
    let rep = run_disc(&field("1/(x-0.25)"));
    assert_eq!(rep.trend, Trend::Diverges);
    let f = rep.failure.expect("failure recorded");
    assert!((f.x[0] - 0.25).abs() < 1e-12 && f.x[1].abs() < 1e-12);
}

#[test]
fn linear_in_t_vanishes() {
    let rep = run_disc(&field("t/2 + t*x"));
    assert_eq!(rep.trend, Trend::TendsToZero);
    assert!(rep.inner.iter().all(|e| e.status == InnerStatus::Vanishing));
    let rep = run_sector(&field("t*(1+x)"));
    assert_eq!(rep.trend, Trend::TendsToZero);
}

#[test]
fn logarithmic_decay_vanishes() {
    let rep = run_disc(&field("x/(5-log(t))"));
    assert!(rep.inner.iter().all(|e| e.status == InnerStatus::Vanishing));
    assert_eq!(rep.trend, Trend::TendsToZero);
    assert!(rep.side.sup_tends_to_zero);
    assert!(!rep.side.mu_power_bounded);
}

#[test]
fn power_decay_meets_side_conditions() {
    let rep = run_disc(&field("t^2*(1+x)"));
    assert!(rep.side.sup_tends_to_zero && rep.side.mu_power_bounded);
    assert!((rep.side.mu_power_rate.unwrap() - 2.0).abs() < 1e-6);
}

#[test]
fn cubic_tends_to_zero_over_radii() {
    let rep = run_disc(&field("x^3"));
    assert_eq!(rep.trend, Trend::TendsToZero);
}

#[test]
fn linear_in_x_diverges_over_radii() {
    let rep = run_disc(&field("x"));
    assert_eq!(rep.trend, Trend::Diverges);
}

#[test]
fn criterion_sensitivity() {
    for c in [0.25, 1.0, 0.75] {
        let rep = run_disc(&field(&format!("{c}*x^2")));
        assert!((rep.estimate() - c).abs() < 1e-12, "{c}");
    }
}

#[test]
fn positive_homogeneity() {
    let base = run_disc(&field("x^2/4 + x^3"));
    let scaled = run_disc(&field("3*(x^2/4 + x^3)"));
    for (a, b) in base.q.iter().flatten().zip(scaled.q.iter().flatten()) {
        assert!((3.0 * a - b).abs() <= 1e-15 * b);
    }
}

#[test]
fn report_json_round_trip() {
    let rep = run_disc(&field("x^2/4"));
    let s = serde_json::to_string(&rep).unwrap();
    assert!(s.contains("\"schema\":\"audit-v1\"") && s.contains("\"Q\":[["));
    let back: AuditReport = serde_json::from_str(&s).unwrap();
    assert_eq!(back, rep);
}

#[test]
fn derivative_consistency() {
    let pts: Vec<(f64, C)> = (1..8).map(|k| (0.01 * k as f64, C::from_polar(0.05 * k as f64 / 8.0, k as f64))).collect();
    for f in ["x^2/4", "x*t/(5-t)", "1/(5-log(t))", "exp(x)*t"] {
        assert!(field(f).derivative_check(&pts) < 1e-6, "{f}");
    }
    let bb = SolutionField::from_fn("box", |t: f64, x: C| (x * 2.0).exp() * t);
    assert!(bb.derivative_check(&pts) < 1e-6);
    let e = field("exp(2*x)*t");
    for &(t, x) in &pts {
        assert!((bb.ut(t, x) - e.ut(t, x)).norm() < 1e-7);
    }
}

#[test]
fn series_field_matches_expression() {
    let p = pde("-u + t + v^2", false);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let s = build_solution(&p, &cc, &BuildOptions::new(4, 4)).unwrap();
    let sf = SolutionField::from_series("u0", s);
    let ex = field("t/2");
    for k in 1..5 {
        let (t, x) = (0.05 * k as f64, C::new(0.01 * k as f64, 0.02));
        assert!((sf.u(t, x) - ex.u(t, x)).norm() < 1e-15);
        assert!((sf.ut(t, x) - ex.ut(t, x)).norm() < 1e-14);
    }
}

fn grid() -> Grid<f64> {
    Grid::disc(1e-3, 0.3, 30, Disc::new(0.1).unwrap(), 4, 16)
}

#[test]
fn hadamard_of_quarter_square() {
    let p = pde("-u + v^2", false);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let (u0, u) = (SolutionField::zero(), field("x^2/4"));
    let h = Hadamard::new(&p);
    let x = C::new(0.06, -0.03);
    let k = h.coefficients(&u0, &u, 0.1, x).unwrap();
    assert!((k.a_total + 1.0).norm() < 1e-15);
    assert!((k.b_total - x / 2.0).norm() < 1e-15);
    let f = hadamard_fields(&p, &cc, &u0, &u, 0.4);
    assert!(((f.b)(0.1, x) - x / 2.0).norm() < 1e-15);
    assert!((f.a)(0.1, x).norm() < 1e-15);
    assert!(((f.ell)(0.1, x) - C::new(0.5, 0.0)).norm() < 1e-10);
    assert!((f.gamma)(0.1, x).norm() < 1e-10);
    // t w_t - b w_x = -x^2/4 = (lambda + a) w
    let lhs = u.ut(0.1, x) * 0.1 - (f.b)(0.1, x) * u.ux(0.1, x);
    assert!((lhs + x * x / 4.0).norm() < 1e-15);
    assert!(h.identity_residual_max(&u0, &u, &grid()).unwrap() < 1e-14);
}

#[test]
fn hadamard_of_equal_solutions() {
    let p = pde("-u + t + v^2", false);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let u = field("t/2");
    let f = hadamard_fields(&p, &cc, &u, &u, 0.4);
    let x = C::new(0.03, 0.01);
    assert!((f.a)(0.2, x).norm() < 1e-15);
    assert!((f.b)(0.2, x).norm() < 1e-15);
    assert_eq!(Hadamard::new(&p).identity_residual(&u, &u, 0.2, x).unwrap(), C::new(0.0, 0.0));
}

#[test]
fn hadamard_regular_and_euler_splits() {
    // Case 2: B = -x + q, c = -1, so b = q = 3x/2 for u = 3x^2/4
    let p = pde("-u - x*v + v^2", false);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let (u0, u) = (SolutionField::zero(), field("3*x^2/4"));
    let f = hadamard_fields(&p, &cc, &u0, &u, 0.4);
    let x = C::new(0.04, 0.02);
    assert!(((f.b)(0.1, x) - x * 1.5).norm() < 1e-14);
    assert!(((f.c)(0.1, x) + 1.0).norm() < 1e-14);
    assert!(Hadamard::new(&p).identity_residual_max(&u0, &u, &grid()).unwrap() < 1e-13);

    // Case 3 Euler with p = 1: t u_t = -u - x (x u_x) + t (x u_x)^2
    let p = pde("-u - x*v + t*v^2", true);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let u = field("x/t");
    let f = hadamard_fields(&p, &cc, &u0, &u, 0.4);
    let x = C::new(0.05, 0.01);
    // B = -x + t q with q = x u_x = x/t, so b = B + x = x
    assert!(((f.b)(0.1, x) - x).norm() < 1e-12);
    assert!(Hadamard::new(&p).identity_residual_max(&u0, &u, &grid()).unwrap() < 1e-9);
}

#[test]
fn verdicts() {
    let p = pde("-u + v^2", false);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let (dom, r, s) = plan(&p, None, None);
    let cfg = AuditConfig::default();
    let zero = SolutionField::zero();
    let rep = verdict(&p, &cc, &zero, &zero, dom, &r, &s, &cfg);
    assert_eq!(rep.verdict, Some(Verdict::UniquenessApplies));
    assert_eq!(rep.comparison.as_ref().unwrap().sup_diff, 0.0);
    let rep = verdict(&p, &cc, &field("x^2/4"), &zero, dom, &r, &s, &cfg);
    assert_eq!(rep.verdict, Some(Verdict::CriterionFails));
    assert!(rep.comparison.unwrap().sup_diff > 1e-4);

    let p = pde("u*v", false);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let rep = verdict(&p, &cc, &field("x/(5-log(t))"), &zero, dom, &r, &s, &cfg);
    assert_eq!(rep.verdict, Some(Verdict::HypothesesFail));
    assert_eq!(rep.trend, Trend::TendsToZero);
    assert_eq!(Verdict::HypothesesFail.exit_code(), 6);
}
