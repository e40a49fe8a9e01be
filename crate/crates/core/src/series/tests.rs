use super::*;
use crate::classify::{classify, ClassifyOptions};
use crate::expr::parse;
use crate::geometry::Disc;
use crate::scalar::cplx;

fn spec(s: &str, euler: bool) -> PdeSpec<f64> {
    PdeSpec::simple(parse(s).unwrap(), euler)
}

fn build(s: &str, euler: bool, m: usize, n: usize) -> Result<DoubleSeries<f64>, SeriesError> {
    let p = spec(s, euler);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    build_solution(&p, &cc, &BuildOptions::new(m, n))
}

fn small_grid() -> Grid<f64> {
    Grid::disc(1e-3, 0.3, 30, Disc::new(0.1).unwrap(), 4, 16)
}

#[test]
fn synthetic_linear_witness() {
    let s = build("-u + t + v^2", false, 6, 6).unwrap();
    assert_eq!(s.get(1, 0), cplx(0.5, 0.0));
    for (i, j, c) in s.iter() {
        if (i, j) != (1, 0) {
            assert!(c.norm() < 1e-12, "u_{i}{j} = {c}");
        }
    }
    assert!(residual(&spec("-u + t + v^2", false), &s, &small_grid()).unwrap() < 1e-14);
}

#[test]
fn zero_forcing_gives_zero_series() {
    let s = build("-u + v^2", false, 5, 5).unwrap();
    assert!(s.iter().all(|(_, _, c)| c == cplx(0.0, 0.0)));
    assert_eq!(residual(&spec("-u + v^2", false), &s, &small_grid()).unwrap(), 0.0);
}

#[test]
fn resonance_is_reported_exactly() {
    match build("2*u - x*v", false, 4, 4) {
        Err(SeriesError::Resonance(r)) => {
            let mut ij: Vec<_> = r.iter().map(|r| (r.i, r.j)).collect();
            ij.sort();
            assert_eq!(ij, vec![(1, 1), (2, 0)]);
        }
        other => panic!("expected resonance, got {other:?}"),
    }
}

#[test]
fn corrupted_coefficient_shows_in_residual() {
    let p = spec("-u + t + v^2", false);
    let mut s = build("-u + t + v^2", false, 3, 3).unwrap();
    s.set(1, 0, s.get(1, 0) + cplx(1e-3, 0.0));
    for &t in &[1e-3, 0.01, 0.2] {
        for x in [cplx(0.0, 0.0), cplx(0.05, 0.02)] {
            assert!(residual_at(&p, &s, t, x).unwrap().norm() >= 1e-3 * t * (1.0 - 1e-9));
        }
    }
}

#[test]
fn evaluation_examples() {
    let z = DoubleSeries::<f64>::zero(3, 3, false);
    assert_eq!(z.eval(0.4, cplx(0.3, 0.1)), cplx(0.0, 0.0));
    let mut s = DoubleSeries::zero(2, 2, false);
    s.set(1, 0, cplx(0.5, 0.0));
    assert!((s.eval(0.2, cplx(0.5, 0.0)) - cplx(0.1, 0.0)).norm() < 1e-16);
    let mut s = DoubleSeries::zero(2, 2, false);
    s.set(1, 1, cplx(1.0, 0.0));
    assert!((s.eval(0.1, cplx(0.0, 2.0)) - cplx(0.0, 0.2)).norm() < 1e-16);
    assert_eq!(s.eval(0.0, cplx(3.0, 1.0)), cplx(0.0, 0.0));
}

#[test]
fn nonpolynomial_case_two() {
    let src = "-u - x*v + t*exp(x) + u*v + log(1 + t*x)";
    let p = spec(src, false);
    let s = build(src, false, 8, 8).unwrap();
    let g = Grid::disc(1e-3, 0.02, 5, Disc::new(0.02).unwrap(), 2, 8);
    assert!(residual(&p, &s, &g).unwrap() < 1e-12);
}

#[test]
fn euler_case_two() {
    let src = "-u - v + t*(1 + x) + v^2";
    let p = spec(src, true);
    let s = build(src, true, 8, 8).unwrap();
    let g = Grid::disc(1e-3, 0.02, 5, Disc::new(0.02).unwrap(), 2, 8);
    assert!(residual(&p, &s, &g).unwrap() < 1e-12);
}

#[test]
fn shape_errors() {
    assert!(matches!(build("-u + 1 + x", false, 3, 3), Err(SeriesError::Shape(_))));
    assert!(matches!(build("-u + t + (1+t)*v", false, 3, 3), Err(SeriesError::Shape(_))));
    assert!(matches!(build("-u - x*v + t*v^2", true, 3, 3), Err(SeriesError::UnsupportedCase(3))));
}

#[test]
fn near_resonance_warns() {
    let s = build("(1 - 1e-4)*u + t", false, 3, 3).unwrap();
    // Case 1: the denominator i - lambda does not depend on j
    assert_eq!(s.warnings.len(), 6);
    assert!(s.warnings.iter().all(|w| w.i == 1 && (w.denominator - 1e-4).abs() < 1e-12));
    assert!((s.get(1, 0) - cplx(1e4, 0.0)).norm() < 1e-6);
}

#[test]
fn doc_round_trip() {
    let s = build("-u - x*v + t*exp(x) + u*v", false, 4, 5).unwrap();
    let back = DoubleSeries::from_doc(&s.to_doc()).unwrap();
    assert_eq!(back, s);
}
