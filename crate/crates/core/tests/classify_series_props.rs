use proptest::prelude::*;
use singpde::classify::{classify, ClassifyOptions};
use singpde::expr::parse;
use singpde::series::{build_solution, residual_at, resonances, BuildOptions, SeriesError};
use singpde::{PdeSpec64, C64};

fn pde(src: &str, euler: bool) -> PdeSpec64 {
    PdeSpec64::simple(parse(src).unwrap(), euler)
}

fn lit(v: f64) -> String {
    format!("({v:?})")
}

/// `lambda u + (beta t + c0 x^j + d x^(j+1)) v`, plus optional nonlinear terms.
fn linear_part(lambda: f64, beta: f64, c0: f64, d: f64, j: Option<u32>) -> String {
    let g = match j {
        Some(j) => format!("{}*t + {}*x^{j} + {}*x^{}", lit(beta), lit(c0), lit(d), j + 1),
        None => format!("{}*t", lit(beta)),
    };
    format!("{}*u + ({g})*v", lit(lambda))
}

fn nonlinear() -> impl Strategy<Value = String> {
    (-2.0f64..2.0, -2.0f64..2.0, -2.0f64..2.0, 0.0f64..1.0)
        .prop_map(|(a, b, c, e)| format!(" + {}*u^2 + {}*u*v*(1 + x) + {}*v^2*t + {}*u^3", lit(a), lit(b), lit(c), lit(e)))
}

fn away_from_zero() -> impl Strategy<Value = f64> {
    prop_oneof![-3.0f64..-0.5, 0.5f64..3.0]
}

proptest! {
    #[test]
    fn case_follows_first_x_power(lambda in -3.0f64..3.0, beta in -1.0f64..1.0, c0 in away_from_zero(), d in -1.0f64..1.0, j in prop::option::of(1u32..4)) {
        let cc = classify(&pde(&linear_part(lambda, beta, c0, d, j), false), &ClassifyOptions::default()).unwrap();
        let (case, p) = match j {
            None => (1, None),
            Some(1) => (2, Some(0)),
            Some(j) => (3, Some(j - 1)),
        };
        prop_assert_eq!(cc.case_id, case);
        prop_assert_eq!(cc.p, p);
        prop_assert!((cc.lambda00 - C64::new(lambda, 0.0)).norm() < 1e-12);
        if j.is_some() {
            prop_assert!((cc.c00.unwrap() - C64::new(c0, 0.0)).norm() < 1e-9);
        }
        prop_assert_eq!(cc.flags.re_lambda00_negative, lambda < 0.0);
    }

    #[test]
    fn nonlinear_terms_do_not_change_the_class(lambda in -3.0f64..3.0, beta in -1.0f64..1.0, c0 in away_from_zero(), d in -1.0f64..1.0, j in prop::option::of(1u32..4), extra in nonlinear()) {
        let base = linear_part(lambda, beta, c0, d, j);
        let a = classify(&pde(&base, false), &ClassifyOptions::default()).unwrap();
        let b = classify(&pde(&format!("{base}{extra}"), false), &ClassifyOptions::default()).unwrap();
        prop_assert_eq!(a.case_id, b.case_id);
        prop_assert_eq!(a.p, b.p);
        prop_assert_eq!(a.lambda00, b.lambda00);
        prop_assert_eq!(a.c00, b.c00);
        prop_assert_eq!(a.flags, b.flags);
    }

    #[test]
    fn euler_case_follows_power_of_c(lambda in -3.0f64..3.0, beta in -1.0f64..1.0, c0 in away_from_zero(), p in 0u32..4) {
        let src = format!("{}*u + ({}*t + {}*x^{p})*v", lit(lambda), lit(beta), lit(c0));
        let cc = classify(&pde(&src, true), &ClassifyOptions::default()).unwrap();
        prop_assert_eq!(cc.case_id, if p == 0 { 2 } else { 3 });
        prop_assert_eq!(cc.p, Some(p));
        prop_assert!((cc.c00.unwrap() - C64::new(c0, 0.0)).norm() < 1e-9);
    }

    /// Either the build reports exactly the predicted resonances, or the
    /// series solves the equation to the truncation order.
    #[test]
    fn series_dichotomy(i0 in 1usize..4, j0 in 0usize..4, c0 in -2.0f64..-0.1, jitter in prop_oneof![Just(0.0), -0.5f64..0.5], f1 in -1.0f64..1.0, f2 in -1.0f64..1.0) {
        let lambda = i0 as f64 - j0 as f64 * c0 + jitter;
        let src = format!("{}*u + {}*x*v + {}*t + {}*x*t + u*v + v^2", lit(lambda), lit(c0), lit(f1), lit(f2));
        let p = pde(&src, false);
        let cc = classify(&p, &ClassifyOptions::default()).unwrap();
        let (m, n) = (3, 3);
        let opts = BuildOptions::new(m, n);
        let predicted = resonances(cc.lambda00, cc.c00.unwrap(), m, n, opts.res_tol);
        match build_solution(&p, &cc, &opts) {
            Err(SeriesError::Resonance(r)) => {
                prop_assert!(!predicted.is_empty());
                prop_assert_eq!(r, predicted);
            }
            Ok(s) => {
                prop_assert!(predicted.is_empty());
                // residual starts at total degree 4 and shrinks like eps^4
                let r1 = residual_at(&p, &s, 1e-2, C64::new(1e-2, 5e-3)).unwrap().norm();
                let r2 = residual_at(&p, &s, 5e-3, C64::new(5e-3, 2.5e-3)).unwrap().norm();
                prop_assert!(r2 <= r1 / 8.0 + 1e-15, "{r1} -> {r2}");
            }
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }

    #[test]
    fn series_orders_are_consistent(lambda in -3.0f64..-0.2, c0 in -2.0f64..-0.1, f1 in -1.0f64..1.0, f2 in -1.0f64..1.0, m in 1usize..4, n in 0usize..4) {
        let src = format!("{}*u + {}*x*v + {}*t + {}*t*x^2 + u^2 + v^2", lit(lambda), lit(c0), lit(f1), lit(f2));
        let p = pde(&src, false);
        let cc = classify(&p, &ClassifyOptions::default()).unwrap();
        let small = build_solution(&p, &cc, &BuildOptions::new(m, n)).unwrap();
        let big = build_solution(&p, &cc, &BuildOptions::new(m + 1, n + 2)).unwrap();
        for (i, j, v) in small.iter() {
            prop_assert!((v - big.get(i, j)).norm() <= 1e-12 * (1.0 + v.norm()), "u_{i}{j}: {v} vs {}", big.get(i, j));
        }
    }
}

#[test]
fn linear_forcing_gives_geometric_coefficients() {
    // t u_t = -u + t: u = t/2 exactly
    let p = pde("-u + t", false);
    let cc = classify(&p, &ClassifyOptions::default()).unwrap();
    let s = build_solution(&p, &cc, &BuildOptions::new(4, 2)).unwrap();
    for (i, j, v) in s.iter() {
        let want = if (i, j) == (1, 0) { 0.5 } else { 0.0 };
        assert!((v - C64::new(want, 0.0)).norm() < 1e-15);
    }
}
