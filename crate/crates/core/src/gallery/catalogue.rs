use serde::{Deserialize, Serialize};

use crate::audit::Verdict;

/// Free constants of the solution families.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GalleryParams {
    pub alpha: f64,
    pub c: f64,
    pub k: u32,
    /// Multiplier of the flat `t e^{-1/x}/(1-t)` family (G8).
    pub amplitude: f64,
}

impl Default for GalleryParams {
    fn default() -> Self {
        Self { alpha: 0.0, c: 5.0, k: 1, amplitude: 100.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleSolution {
    pub name: String,
    pub expr: String,
    pub expected_verdict: Verdict,
    /// Outer criterion value where it is finite and positive.
    pub expected_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpectedClass {
    pub case_id: u8,
    pub p: Option<u32>,
    pub lambda00: [f64; 2],
    pub c00: Option<[f64; 2]>,
    pub hypotheses_ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum ExpectedSeries {
    /// Built; listed coefficients `(i, j, value)` are nonzero, all others vanish.
    Built { nonzero: Vec<(usize, usize, f64)> },
    Resonance { at: Vec<(usize, usize)> },
    /// Case 3: no series; the base solution is zero because `F(t,x,0,0) = 0`.
    NotBuilt,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExampleCase {
    pub id: String,
    pub description: String,
    pub rhs: String,
    pub euler_form: bool,
    /// `(theta, R)` for entries audited on a sector.
    pub sector: Option<(f64, f64)>,
    pub solutions: Vec<ExampleSolution>,
    pub expected: ExpectedClass,
    pub series: ExpectedSeries,
    /// Listed solutions must differ by more than 1e-3 on the test grid.
    pub witnesses_differ: bool,
    /// Not taken from the literature.
    pub synthetic: bool,
}

fn sol(name: &str, expr: impl Into<String>, v: Verdict, value: Option<f64>) -> ExampleSolution {
    ExampleSolution { name: name.into(), expr: expr.into(), expected_verdict: v, expected_value: value }
}

fn zero(v: Verdict) -> ExampleSolution {
    sol("zero", "0", v, None)
}

fn class(case_id: u8, p: Option<u32>, lambda00: f64, c00: Option<f64>, ok: bool) -> ExpectedClass {
    ExpectedClass { case_id, p, lambda00: [lambda00, 0.0], c00: c00.map(|c| [c, 0.0]), hypotheses_ok: ok }
}

fn zero_series() -> ExpectedSeries {
    ExpectedSeries::Built { nonzero: Vec::new() }
}

/// All entries, ids `G1` to `G11`.
pub fn list(pr: &GalleryParams) -> Vec<ExampleCase> {
    use Verdict::{CriterionFails as Cf, HypothesesFail as Hf, UniquenessApplies as Ua};
    let GalleryParams { alpha, c, k, amplitude } = *pr;
    let kf = k as f64;
    let g1_family = if k == 1 {
        format!("(x + {alpha:?})/({c:?} - log(t))")
    } else {
        format!("{:?}*(x + {alpha:?})*exp(-log({c:?} - log(t))/{kf:?})", (1.0 / kf).powf(1.0 / kf))
    };
    let entry = |id: &str, description: &str, rhs: String, euler: bool, sector: bool, solutions, expected, series, differ| ExampleCase {
        id: id.into(),
        description: description.into(),
        rhs,
        euler_form: euler,
        sector: sector.then_some((0.2, 0.1)),
        solutions,
        expected,
        series,
        witnesses_differ: differ,
        synthetic: false,
    };
    let mut out = vec![
        entry(
            "G1",
            "Re lambda(0,0) = 0: a family of nontrivial solutions decaying like 1/log",
            format!("u*v^{k}"),
            false,
            false,
            vec![zero(Hf), sol("family", g1_family, Hf, None)],
            class(1, None, 0.0, None, false),
            zero_series(),
            false,
        ),
        entry(
            "G2",
            "Case 1 with Re lambda = -1: zero and x^2/4",
            "-u + v^2".into(),
            false,
            false,
            vec![zero(Ua), sol("quarter-square", "x^2/4", Cf, Some(0.25))],
            class(1, None, -1.0, None, true),
            zero_series(),
            true,
        ),
        entry(
            "G3",
            "Case 1 solution x/t blowing up at t = 0",
            "-2*u + x*t*v^2".into(),
            false,
            false,
            vec![zero(Ua), sol("x-over-t", "x/t", Cf, None)],
            class(1, None, -2.0, None, true),
            zero_series(),
            false,
        ),
        entry(
            "G4",
            "Case 2 with Re lambda = 2: zero, t^2 and xt/(c-t)",
            "2*u - x*v + u*v".into(),
            false,
            false,
            vec![zero(Hf), sol("t-squared", "t^2", Hf, None), sol("family", format!("x*t/({c:?} - t)"), Hf, None)],
            class(2, Some(0), 2.0, Some(-1.0), false),
            ExpectedSeries::Resonance { at: vec![(1, 1), (2, 0)] },
            true,
        ),
        entry(
            "G5",
            "Case 2 with Re lambda = 0: solutions 1/(c - log t)",
            "-x*v + u^2 + v^2".into(),
            false,
            false,
            vec![zero(Hf), sol("family", format!("1/({c:?} - log(t))"), Hf, None)],
            class(2, Some(0), 0.0, Some(-1.0), false),
            zero_series(),
            false,
        ),
        entry(
            "G6",
            "Case 2 with Re lambda = -1: zero and 3x^2/4",
            "-u - x*v + v^2".into(),
            false,
            false,
            vec![zero(Ua), sol("three-quarter-square", "3*x^2/4", Cf, Some(0.75))],
            class(2, Some(0), -1.0, Some(-1.0), true),
            zero_series(),
            true,
        ),
        entry(
            "G7",
            "Case 2 solution x/t blowing up at t = 0",
            "-2*u - x*v + 2*x*t*v^2".into(),
            false,
            false,
            vec![zero(Ua), sol("x-over-t", "x/t", Cf, None)],
            class(2, Some(0), -2.0, Some(-1.0), true),
            zero_series(),
            false,
        ),
        entry(
            "G8",
            "Case 3 (p = 1) with Re lambda = 2: zero, t^2 and a flat family in x",
            "2*u - x*v + x*t/(1 - t)*v".into(),
            true,
            true,
            vec![zero(Hf), sol("t-squared", "t^2", Hf, None), sol("family", format!("{amplitude:?}*t*exp(-1/x)/(1 - t)"), Hf, None)],
            class(3, Some(1), 2.0, Some(-1.0), false),
            ExpectedSeries::NotBuilt,
            true,
        ),
        entry(
            "G9",
            "Case 3 (p = 1) with Re lambda = 0: solutions 1/(c - log t)",
            "-x*v + u^2 + v^2".into(),
            true,
            true,
            vec![zero(Hf), sol("family", format!("1/({c:?} - log(t))"), Hf, None)],
            class(3, Some(1), 0.0, Some(-1.0), false),
            ExpectedSeries::NotBuilt,
            false,
        ),
        entry(
            "G10",
            "Case 3 (p = 1) with Re lambda = -1: zero and x/t",
            "-u - x*v + t*v^2".into(),
            true,
            true,
            vec![zero(Ua), sol("x-over-t", "x/t", Cf, None)],
            class(3, Some(1), -1.0, Some(-1.0), true),
            ExpectedSeries::NotBuilt,
            true,
        ),
    ];
    let mut g11 = entry(
        "G11",
        "synthetic Case 1 equation with the exact series solution t/2",
        "-u + t + v^2".into(),
        false,
        false,
        vec![sol("half-t", "t/2", Ua, None)],
        class(1, None, -1.0, None, true),
        ExpectedSeries::Built { nonzero: vec![(1, 0, 0.5)] },
        false,
    );
    g11.synthetic = true;
    out.push(g11);
    out
}

pub fn ids() -> Vec<String> {
    list(&GalleryParams::default()).into_iter().map(|e| e.id).collect()
}

pub fn get(id: &str, pr: &GalleryParams) -> Option<ExampleCase> {
    list(pr).into_iter().find(|e| e.id.eq_ignore_ascii_case(id))
}
