//! The `problem-v1` input file.

use std::path::Path;

use anyhow::{bail, ensure, Context, Result};
use serde::{Deserialize, Serialize};
use singpde::characteristics::FieldExprs;
use singpde::expr::{parse, Expr, Var};
use singpde::grid::{disc_points, geometric_inclusive, sector_points};
use singpde::weight::WeightKind;
use singpde::{Disc, FieldSpec64, Grid64, PdeSpec64, Sector, SolutionField64, WeightFn};

pub const SCHEMA: &str = "problem-v1";

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemFile {
    #[serde(default)]
    pub schema: Option<String>,
    pub rhs: String,
    pub euler_form: bool,
    pub weight: WeightDoc,
    pub domain: DomainDoc,
    #[serde(default)]
    pub sector: Option<SectorDoc>,
    #[serde(default)]
    pub solutions: Vec<SolutionDoc>,
    #[serde(default)]
    pub ladders: LaddersDoc,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub field: Option<FieldExprs>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum WeightDoc {
    Power { alpha: f64 },
    LogPower { beta: f64 },
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct DomainDoc {
    #[serde(rename = "T0")]
    pub t0: f64,
    #[serde(rename = "R0")]
    pub r0: f64,
    pub rho0: f64,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SectorDoc {
    pub theta: f64,
    #[serde(rename = "R")]
    pub r: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionDoc {
    pub name: String,
    pub expr: String,
}

/// Audit ladders: `space` holds radii `R` (disc) or scale factors `eta`
/// (sector), `sigma` the time cut-offs; both strictly decreasing.
#[derive(Debug, Clone, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct LaddersDoc {
    #[serde(default)]
    pub space: Option<Vec<f64>>,
    #[serde(default)]
    pub sigma: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Threshold on Taylor coefficients of `dF/dv` when classifying.
    pub classify: f64,
    /// Denominators below this are resonances.
    pub resonance: f64,
    /// Per-step tolerance of the characteristic integrator.
    pub trace: f64,
    /// Audit values at or below this count as zero.
    pub zero: f64,
    /// Allowed `sup |u - u0|` for a uniqueness verdict.
    pub audit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { classify: 1e-9, resonance: 1e-8, trace: 1e-10, zero: 1e-10, audit: 1e-6 }
    }
}

/// A validated problem.
pub struct Problem {
    pub doc: ProblemFile,
    pub pde: PdeSpec64,
    pub solutions: Vec<SolutionField64>,
    pub field: Option<FieldSpec64>,
}

fn only_t_x(e: &Expr<f64>) -> bool {
    !e.depends_on(Var::U) && !e.depends_on(Var::V)
}

fn check_ladder(name: &str, v: &[f64]) -> Result<()> {
    ensure!(!v.is_empty(), "ladders.{name} is empty");
    ensure!(v.iter().all(|x| x.is_finite() && *x > 0.0), "ladders.{name} must be positive");
    ensure!(v.windows(2).all(|w| w[1] < w[0]), "ladders.{name} must be strictly decreasing");
    Ok(())
}

impl Problem {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: ProblemFile = serde_json::from_str(text).context("schema error")?;
        if let Some(s) = &doc.schema {
            ensure!(s == SCHEMA, "schema error: expected \"{SCHEMA}\", got \"{s}\"");
        }
        let rhs = parse(&doc.rhs).context("rhs")?;
        let kind = match doc.weight {
            WeightDoc::Power { alpha } => WeightKind::Power { alpha },
            WeightDoc::LogPower { beta } => WeightKind::LogPower { beta },
        };
        let d = doc.domain;
        let weight = WeightFn::new(kind, d.t0).context("weight")?;
        let mut pde = PdeSpec64::new(rhs, doc.euler_form, weight, d.t0, d.r0, d.rho0).context("domain")?;
        if let Some(s) = doc.sector {
            pde = pde.with_sector(Sector::new(s.theta, s.r).context("sector")?);
        }
        let mut solutions = Vec::with_capacity(doc.solutions.len());
        for s in &doc.solutions {
            if solutions.iter().any(|u: &SolutionField64| u.name == s.name) {
                bail!("duplicate solution name \"{}\"", s.name);
            }
            let e = parse(&s.expr).with_context(|| format!("solution \"{}\"", s.name))?;
            ensure!(only_t_x(&e), "solution \"{}\" may use only t and x", s.name);
            solutions.push(SolutionField64::from_expr(s.name.clone(), e));
        }
        if let Some(v) = &doc.ladders.space {
            check_ladder("space", v)?;
        }
        if let Some(v) = &doc.ladders.sigma {
            check_ladder("sigma", v)?;
        }
        let t = doc.tolerances;
        for (name, v) in [("classify", t.classify), ("resonance", t.resonance), ("trace", t.trace), ("zero", t.zero), ("audit", t.audit)] {
            ensure!(v.is_finite() && v > 0.0, "tolerances.{name} must be positive");
        }
        let field = match &doc.field {
            Some(f) => {
                ensure!(f.a_decay.is_finite() && f.a_decay > 0.0, "field.a_decay must be positive");
                let slots = [&f.b, &f.c, &f.lambda, &f.a, &f.gamma, &f.ell];
                for src in slots.into_iter().flatten() {
                    let e = parse(src).context("field")?;
                    ensure!(only_t_x(&e), "field coefficient \"{src}\" may use only t and x");
                }
                Some(f.build::<f64>().context("field")?)
            }
            None => None,
        };
        Ok(Self { doc, pde, solutions, field })
    }

    pub fn solution(&self, name: &str) -> Result<&SolutionField64> {
        match self.solutions.iter().find(|u| u.name == name) {
            Some(u) => Ok(u),
            None => {
                let known: Vec<&str> = self.solutions.iter().map(|u| u.name.as_str()).collect();
                bail!("no solution named \"{name}\" (known: {})", known.join(", "))
            }
        }
    }

    /// 30 geometric times in `[1e-3 T, T]` with `T = min(0.3, T0)`, times
    /// 64 points of the disc of radius `min(0.1, R0)` or of the sector.
    pub fn standard_grid(&self) -> Grid64 {
        let hi = self.pde.t0.min(0.3);
        let times = geometric_inclusive(hi * 1e-3, hi, 30);
        let points = match self.pde.sector {
            Some(s) => sector_points(s, 8, 8, 1e-3, 1e-2),
            None => disc_points(Disc::new(self.pde.r0.min(0.1)).expect("positive radius"), 3, 21, 1e-3),
        };
        Grid64 { times, points }
    }
}
