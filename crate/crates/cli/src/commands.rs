use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, Context};
use clap::Args;
use rayon::prelude::*;
use serde::Serialize;

use singpde::audit::{audit as audit_field, base_solution, hadamard_fields, plan, verdict, AuditConfig, AuditReport, Trend};
use singpde::characteristics::{
    gamma_on_trace, phi_factor, sector_reconstruct, trace as trace_char, transport, verify_decay, verify_position, DecayReport, DriftBound,
    DriftShape, PhiReport, PositionReport, ReconstructReport, StepOptions, TraceOptions,
};
use singpde::classify::{classify as classify_pde, CaseSummary, ClassifyError, ClassifyOptions};
use singpde::gallery::{self, Checks, GalleryParams, GalleryReport};
use singpde::series::{build_solution, residual, BuildOptions, Resonance, SeriesDoc, SeriesError};
use singpde::{CaseClass64, Disc, Domain, PhiWeight, TraceStatus, C64};

use crate::problem::Problem;
use crate::Global;

pub const EXIT_GALLERY_FAIL: u8 = 1;
pub const EXIT_INPUT: u8 = 2;
pub const EXIT_INDETERMINATE: u8 = 3;
pub const EXIT_RESONANCE: u8 = 4;
pub const EXIT_INCONCLUSIVE: u8 = 7;

pub struct Failure {
    pub code: u8,
    pub err: anyhow::Error,
}

type Outcome = Result<u8, Failure>;

fn input(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_INPUT, err: err.into() }
}

fn emit<S: Serialize>(v: &S) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(v).map_err(input)?;
    println!("{s}");
    Ok(())
}

fn write_json<S: Serialize>(path: &Path, v: &S) -> Result<(), Failure> {
    let mut s = serde_json::to_string_pretty(v).map_err(input)?;
    s.push('\n');
    std::fs::write(path, s).with_context(|| format!("writing {}", path.display())).map_err(input)
}

fn load(file: &Path) -> Result<Problem, Failure> {
    Problem::load(file).map_err(input)
}

fn classified(p: &Problem) -> Result<CaseClass64, Failure> {
    let opts = ClassifyOptions { tol: p.doc.tolerances.classify, ..ClassifyOptions::default() };
    classify_pde(&p.pde, &opts).map_err(|e| {
        let code = if matches!(e, ClassifyError::Indeterminate { .. }) { EXIT_INDETERMINATE } else { EXIT_INPUT };
        Failure { code, err: anyhow!(e) }
    })
}

fn audit_config(p: &Problem, g: &Global) -> AuditConfig {
    let t = p.doc.tolerances;
    AuditConfig { zero_tol: t.zero, audit_tol: t.audit, ..AuditConfig::default() }.with_density(g.grid_density)
}

#[derive(Serialize)]
struct ClassifyOut {
    schema: &'static str,
    #[serde(flatten)]
    case: CaseSummary,
    hypotheses_ok: bool,
}

pub fn classify(file: &Path, _g: &Global) -> Outcome {
    let p = load(file)?;
    let cc = classified(&p)?;
    emit(&ClassifyOut { schema: "classify-v1", case: cc.summary(), hypotheses_ok: singpde::audit::hypotheses_hold(&cc) })?;
    Ok(0)
}

#[derive(Serialize)]
struct SolveOut {
    #[serde(flatten)]
    series: SeriesDoc,
    case_id: u8,
    residual: f64,
    residual_grid: GridInfo,
}

#[derive(Serialize)]
struct GridInfo {
    t_range: [f64; 2],
    n_times: usize,
    n_points: usize,
}

#[derive(Serialize)]
struct ResonanceOut {
    schema: &'static str,
    status: &'static str,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    resonances: Vec<Resonance>,
}

pub fn solve(file: &Path, m: usize, n: usize, _g: &Global) -> Outcome {
    let p = load(file)?;
    let cc = classified(&p)?;
    let opts = BuildOptions { res_tol: p.doc.tolerances.resonance, ..BuildOptions::new(m, n) };
    match build_solution(&p.pde, &cc, &opts) {
        Ok(s) => {
            let grid = p.standard_grid();
            let res = residual(&p.pde, &s, &grid).map_err(input)?;
            for w in &s.warnings {
                eprintln!("warning: near resonance at ({},{}), |denominator| = {:e}", w.i, w.j, w.denominator);
            }
            let info = GridInfo { t_range: [grid.times[0], grid.times[grid.times.len() - 1]], n_times: grid.times.len(), n_points: grid.points.len() };
            emit(&SolveOut { series: s.to_doc(), case_id: cc.case_id, residual: res, residual_grid: info })?;
            Ok(0)
        }
        Err(SeriesError::Resonance(r)) => {
            for x in &r {
                eprintln!("resonance at ({},{}): |i - lambda(0,0) - j c(0,0)| = {:e}", x.i, x.j, x.denominator);
            }
            emit(&ResonanceOut { schema: singpde::series::SCHEMA, status: "resonance", m, n, resonances: r })?;
            Ok(EXIT_RESONANCE)
        }
        Err(e) => Err(input(e)),
    }
}

#[derive(Args, Debug)]
pub struct TraceArgs {
    pub file: PathBuf,
    /// Starting point as "re" or "re,im".
    #[arg(long, allow_hyphen_values = true)]
    pub xi: String,
    /// Starting time (defaults to T0).
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long, default_value_t = 1e-6)]
    pub tmin: f64,
    /// Use the Hadamard field of this solution against u0 instead of the file's field.
    #[arg(long)]
    pub solution: Option<String>,
    /// Decay rate for the Hadamard field (default -0.4 Re lambda(0,0)).
    #[arg(long)]
    pub a_decay: Option<f64>,
    /// Initial w* as "re" or "re,im"; enables transport for a file field.
    #[arg(long, allow_hyphen_values = true)]
    pub w0: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub q0: Option<String>,
    /// Bound delta on |int b dt/t| for the phi-factor report.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Constants b0,b1,b2 of the drift bound; enables the position report.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    pub drift_bound: Option<Vec<f64>>,
    /// Write the verification reports here instead of stderr.
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Write the CSV here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_complex(s: &str) -> anyhow::Result<C64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |v: &str| v.parse::<f64>().with_context(|| format!("bad number \"{v}\" in \"{s}\""));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(anyhow!("expected \"re\" or \"re,im\", got \"{s}\"")),
    }
}

#[derive(Serialize)]
struct TraceReport {
    schema: &'static str,
    field: &'static str,
    shape: DriftShape,
    a_decay: f64,
    xi: [f64; 2],
    t0: f64,
    t_min: f64,
    status: TraceStatus,
    samples: usize,
    transported: bool,
    decay: Option<DecayReport>,
    position: Option<PositionReport>,
    phi: Option<PhiReport>,
    reconstruct: Option<ReconstructReport>,
}

pub fn trace(a: &TraceArgs, g: &Global) -> Outcome {
    let p = load(&a.file)?;
    let xi = parse_complex(&a.xi).map_err(input)?;
    let t0 = a.t0.unwrap_or(p.pde.t0);
    if !(t0 > 0.0 && a.tmin > 0.0 && a.tmin < t0) {
        return Err(input(anyhow!("need 0 < tmin < t0, got tmin = {}, t0 = {t0}", a.tmin)));
    }
    let dom = match p.pde.sector {
        Some(s) => Domain::Sector(s),
        None => Domain::Disc(Disc::new(p.pde.r0).map_err(input)?),
    };
    if !dom.contains(xi) {
        return Err(input(anyhow!("xi = {xi} lies outside the domain")));
    }

    let mut init = None;
    let (f, source) = match (&a.solution, &p.field) {
        (Some(name), _) => {
            let cc = classified(&p)?;
            let u = p.solution(name).map_err(input)?;
            let u0 = base_solution(&p.pde, &cc, 4, 4).ok_or_else(|| input(anyhow!("no base solution u0 for this equation")))?;
            let a_decay = a.a_decay.unwrap_or(-0.4 * cc.lambda00.re);
            if !(a_decay > 0.0) {
                return Err(input(anyhow!("decay rate must be positive (Re lambda(0,0) = {}); pass --a-decay", cc.lambda00.re)));
            }
            let e = p.pde.euler_form;
            init = Some((u.u(t0, xi) - u0.u(t0, xi), u.v(t0, xi, e) - u0.v(t0, xi, e)));
            (hadamard_fields(&p.pde, &cc, &u0, u, a_decay), "hadamard")
        }
        (None, Some(f)) => (f.clone(), "file"),
        (None, None) => return Err(input(anyhow!("trace needs a \"field\" section in the problem file or --solution"))),
    };
    if init.is_none() {
        if let Some(w0) = &a.w0 {
            let q0 = a.q0.as_deref().map(parse_complex).transpose().map_err(input)?.unwrap_or_default();
            init = Some((parse_complex(w0).map_err(input)?, q0));
        }
    }

    let tol = g.tol.unwrap_or(p.doc.tolerances.trace);
    let mut tr = trace_char(&f, t0, xi, a.tmin, &dom, &TraceOptions::with_tol(tol));
    if let Some((w0, q0)) = init {
        tr = transport(&f, &tr, w0, q0, &StepOptions { tol, ..StepOptions::default() });
    }

    let gamma = gamma_on_trace(&f, &tr);
    let decay = tr.transported.then(|| verify_decay(&tr, f.a_decay, gamma, 100));
    let position = match (&a.drift_bound, tr.transported) {
        (Some(b), true) => {
            let bound = DriftBound { b0: b[0], b1: b[1], b2: b[2] };
            Some(verify_position(&f, &tr, bound, &PhiWeight::closed_form(p.pde.weight), gamma))
        }
        _ => None,
    };
    let (phi, reconstruct) = match f.shape {
        DriftShape::Euler { p } if p > 0 => (Some(phi_factor(&f, &tr, a.delta)), Some(sector_reconstruct(&f, &tr, p))),
        _ => (None, None),
    };

    let csv = tr.to_csv();
    match &a.out {
        Some(path) => std::fs::write(path, &csv).with_context(|| format!("writing {}", path.display())).map_err(input)?,
        None => print!("{csv}"),
    }
    let rep = TraceReport {
        schema: "trace-report-v1",
        field: source,
        shape: f.shape,
        a_decay: f.a_decay,
        xi: [xi.re, xi.im],
        t0,
        t_min: a.tmin,
        status: tr.status.clone(),
        samples: tr.samples.len(),
        transported: tr.transported,
        decay,
        position,
        phi,
        reconstruct,
    };
    match &a.report {
        Some(path) => write_json(path, &rep)?,
        None => eprintln!("{}", serde_json::to_string_pretty(&rep).map_err(input)?),
    }
    Ok(0)
}

fn run_audit(p: &Problem, cc: &CaseClass64, name: &str, against: Option<&str>, cfg: &AuditConfig) -> Result<AuditReport, Failure> {
    let u = p.solution(name).map_err(input)?;
    let base = match against {
        Some(n) => Some(p.solution(n).map_err(input)?.clone()),
        None => base_solution(&p.pde, cc, 4, 4),
    };
    let (dom, space, sigma) = plan(&p.pde, p.doc.ladders.space.clone(), p.doc.ladders.sigma.clone());
    Ok(match base {
        Some(u0) => verdict(&p.pde, cc, u, &u0, dom, &space, &sigma, cfg),
        None => {
            let mut rep = audit_field(u, dom, &space, &sigma, &p.pde.weight, cfg);
            rep.notes.push("no base solution u0: the series does not build and F(t,x,0,0) is not identically zero".into());
            rep
        }
    })
}

pub fn audit(file: &Path, name: &str, against: Option<&str>, g: &Global) -> Outcome {
    let p = load(file)?;
    let cc = classified(&p)?;
    let rep = run_audit(&p, &cc, name, against, &audit_config(&p, g))?;
    emit(&rep)?;
    Ok(rep.verdict.map_or(EXIT_INCONCLUSIVE, |v| v.exit_code() as u8))
}

#[derive(Serialize)]
struct FullReport {
    schema: &'static str,
    classification: CaseSummary,
    hypotheses_ok: bool,
    series: serde_json::Value,
    audits: Vec<AuditReport>,
}

pub fn report(file: &Path, g: &Global) -> Outcome {
    let p = load(file)?;
    let cc = classified(&p)?;
    let cfg = audit_config(&p, g);
    let opts = BuildOptions { res_tol: p.doc.tolerances.resonance, ..BuildOptions::new(4, 4) };
    let series = match build_solution(&p.pde, &cc, &opts) {
        Ok(s) => {
            let res = residual(&p.pde, &s, &p.standard_grid()).unwrap_or(f64::INFINITY);
            serde_json::json!({ "status": "built", "doc": s.to_doc(), "residual": res })
        }
        Err(SeriesError::Resonance(r)) => serde_json::json!({ "status": "resonance", "resonances": r }),
        Err(e) => serde_json::json!({ "status": "not-built", "reason": e.to_string() }),
    };
    let audits = p.solutions.iter().map(|u| run_audit(&p, &cc, &u.name, None, &cfg)).collect::<Result<Vec<_>, _>>()?;
    emit(&FullReport { schema: "report-v1", classification: cc.summary(), hypotheses_ok: singpde::audit::hypotheses_hold(&cc), series, audits })?;
    Ok(0)
}

fn trend_cell(r: &AuditReport) -> String {
    match r.trend {
        Trend::TendsToZero => "0".into(),
        Trend::TendsToPositive { estimate, .. } => format!("{estimate:.4}"),
        Trend::Diverges => "inf".into(),
    }
}

fn verdict_tag(v: Option<singpde::Verdict>) -> &'static str {
    use singpde::Verdict::*;
    match v {
        Some(UniquenessApplies) => "UA",
        Some(CriterionFails) => "CF",
        Some(HypothesesFail) => "HF",
        Some(Inconclusive) => "IN",
        None => "--",
    }
}

/// Fixed-width summary table, one row per entry.
pub fn gallery_table(reports: &[GalleryReport]) -> String {
    let verdicts: Vec<String> = reports
        .iter()
        .map(|r| r.verdicts.iter().map(|v| format!("{}={}({})", v.name, verdict_tag(v.report.verdict), trend_cell(&v.report))).collect::<Vec<_>>().join(" "))
        .collect();
    let w = verdicts.iter().map(String::len).max().unwrap_or(0).max(8);
    let mut out = String::new();
    let _ = writeln!(out, "{:<4} {:>4} {:>4} {:>10} {:<10} {:<w$} {:>10} {:>5} result", "id", "case", "hyp", "residual", "series", "verdicts", "identity", "chars");
    for (r, v) in reports.iter().zip(&verdicts) {
        let case = r.classification.got.as_ref().map_or("?".to_string(), |c| c.case_id.to_string());
        let hyp = if r.classification.expected.hypotheses_ok { "ok" } else { "fail" };
        let res = r.residuals.iter().fold(0.0f64, |m, c| m.max(c.max));
        let id_res = r.pairs.iter().fold(0.0f64, |m, c| m.max(c.identity_residual));
        let chars = format!("{}/{}", r.characteristics.iter().filter(|c| c.pass).count(), r.characteristics.len());
        let verdict = if r.pass { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "{:<4} {case:>4} {hyp:>4} {res:>10.2e} {:<10} {v:<w$} {id_res:>10.2e} {chars:>5} {verdict}", r.id, r.series.outcome);
    }
    let passed = reports.iter().filter(|r| r.pass).count();
    let _ = writeln!(out, "{passed}/{} pass", reports.len());
    out
}

#[derive(Serialize)]
struct GalleryOut<'a> {
    schema: &'static str,
    passed: usize,
    total: usize,
    entries: &'a [GalleryReport],
}

pub fn gallery(id: Option<&str>, all: bool, json: Option<&Path>, g: &Global) -> Outcome {
    let params = GalleryParams::default();
    let entries = match (id, all) {
        (Some(id), _) => match gallery::get(id, &params) {
            Some(e) => vec![e],
            None => return Err(input(anyhow!("unknown gallery id \"{id}\" (known: {})", gallery::ids().join(", ")))),
        },
        (None, true) => gallery::list(&params),
        (None, false) => return Err(input(anyhow!("give a gallery id or --all"))),
    };
    let cfg = AuditConfig::default().with_density(g.grid_density);
    let checks = Checks::default();
    let reports: Vec<GalleryReport> = entries.par_iter().map(|e| gallery::run(e, &checks, &cfg)).collect();
    print!("{}", gallery_table(&reports));
    if let Some(path) = json {
        let passed = reports.iter().filter(|r| r.pass).count();
        write_json(path, &GalleryOut { schema: "gallery-v1", passed, total: reports.len(), entries: &reports })?;
    }
    Ok(if reports.iter().all(|r| r.pass) { 0 } else { EXIT_GALLERY_FAIL })
}
