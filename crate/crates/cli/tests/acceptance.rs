//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line per
//! criterion, and exits nonzero if any fails.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use serde_json::Value;
use singpde::audit::{audit_disc, base_solution, plan, verdict, AuditConfig, Trend, Verdict};
use singpde::characteristics::{escape_check, phi_factor, trace, DriftShape, FieldSpec, DriftBudget, TraceOptions};
use singpde::classify::{classify, ClassifyOptions};
use singpde::gallery::{self, Checks, GalleryParams, IDENTITY_TOL, RESIDUAL_TOL};
use singpde::grid::{disc_points, geometric_inclusive};
use singpde::{Disc, Domain, PhiWeight, WeightFn, C64};

type Check = Result<String, String>;

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_singpde")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("spawn singpde")
}

fn write_problem(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, body).expect("write problem file");
    p
}

fn problem(rhs: &str, euler: bool, extra: &str) -> String {
    format!(
        r#"{{"schema": "problem-v1", "rhs": "{rhs}", "euler_form": {euler},
  "weight": {{"kind": "power", "alpha": 1.0}},
  "domain": {{"T0": 0.5, "R0": 1.0, "rho0": 1.0}}{extra}}}"#
    )
}

fn json(out: &Output) -> Result<Value, String> {
    serde_json::from_slice(&out.stdout).map_err(|e| format!("stdout is not JSON: {e}"))
}

fn only(checks: impl FnOnce(&mut Checks)) -> Checks {
    let mut c = Checks { residuals: false, classification: false, series: false, audit: false, pairs: false, characteristics: false };
    checks(&mut c);
    c
}

fn c1_residuals() -> Check {
    let start = Instant::now();
    let checks = only(|c| c.residuals = true);
    let mut worst = (0.0f64, String::new());
    let mut n = 0;
    for e in gallery::list(&GalleryParams::default()) {
        let rep = gallery::run(&e, &checks, &AuditConfig::default());
        for r in rep.residuals {
            n += 1;
            if !(r.max <= worst.0) {
                worst = (r.max, format!("{}:{}", e.id, r.name));
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    let msg = format!("{n} solutions over 11 entries, max residual {:.2e} ({}), {secs:.2} s", worst.0, worst.1);
    if worst.0 < RESIDUAL_TOL && secs < 10.0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c2_reference_values() -> Check {
    let mut got = Vec::new();
    for (id, name, want, tol) in [("G2", "quarter-square", 0.25, 0.005), ("G6", "three-quarter-square", 0.75, 0.015)] {
        let e = gallery::get(id, &GalleryParams::default()).expect("catalogue id");
        let pde = e.pde();
        let u = e.solution_fields().into_iter().find(|u| u.name == name).expect("catalogue solution");
        let (_, r, s) = plan(&pde, None, None);
        let rep = audit_disc(&u, &r, &s, &pde.weight, &AuditConfig::default());
        let v = rep.estimate();
        got.push(((v - want).abs() <= tol, format!("{id} {name} = {v:.6} (want {want} +- {tol})")));
    }
    let msg = got.iter().map(|g| g.1.as_str()).collect::<Vec<_>>().join("; ");
    if got.iter().all(|g| g.0) {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c3_discrimination() -> Check {
    let cfg = AuditConfig::default();
    let mut lines = Vec::new();
    let mut correct = 0;
    for (id, bad) in [("G2", "quarter-square"), ("G6", "three-quarter-square"), ("G10", "x-over-t")] {
        let e = gallery::get(id, &GalleryParams::default()).expect("catalogue id");
        let pde = e.pde();
        let cc = classify(&pde, &ClassifyOptions::default()).map_err(|e| e.to_string())?;
        let u0 = base_solution(&pde, &cc, 4, 4).ok_or(format!("{id}: no base solution"))?;
        let u = e.solution_fields().into_iter().find(|u| u.name == bad).expect("catalogue solution");
        let (dom, space, sigma) = plan(&pde, None, None);

        let good = verdict(&pde, &cc, &u0, &u0, dom, &space, &sigma, &cfg);
        if good.trend == Trend::TendsToZero && good.verdict == Some(Verdict::UniquenessApplies) {
            correct += 1;
        }
        lines.push(format!("{id}:u0 {:?}", good.verdict));

        let rep = verdict(&pde, &cc, &u, &u0, dom, &space, &sigma, &cfg);
        let trend_bad = matches!(rep.trend, Trend::TendsToPositive { .. } | Trend::Diverges);
        if trend_bad && rep.verdict == Some(Verdict::CriterionFails) {
            correct += 1;
        }
        lines.push(format!("{id}:{bad} {:?}", rep.verdict));
    }
    let msg = format!("{correct}/6 correct [{}]", lines.join(", "));
    if correct == 6 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c4_series(dir: &Path) -> Check {
    let g11 = write_problem(dir, "g11.json", &problem("-u + t + v^2", false, ""));
    let out = run(&["solve", g11.to_str().unwrap(), "--order", "4", "4"]);
    if out.status.code() != Some(0) {
        return Err(format!("G11 solve exited {:?}", out.status.code()));
    }
    let v = json(&out)?;
    let coeffs = v["coeffs"].as_array().ok_or("no coeffs")?;
    let n = v["N"].as_u64().ok_or("no N")? as usize;
    let mut u10 = f64::NAN;
    let mut others = 0.0f64;
    for (k, c) in coeffs.iter().enumerate() {
        let (re, im) = (c[0].as_f64().unwrap_or(f64::NAN), c[1].as_f64().unwrap_or(f64::NAN));
        let (i, j) = (k / (n + 1) + 1, k % (n + 1));
        if (i, j) == (1, 0) {
            u10 = re;
            others = others.max(im.abs());
        } else {
            others = others.max(re.hypot(im));
        }
    }
    let res = v["residual"].as_f64().unwrap_or(f64::INFINITY);

    let g4 = write_problem(dir, "g4-linear.json", &problem("2*u - x*v", false, ""));
    let out = run(&["solve", g4.to_str().unwrap(), "--order", "4", "4"]);
    let code = out.status.code();
    let r = json(&out)?;
    let mut at: Vec<(u64, u64)> =
        r["resonances"].as_array().map(|a| a.iter().map(|x| (x["i"].as_u64().unwrap_or(0), x["j"].as_u64().unwrap_or(0))).collect()).unwrap_or_default();
    at.sort_unstable();
    let log = String::from_utf8_lossy(&out.stderr);

    let msg = format!("G11 u10 = {u10}, max other {others:.1e}, residual {res:.1e}; G4 linear exit {code:?}, resonances {at:?}");
    let ok = (u10 - 0.5).abs() < 1e-12
        && others < 1e-12
        && res < 1e-12
        && code == Some(4)
        && at == vec![(1, 1), (2, 0)]
        && log.contains("(2,0)")
        && log.contains("(1,1)");
    if ok {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn read_csv(text: &str) -> Vec<Vec<f64>> {
    text.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap_or(f64::NAN)).collect()).collect()
}

fn trace_cli(dir: &Path, file: &Path, tag: &str, extra: &[&str]) -> Result<(Vec<Vec<f64>>, Value), String> {
    let report = dir.join(format!("{tag}-report.json"));
    let mut args = vec!["trace", file.to_str().unwrap(), "--report", report.to_str().unwrap()];
    args.extend_from_slice(extra);
    let out = run(&args);
    if out.status.code() != Some(0) {
        return Err(format!("{tag}: trace exited {:?}: {}", out.status.code(), String::from_utf8_lossy(&out.stderr)));
    }
    let rows = read_csv(&String::from_utf8_lossy(&out.stdout));
    let rep: Value = serde_json::from_str(&std::fs::read_to_string(&report).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
    Ok((rows, rep))
}

fn c5_characteristics(dir: &Path) -> Check {
    let field = r#", "field": {"shape": {"kind": "euler", "p": 1}, "c": "-1", "a_decay": 0.4}"#;
    let f = write_problem(dir, "case3.json", &problem("-u - x*v", true, field));
    let (rows, rep) = trace_cli(dir, &f, "case3", &["--xi", "0.1", "--t0", "0.1", "--tmin", "1e-6"])?;
    let mut rel = 0.0f64;
    for r in &rows {
        let want = 0.1 / (1.0 + 0.1 * (0.1 / r[0]).ln());
        rel = rel.max(((r[1] - want).hypot(r[2])) / want);
    }
    let t_last = rows.last().map_or(f64::NAN, |r| r[0]);
    let reached = rep["status"]["status"] == "reached-tmin" && (t_last - 1e-6).abs() < 1e-12;
    let dev = rep["reconstruct"]["max_rel_deviation"].as_f64().unwrap_or(f64::INFINITY);

    let field = r#", "field": {"shape": {"kind": "euler", "p": 1}, "b": "0.2*t*(1 + x)", "c": "-1 + 0.5*x", "a_decay": 0.4}"#;
    let f = write_problem(dir, "case3-drift.json", &problem("-u - x*v", true, field));
    let (_, rep) = trace_cli(dir, &f, "case3-drift", &["--xi", "0.1,0.02", "--t0", "0.1", "--tmin", "1e-6"])?;
    let dev_b = rep["reconstruct"]["max_rel_deviation"].as_f64().unwrap_or(f64::INFINITY);

    let msg = format!("closed form rel err {rel:.1e} to t = {t_last:e}; reconstruct {dev:.1e}; nonzero-b reconstruct {dev_b:.1e}");
    if reached && rel < 1e-6 && dev < 1e-6 && dev_b < 1e-5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c6_decay(dir: &Path) -> Check {
    let sols = r#", "solutions": [{"name": "zero", "expr": "0"}, {"name": "quarter-square", "expr": "x^2/4"}]"#;
    let f = write_problem(dir, "g2.json", &problem("-u + v^2", false, sols));
    let (_, rep) = trace_cli(dir, &f, "g2-decay", &["--xi", "0.02,0.01", "--t0", "0.1", "--tmin", "1e-6", "--solution", "quarter-square", "--a-decay", "0.4"])?;
    let d = &rep["decay"];
    let pairs = d["pairs_checked"].as_u64().unwrap_or(0);
    let viol = d["violations"].as_array().map_or(usize::MAX, Vec::len);
    let msg = format!("a = {}, {pairs} pairs, {viol} violations, samples {}", d["a"], rep["samples"]);
    if pairs >= 100 && viol == 0 && d["pass"] == true {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c7_escape() -> Check {
    let a = 0.4;
    let f = FieldSpec::new(DriftShape::Plain, a)
        .with_b(|t, x| (x + 1.0) * (0.05 * t))
        .with_lambda(|_, _| C64::new(-1.0, 0.0))
        .with_ell(|t, _| C64::new(0.05 * t, 0.0));
    let (r, t0) = (1.0, 0.5);
    let disc = Disc::new(r).unwrap();
    let times = geometric_inclusive(1e-6, t0, 40);
    let (big_a, big_l, gamma) = DriftBudget::sample_field(&f, &times, &disc_points(disc, 8, 64, 0.0));
    // |b| <= 0.05 t (1 + |x|) <= b0 mu(t) on D_R with mu(t) = t
    let budget = DriftBudget { a, big_a, big_l, gamma, b0: 0.05 * (1.0 + r), b1: 0.0, b2: 0.0, r1: 0.0, r2: 0.0, sigma: t0, radius: r };
    let phi = PhiWeight::closed_form(WeightFn::power(1.0, t0).unwrap());
    let xi: Vec<C64> = (0..32).map(|k| C64::from_polar(r / 2.0 * 0.8, std::f64::consts::TAU * k as f64 / 32.0)).collect();
    let rep = escape_check(&f, disc, &xi, t0, 1e-6, budget, &phi, &TraceOptions::default());
    let msg = format!(
        "A + L = {:.3} < a = {a}: {}; position {:.3} < R/2 = {}: {}; {}/{} confined, max |x| {:.4}",
        big_a + big_l,
        rep.rate_ok,
        rep.position_lhs,
        rep.half_radius,
        rep.position_lhs < rep.half_radius,
        rep.confined,
        rep.traces,
        rep.max_abs_x
    );
    if rep.pass && rep.budget_ok && rep.confined == 32 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c8_phi() -> Check {
    type B = fn(f64, C64) -> C64;
    let fields: [(&str, B); 4] = [
        ("b=0.3t", |t, _| C64::new(0.3 * t, 0.0)),
        ("b=(0.1+0.2i)t(1+x)", |t, x| C64::new(0.1, 0.2) * t * (x + 1.0)),
        ("b=0.2i x", |_, x| C64::new(0.0, 0.2) * x),
        ("b=0.03+0.03i", |_, _| C64::new(0.03, 0.03)),
    ];
    let (t0, t_min) = (0.5, 1e-6);
    let dom = Domain::Disc(Disc::new(1.0).unwrap());
    let mut traces = 0;
    let mut bad = Vec::new();
    let mut worst = (f64::INFINITY, 0.0f64, 0.0f64);
    for (name, b) in fields {
        let f = FieldSpec::new(DriftShape::Euler { p: 1 }, 0.4).with_b(b).with_c(|_, _| C64::new(-1.0, 0.0));
        for k in 0..8 {
            let xi = C64::from_polar(0.1, -0.35 + 0.1 * k as f64);
            let tr = trace(&f, t0, xi, t_min, &dom, &TraceOptions::default());
            let rep = phi_factor(&f, &tr, None);
            traces += 1;
            worst = (worst.0.min(rep.min_abs), worst.1.max(rep.max_abs), worst.2.max(rep.delta));
            let angle = rep.angle_ok != Some(false);
            if !(rep.delta < std::f64::consts::LN_2 && rep.modulus_ok && angle) {
                bad.push(format!("{name} xi={xi}"));
            }
        }
    }
    let msg = format!("{traces} traces, |phi| in [{:.4}, {:.4}], max delta {:.4} < log 2, failures {bad:?}", worst.0, worst.1, worst.2);
    if bad.is_empty() {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c9_identity() -> Check {
    let checks = only(|c| c.pairs = true);
    let mut worst = 0.0f64;
    let mut n = 0;
    for e in gallery::list(&GalleryParams::default()) {
        for p in gallery::run(&e, &checks, &AuditConfig::default()).pairs {
            n += 1;
            if !(p.identity_residual <= worst) {
                worst = p.identity_residual;
            }
        }
    }
    let msg = format!("{n} solution pairs, max identity residual {worst:.2e}");
    if worst < IDENTITY_TOL && n > 0 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c10_gating() -> Check {
    let params = GalleryParams { k: 1, ..GalleryParams::default() };
    let checks = only(|c| c.audit = true);
    let mut ok = 0;
    let mut cells = Vec::new();
    for id in ["G1", "G4", "G5", "G8", "G9"] {
        let e = gallery::get(id, &params).expect("catalogue id");
        let rep = gallery::run(&e, &checks, &AuditConfig::default());
        let all_hf = !rep.verdicts.is_empty() && rep.verdicts.iter().all(|v| v.report.verdict == Some(Verdict::HypothesesFail));
        if all_hf {
            ok += 1;
        }
        cells.push(format!("{id}:{}", if all_hf { "hf" } else { "NOT-hf" }));
    }
    let msg = format!("{ok}/5 hypotheses-fail [{}]", cells.join(" "));
    if ok == 5 {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn c11_determinism(dir: &Path) -> Check {
    let mut outs = Vec::new();
    for k in 0..2 {
        let path = dir.join(format!("gallery-{k}.json"));
        let out = run(&["gallery", "--all", "--json", path.to_str().unwrap()]);
        if out.status.code() != Some(0) {
            return Err(format!("gallery --all exited {:?}:\n{}", out.status.code(), String::from_utf8_lossy(&out.stdout)));
        }
        outs.push((out.stdout, std::fs::read(&path).map_err(|e| e.to_string())?));
    }
    let same = outs[0] == outs[1];
    let msg = format!("table {} bytes, json {} bytes, identical: {same}", outs[0].0.len(), outs[0].1.len());
    if same {
        Ok(msg)
    } else {
        Err(msg)
    }
}

fn main() {
    let dir = tempfile::tempdir().expect("temp dir");
    let d = dir.path();
    let criteria: Vec<(&str, Box<dyn Fn() -> Check>)> = vec![
        ("gallery residual oracle", Box::new(c1_residuals)),
        ("reference value reproduction", Box::new(c2_reference_values)),
        ("criterion discrimination", Box::new(c3_discrimination)),
        ("series exactness", Box::new(|| c4_series(d))),
        ("characteristic oracle", Box::new(|| c5_characteristics(d))),
        ("decay estimates", Box::new(|| c6_decay(d))),
        ("escape property", Box::new(c7_escape)),
        ("phi-factor bounds", Box::new(c8_phi)),
        ("Hadamard identity", Box::new(c9_identity)),
        ("hypothesis gating", Box::new(c10_gating)),
        ("determinism", Box::new(|| c11_determinism(d))),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        match f() {
            Ok(msg) => println!("PASS {:>2} {name}: {msg}", k + 1),
            Err(msg) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {msg}", k + 1);
            }
        }
    }
    println!("{}/{} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

