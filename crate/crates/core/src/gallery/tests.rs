use super::*;
use crate::audit::Verdict;

fn params() -> GalleryParams {
    GalleryParams::default()
}

#[test]
fn eleven_stable_ids() {
    let ids = ids();
    assert_eq!(ids.len(), 11);
    for (k, id) in ids.iter().enumerate() {
        assert_eq!(id, &format!("G{}", k + 1));
    }
    assert!(get("g2", &params()).is_some());
    assert!(get("G12", &params()).is_none());
}

#[test]
fn g2_solutions() {
    let e = get("G2", &params()).unwrap();
    let names: Vec<&str> = e.solutions.iter().map(|s| s.expr.as_str()).collect();
    assert_eq!(names, ["0", "x^2/4"]);
}

#[test]
fn g4_expected_class() {
    let e = get("G4", &params()).unwrap();
    assert_eq!(e.expected.case_id, 2);
    assert_eq!(e.expected.lambda00, [2.0, 0.0]);
    assert_eq!(e.expected.c00, Some([-1.0, 0.0]));
}

#[test]
fn g1_family_for_higher_k() {
    let pr = GalleryParams { k: 2, alpha: 0.3, c: 6.0, ..params() };
    let e = get("G1", &pr).unwrap();
    let r = run(&e, &Checks { audit: false, characteristics: false, ..Checks::default() }, &AuditConfig::default());
    assert!(r.residuals.iter().all(|c| c.pass), "{:?}", r.residuals);
    assert!(r.classification.pass);
}

#[test]
fn g2_run() {
    let r = run(&get("G2", &params()).unwrap(), &Checks::default(), &AuditConfig::default());
    assert!(r.pass, "{r:#?}");
    let v = &r.verdicts[1];
    assert_eq!(v.report.verdict, Some(Verdict::CriterionFails));
    assert!((v.report.estimate() - 0.25).abs() < 1e-12);
    assert!(r.residuals.iter().all(|c| c.max < 1e-8));
    assert_eq!(r.characteristics.len(), 1);
    assert!(r.characteristics[0].decay_pairs >= 100);
}

#[test]
fn g8_run() {
    let r = run(&get("G8", &params()).unwrap(), &Checks::default(), &AuditConfig::default());
    assert!(r.pass, "{r:#?}");
    let got = r.classification.got.as_ref().unwrap();
    assert_eq!((got.case_id, got.p), (3, Some(1)));
    assert!(r.verdicts.iter().all(|v| v.report.verdict == Some(Verdict::HypothesesFail)));
    assert!(r.pairs.iter().all(|p| p.max_difference > SEPARATION));
}

#[test]
fn g11_series_witness() {
    let r = run(&get("G11", &params()).unwrap(), &Checks::default(), &AuditConfig::default());
    assert!(r.pass, "{r:#?}");
    assert!(r.series.residual.unwrap() < 1e-12);
}

#[test]
fn every_entry_passes() {
    let cfg = AuditConfig::default();
    let failed: Vec<GalleryReport> = list(&params()).iter().map(|e| run(e, &Checks::default(), &cfg)).filter(|r| !r.pass).collect();
    assert!(failed.is_empty(), "{failed:#?}");
}
