use oddsum::ledger::{
    builtin_claims, load_manifest, run_all, run_claim, to_manifest, LedgerError, RunConfig,
};
use oddsum::QuadConfigF64;

/// Claims whose stated right side is not the value of their left side.
const FALSE_AS_STATED: [&str; 3] = ["C-11", "C-14", "C-16"];

#[test]
fn empty_run_passes_vacuously() {
    let r = run_all(&[], &RunConfig::default());
    assert!(r.results.is_empty() && r.all_passed);
}

#[test]
fn catalog_run() {
    let report = run_all(
        &builtin_claims(),
        &RunConfig {
            jobs: 4,
            ..Default::default()
        },
    );
    let failed: Vec<&str> = report
        .results
        .iter()
        .filter(|r| !r.passed)
        .map(|r| r.claim_id.as_str())
        .collect();
    assert_eq!(failed, FALSE_AS_STATED);
    for r in &report.results {
        assert!(r.failure.is_none(), "{r:?}");
    }
}

#[test]
fn deterministic_across_parallelism() {
    let claims = builtin_claims();
    let one = run_all(&claims, &RunConfig::default());
    for jobs in [2, 3, 8] {
        let many = run_all(
            &claims,
            &RunConfig {
                jobs,
                ..Default::default()
            },
        );
        assert_eq!(one.results.len(), many.results.len());
        for (a, b) in one.results.iter().zip(&many.results) {
            assert_eq!(a.claim_id, b.claim_id);
            assert_eq!(a.lhs_value.to_bits(), b.lhs_value.to_bits());
            assert_eq!(a.rhs_value.to_bits(), b.rhs_value.to_bits());
            assert_eq!(a.evaluations, b.evaluations);
            assert_eq!(a.passed, b.passed);
        }
    }
}

#[test]
fn tight_tolerance_fails_safely() {
    let config = RunConfig {
        quad: QuadConfigF64 {
            abs_tol: 1e-16,
            rel_tol: 1e-16,
            ..Default::default()
        },
        tolerance: Some(1e-14),
        jobs: 4,
    };
    let report = run_all(&builtin_claims(), &config);
    assert!(report.any_non_converged());
    for r in report
        .results
        .iter()
        .filter(|r| !r.passed && r.failure.is_none())
    {
        assert!(FALSE_AS_STATED.contains(&r.claim_id.as_str()), "{r:?}");
    }
}

#[test]
fn manifest_errors() {
    let dup = "claim A\nlhs closed :: 1\nrhs closed :: 1\nend\nclaim A\nlhs closed :: 2\nrhs closed :: 2\nend\n";
    assert_eq!(
        load_manifest(dup),
        Err(LedgerError::DuplicateId("A".into()))
    );
    let bad = "claim B\nlhs int1d y 0 1 :: ln(y)/(1-y^\nrhs closed :: 1\nend\n";
    match load_manifest(bad) {
        Err(LedgerError::Expr { line: 2, error }) => assert_eq!(error.position, 11),
        other => panic!("{other:?}"),
    }
}

#[test]
fn c07_from_text() {
    let text = "claim C-07\nlhs int1d y 0 1 :: ln(y)/(1-y^2)\nrhs closed :: -pi^2/8\nend\n";
    let claims = load_manifest(text).unwrap();
    assert_eq!(load_manifest(&to_manifest(&claims)).unwrap(), claims);
    let r = run_claim(&claims[0], &RunConfig::default());
    assert!(r.passed && r.abs_diff <= 1e-10, "{r:?}");
}

#[test]
fn json_key_order() {
    let claims: Vec<_> = builtin_claims()
        .into_iter()
        .filter(|c| c.id == "C-02")
        .collect();
    let json = run_all(&claims, &RunConfig::default()).to_json();
    let keys = [
        "\"version\"",
        "\"config\"",
        "\"abs_tol\"",
        "\"rel_tol\"",
        "\"max_level\"",
        "\"max_evals\"",
        "\"claims\"",
        "\"id\"",
        "\"lhs\"",
        "\"rhs\"",
        "\"abs_diff\"",
        "\"passed\"",
        "\"evals\"",
        "\"ms\"",
        "\"all_passed\"",
    ];
    let positions: Vec<usize> = keys
        .iter()
        .map(|k| json.find(k).unwrap_or_else(|| panic!("{k}")))
        .collect();
    assert!(positions.windows(2).all(|w| w[0] < w[1]), "{json}");
}
