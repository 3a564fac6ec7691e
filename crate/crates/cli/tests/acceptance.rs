//! Acceptance criteria, one line each. Runs without the libtest harness so
//! that every criterion is reported even when an earlier one fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::Command;
use std::time::{Duration, Instant};

use oddsum::expr::{parse, BinaryOp, Bindings, Expr, Func, Var};
use oddsum::ledger::{builtin_claims, run_claim, Claim, Quantity, RunConfig};
use oddsum::quad::integrate_finite;
use oddsum::quad2d::{fubini_check, ProductDomain};
use oddsum::series::{moment_integral, sum_series, zeta2_from_odd};
use oddsum::{IntegrationDomain, QuadConfigF64, SeriesSpec};
use proptest::prelude::*;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn claim(id: &str) -> Claim {
    builtin_claims()
        .into_iter()
        .find(|c| c.id == id)
        .unwrap_or_else(|| panic!("{id} missing from catalog"))
}

fn c03_fubini() -> Outcome {
    let start = Instant::now();
    let domain = ProductDomain::new(
        IntegrationDomain::semi_infinite(0.0).unwrap(),
        IntegrationDomain::semi_infinite(0.0).unwrap(),
    );
    let f = |x: f64, y: f64| x / ((1.0 + x * x) * (y * y + x * x));
    let rep = fubini_check(f, &domain, &QuadConfigF64::default()).map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let target = PI * PI / 4.0;
    let (d_ab, d_ba) = (
        (rep.value_order_ab - target).abs(),
        (rep.value_order_ba - target).abs(),
    );
    check(
        rep.both_converged && d_ab <= 1e-8 && d_ba <= 1e-8 && rep.discrepancy <= 1e-8 && elapsed <= Duration::from_secs(20),
        format!(
            "C-03 y-first {:.15} (|err| {d_ab:.1e}), x-first {:.15} (|err| {d_ba:.1e}), discrepancy {:.1e}, {:.2} s",
            rep.value_order_ab,
            rep.value_order_ba,
            rep.discrepancy,
            elapsed.as_secs_f64()
        ),
    )
}

fn c07_c08() -> Outcome {
    let q = integrate_finite(
        |y: f64| y.ln() / (1.0 - y * y),
        0.0,
        1.0,
        &QuadConfigF64::default(),
    )
    .map_err(|e| e.to_string())?;
    let s = sum_series::<f64>(SeriesSpec::odd(2).unwrap(), 1e-12).map_err(|e| e.to_string())?;
    let target = PI * PI / 8.0;
    let (dq, ds, agree) = (
        (q.value + target).abs(),
        (s.value - target).abs(),
        (-q.value - s.value).abs(),
    );
    check(
        dq <= 1e-10 && ds <= 1e-12 && agree <= 1e-9,
        format!(
            "C-07 quadrature |err| {dq:.1e}, C-08 series |err| {ds:.1e}, agreement {agree:.1e}"
        ),
    )
}

fn c09() -> Outcome {
    let s = sum_series::<f64>(SeriesSpec::odd(2).unwrap(), 1e-12).map_err(|e| e.to_string())?;
    let z = zeta2_from_odd(s.value);
    let err = (z - PI * PI / 6.0).abs();
    let r = run_claim(&claim("C-09"), &RunConfig::default());
    check(
        err <= 1e-9 && r.passed,
        format!(
            "C-09 zeta(2) = {z:.15}, |err| {err:.1e}, claim {}",
            r.status()
        ),
    )
}

fn c10_to_c14() -> Outcome {
    let mut lines = Vec::new();
    let mut ok = true;
    for id in ["C-10", "C-11", "C-12", "C-13", "C-14"] {
        let r = run_claim(&claim(id), &RunConfig::default());
        ok &= r.passed && r.tolerance <= 1e-8;
        lines.push(format!("{id} {} (|diff| {:.1e})", r.status(), r.abs_diff));
    }
    let Quantity::ClosedForm(rhs) = claim("C-14").rhs else {
        return Err("C-14 rhs is not a closed form".into());
    };
    let c14 = rhs.eval_const().map_err(|e| e.to_string())?;
    ok &= (c14 - 2.019_098_713_54).abs() <= 1e-10;
    check(ok, format!("{}; C-14 rhs {c14:.11}", lines.join(", ")))
}

fn c16() -> Outcome {
    let q = integrate_finite(
        |y: f64| y.ln().powi(2) / (1.0 - y * y),
        0.0,
        1.0,
        &QuadConfigF64::default(),
    )
    .map_err(|e| e.to_string())?;
    let target = PI.powi(3) / 16.0;
    let err = (q.value - target).abs();
    check(
        err <= 1e-9,
        format!(
            "C-16 integral {:.12} vs pi^3/16 = {target:.12}, |diff| {err:.1e}",
            q.value
        ),
    )
}

fn c20() -> Outcome {
    let beta =
        sum_series::<f64>(SeriesSpec::alternating(3).unwrap(), 1e-12).map_err(|e| e.to_string())?;
    let lambda =
        sum_series::<f64>(SeriesSpec::odd(4).unwrap(), 1e-12).map_err(|e| e.to_string())?;
    let (l, r) = (PI * beta.value, 3.0 * lambda.value);
    let oracle = PI.powi(4) / 32.0;
    check(
        (l - r).abs() <= 1e-8 && (l - oracle).abs() <= 1e-10 && (r - oracle).abs() <= 1e-10,
        format!(
            "C-20 pi*beta(3) = {l:.12}, 3*lambda(4) = {r:.12}, |diff| {:.1e}",
            (l - r).abs()
        ),
    )
}

fn expr_tree() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u32..1000).prop_map(|n| Expr::Const(n as f64 / 8.0)),
        (0.0..1e6f64).prop_map(Expr::Const),
        prop::sample::select(Var::ALL.to_vec()).prop_map(Expr::Var),
    ];
    leaf.prop_recursive(6, 64, 2, |inner| {
        let op = prop::sample::select(vec![
            BinaryOp::Add,
            BinaryOp::Sub,
            BinaryOp::Mul,
            BinaryOp::Div,
            BinaryOp::Pow,
        ]);
        let func = prop::sample::select(vec![Func::Ln, Func::Exp, Func::Sqrt, Func::Abs]);
        prop_oneof![
            inner.clone().prop_map(Expr::neg),
            (op, inner.clone(), inner.clone()).prop_map(|(op, l, r)| Expr::binary(op, l, r)),
            (func, inner).prop_map(|(f, e)| Expr::call(f, e)),
        ]
    })
}

fn runner(cases: u32) -> TestRunner {
    TestRunner::new_with_rng(
        Config {
            cases,
            failure_persistence: None,
            ..Config::default()
        },
        TestRng::deterministic_rng(RngAlgorithm::ChaCha),
    )
}

fn property_suites() -> Outcome {
    let mut failures = Vec::new();

    let lhs = parse("x/((1+x^2)*(y^2+x^2))").unwrap();
    let rhs = parse("(1/(1-y^2))*(x/(y^2+x^2) - x/(1+x^2))").unwrap();
    let points = (
        1e-9..=10.0f64,
        (1e-9..=10.0f64).prop_filter("away from 1", |y| (y - 1.0).abs() > 1e-3),
    );
    if let Err(e) = runner(100).run(&points, |(x, y)| {
        let b = Bindings::new().with(Var::X, x).with(Var::Y, y);
        let (l, r): (f64, f64) = (lhs.eval(&b).unwrap(), rhs.eval(&b).unwrap());
        prop_assert!((l - r).abs() <= 1e-12 * l.abs().max(1.0));
        Ok(())
    }) {
        failures.push(format!("partial fractions: {e}"));
    }

    let cfg = QuadConfigF64::default();
    let mut worst_moment = 0.0f64;
    for k in 0..=10u64 {
        for p in 1..=3u32 {
            let closed: f64 = moment_integral(k, p).unwrap();
            match integrate_finite(
                |y: f64| y.powi(2 * k as i32) * y.ln().powi(p as i32),
                0.0,
                1.0,
                &cfg,
            ) {
                Ok(q) => worst_moment = worst_moment.max((q.value - closed).abs()),
                Err(e) => failures.push(format!("moment k={k} p={p}: {e}")),
            }
        }
    }
    if worst_moment > 1e-10 {
        failures.push(format!("moments: worst |diff| {worst_moment:.1e}"));
    }

    if let Err(e) = runner(200).run(&expr_tree(), |e| {
        prop_assert_eq!(parse(&e.render()).unwrap(), e);
        Ok(())
    }) {
        failures.push(format!("round trip: {e}"));
    }

    let kernel = |y: f64| y.ln() / (1.0 - y * y);
    let upper =
        oddsum::quad::integrate_semi_infinite(kernel, 1.0, &cfg).map_err(|e| e.to_string())?;
    let lower = integrate_finite(kernel, 0.0, 1.0, &cfg).map_err(|e| e.to_string())?;
    let sym = (upper.value - lower.value).abs();
    let budget =
        upper.error_estimate + lower.error_estimate + 8.0 * f64::EPSILON * lower.value.abs();
    if sym > budget {
        failures.push(format!("C-06 symmetry: {sym:.1e} > {budget:.1e}"));
    }

    check(
        failures.is_empty(),
        if failures.is_empty() {
            format!("partial fractions x100, moments x33 (worst {worst_moment:.1e}), round trip x200, C-06 |diff| {sym:.1e}")
        } else {
            failures.join("; ")
        },
    )
}

fn strip_timings(json: &str) -> String {
    json.lines()
        .filter(|l| !l.trim_start().starts_with("\"ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

fn full_verify() -> Outcome {
    let run = |jobs: &str| {
        Command::new(env!("CARGO_BIN_EXE_oddsum"))
            .args(["verify", "--json", "--jobs", jobs])
            .output()
            .expect("binary runs")
    };
    let start = Instant::now();
    let base = run("1");
    let elapsed = start.elapsed();
    let text = String::from_utf8(base.stdout).map_err(|e| e.to_string())?;
    let doc: serde_json::Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
    let claims = doc["claims"].as_array().cloned().unwrap_or_default();
    let failed: Vec<String> = claims
        .iter()
        .filter(|c| c["passed"] != true)
        .map(|c| c["id"].as_str().unwrap_or("?").to_string())
        .collect();
    let passed = claims.len() - failed.len();
    let mut deterministic = true;
    for jobs in ["2", "4", "8"] {
        let other = String::from_utf8(run(jobs).stdout).map_err(|e| e.to_string())?;
        deterministic &= strip_timings(&other) == strip_timings(&text);
    }
    check(
        base.status.code() == Some(0) && claims.len() == 21 && failed.is_empty() && deterministic && elapsed < Duration::from_secs(60),
        format!(
            "{passed}/{} claims pass{}, exit {:?}, JSON identical across --jobs 1/2/4/8: {deterministic}, {:.2} s",
            claims.len(),
            if failed.is_empty() { String::new() } else { format!(" (failing: {})", failed.join(", ")) },
            base.status.code(),
            elapsed.as_secs_f64()
        ),
    )
}

fn main() {
    let criteria: [Criterion; 8] = [
        ("AC-1", c03_fubini),
        ("AC-2", c07_c08),
        ("AC-3", c09),
        ("AC-4", c10_to_c14),
        ("AC-5", c16),
        ("AC-6", c20),
        ("AC-7", property_suites),
        ("AC-8", full_verify),
    ];
    let mut failed = 0;
    for (name, criterion) in criteria {
        let outcome = catch_unwind(AssertUnwindSafe(criterion))
            .unwrap_or_else(|_| Err("panicked".to_string()));
        match outcome {
            Ok(detail) => println!("[PASS] {name} {detail}"),
            Err(detail) => {
                failed += 1;
                println!("[FAIL] {name} {detail}");
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria met",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
