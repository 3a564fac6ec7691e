use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use crate::expr::{Bindings, EvalError};
use crate::quad::{try_integrate, QuadConfig, QuadError};
use crate::quad2d::{try_integrate_iterated, ProductDomain, INNER_TIGHTENING};
use crate::series::{moment_integral, sum_series, SeriesError};

use super::{Claim, ClaimFailure, ClaimResult, FailureKind, MomentArg, Quantity, Report};

/// How a batch of claims is evaluated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunConfig {
    pub quad: QuadConfig<f64>,
    /// Replaces every claim's own tolerance when set.
    pub tolerance: Option<f64>,
    /// Worker threads; at least one is used.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            quad: QuadConfig::default(),
            tolerance: None,
            jobs: 1,
        }
    }
}

impl RunConfig {
    /// Series are summed this much tighter than the quadrature tolerance.
    const SERIES_MARGIN: f64 = 100.0;

    fn series_tolerance(&self) -> f64 {
        self.quad
            .abs_tol
            .min(self.quad.rel_tol)
            .max(f64::MIN_POSITIVE)
            / Self::SERIES_MARGIN
    }
}

fn from_quad(e: QuadError) -> ClaimFailure {
    let kind = match e {
        QuadError::NonConvergence { .. } => FailureKind::NonConvergence,
        QuadError::Evaluation { .. } => FailureKind::Evaluation,
        QuadError::InvalidDomain(_) | QuadError::InvalidConfig(_) => FailureKind::Invalid,
    };
    ClaimFailure {
        kind,
        message: e.to_string(),
    }
}

fn from_series(e: SeriesError) -> ClaimFailure {
    let kind = match e {
        SeriesError::ToleranceUnreachable { .. } => FailureKind::NonConvergence,
        _ => FailureKind::Invalid,
    };
    ClaimFailure {
        kind,
        message: e.to_string(),
    }
}

fn from_eval(e: EvalError) -> ClaimFailure {
    ClaimFailure {
        kind: FailureKind::Evaluation,
        message: e.to_string(),
    }
}

fn invalid(message: String) -> ClaimFailure {
    ClaimFailure {
        kind: FailureKind::Invalid,
        message,
    }
}

struct Evaluator<'a> {
    params: Bindings<f64>,
    config: &'a RunConfig,
    evaluations: usize,
}

impl Evaluator<'_> {
    fn moment_arg(&self, arg: MomentArg) -> Result<u32, ClaimFailure> {
        match arg {
            MomentArg::Literal(n) => Ok(n),
            MomentArg::Param(v) => {
                let x = self
                    .params
                    .get(v)
                    .ok_or_else(|| from_eval(EvalError::UnboundVariable(v)))?;
                if x >= 0.0 && x.fract() == 0.0 && x <= u32::MAX as f64 {
                    Ok(x as u32)
                } else {
                    Err(invalid(format!(
                        "moment argument {v}={x} is not a non-negative integer"
                    )))
                }
            }
        }
    }

    fn value(&mut self, q: &Quantity) -> Result<f64, ClaimFailure> {
        match q {
            Quantity::Integral1D {
                integrand,
                variable,
                domain,
            } => {
                let params = self.params;
                let f = |t: f64| integrand.eval(&params.with(*variable, t));
                let r = try_integrate(f, domain, &self.config.quad).map_err(from_quad)?;
                self.evaluations += r.evaluations;
                Ok(r.value)
            }
            Quantity::Integral2D {
                integrand,
                outer,
                inner,
                outer_domain,
                inner_domain,
                order,
            } => {
                let params = self.params;
                let f = |a: f64, b: f64| integrand.eval(&params.with(*outer, a).with(*inner, b));
                let domain = ProductDomain::new(outer_domain.clone(), inner_domain.clone());
                let r =
                    try_integrate_iterated(f, &domain, *order, &self.config.quad, INNER_TIGHTENING)
                        .map_err(from_quad)?;
                self.evaluations += r.evaluations;
                Ok(r.value)
            }
            Quantity::Series { spec, scale } => {
                let s = scale.eval(&self.params).map_err(from_eval)?;
                let r = sum_series::<f64>(*spec, self.config.series_tolerance())
                    .map_err(from_series)?;
                self.evaluations += r.terms_used as usize;
                Ok(s * r.value)
            }
            Quantity::ClosedForm(e) => e.eval(&self.params).map_err(from_eval),
            Quantity::Moment { k, p } => {
                let k = self.moment_arg(*k)?;
                let p = self.moment_arg(*p)?;
                moment_integral::<f64>(k as u64, p).map_err(from_series)
            }
            Quantity::LinearCombo(terms) => {
                let mut total = crate::CompensatedSum::new();
                for (c, q) in terms {
                    let c = c.eval(&self.params).map_err(from_eval)?;
                    total.add(c * self.value(q)?);
                }
                Ok(total.value())
            }
        }
    }
}

/// Evaluates every side of `claim` at every parameter set.
///
/// The reported values are those of the worst-agreeing side and parameter
/// set. The first failure stops evaluation and is recorded in the result.
pub fn run_claim(claim: &Claim, config: &RunConfig) -> ClaimResult {
    let start = Instant::now();
    let tolerance = config.tolerance.unwrap_or(claim.tolerance);
    let mut result = ClaimResult {
        claim_id: claim.id.clone(),
        lhs_value: f64::NAN,
        rhs_value: f64::NAN,
        abs_diff: f64::NAN,
        tolerance,
        passed: false,
        evaluations: 0,
        elapsed: Duration::ZERO,
        failure: None,
    };
    let sets = if claim.params.is_empty() {
        vec![Bindings::new()]
    } else {
        claim.params.clone()
    };
    let outcome = (|| -> Result<(), ClaimFailure> {
        claim.validate().map_err(|e| invalid(e.to_string()))?;
        config.quad.validate().map_err(from_quad)?;
        let mut worst = -1.0;
        for params in sets {
            let mut ev = Evaluator {
                params,
                config,
                evaluations: 0,
            };
            let outcome = (|| {
                let lhs = ev.value(&claim.lhs)?;
                for side in claim.sides().skip(1) {
                    let rhs = ev.value(side)?;
                    let diff = (lhs - rhs).abs();
                    // NaN compares false, so it is recorded as the worst.
                    if !(diff <= worst) {
                        worst = if diff.is_nan() { f64::INFINITY } else { diff };
                        result.lhs_value = lhs;
                        result.rhs_value = rhs;
                        result.abs_diff = diff;
                    }
                }
                Ok(())
            })();
            result.evaluations += ev.evaluations;
            outcome?;
        }
        Ok(())
    })();
    result.failure = outcome.err();
    result.passed = result.failure.is_none() && result.abs_diff <= tolerance;
    result.elapsed = start.elapsed();
    result
}

/// Evaluates claims on up to `config.jobs` threads. Results are ordered by
/// claim id whatever the scheduling.
pub fn run_all(claims: &[Claim], config: &RunConfig) -> Report {
    let start = Instant::now();
    let jobs = config.jobs.clamp(1, claims.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<ClaimResult>>> = Mutex::new(vec![None; claims.len()]);
    std::thread::scope(|scope| {
        for _ in 0..jobs {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(claim) = claims.get(i) else { break };
                let r = run_claim(claim, config);
                slots.lock().expect("result slots poisoned")[i] = Some(r);
            });
        }
    });
    let mut results: Vec<ClaimResult> = slots
        .into_inner()
        .expect("result slots poisoned")
        .into_iter()
        .map(|r| r.expect("every claim evaluated"))
        .collect();
    results.sort_by(|a, b| a.claim_id.cmp(&b.claim_id));
    Report::new(config.quad, results, start.elapsed())
}
