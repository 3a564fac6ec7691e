//! One-dimensional double-exponential quadrature.
//!
//! Finite intervals use tanh-sinh, `[a, ∞)` uses exp-sinh. Endpoints and
//! split points are never sampled, so integrable endpoint singularities
//! (`ln y` at 0) and removable ones (`ln y / (1 - y²)` at 1, once listed as a
//! split point) need no special treatment.
//!
//! The reported error is `|S_L - S_{L-1}|` between the last two levels. It is
//! an estimate, not a bound; for smooth integrands it is typically many
//! orders of magnitude larger than the true error.

mod domain;
pub mod rules;

use std::fmt::Display;

use serde::Serialize;
use thiserror::Error;

use crate::compensated::CompensatedSum;
use crate::Real;

pub use domain::{DomainKind, IntegrationDomain, Piece};
pub use rules::{exp_sinh_nodes, tanh_sinh_nodes, Node};

use rules::Rule;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error(
        "no convergence ({reason}): estimate {estimate:e}, error estimate {error_estimate:e}, \
         {evaluations} evaluations"
    )]
    NonConvergence {
        estimate: f64,
        error_estimate: f64,
        evaluations: usize,
        reason: String,
    },
    #[error("integrand failed at {at:e}: {message}")]
    Evaluation { at: f64, message: String },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

/// Tolerances and budgets of one quadrature call.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadConfig<T> {
    pub abs_tol: T,
    pub rel_tol: T,
    /// Deepest refinement level; level `L` uses step `2^-L`.
    pub max_level: u32,
    /// Integrand evaluations allowed per one-dimensional rule.
    pub max_evals: usize,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self {
            abs_tol: T::lit(1e-10),
            rel_tol: T::lit(1e-10),
            max_level: 12,
            max_evals: 200_000,
        }
    }
}

impl<T: Real> QuadConfig<T> {
    pub fn new(
        abs_tol: T,
        rel_tol: T,
        max_level: u32,
        max_evals: usize,
    ) -> Result<Self, QuadError> {
        let config = Self {
            abs_tol,
            rel_tol,
            max_level,
            max_evals,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<(), QuadError> {
        let bad = |m: String| Err(QuadError::InvalidConfig(m));
        if !(self.abs_tol >= T::zero()) || !(self.rel_tol >= T::zero()) {
            return bad(format!(
                "tolerances must be non-negative (abs {}, rel {})",
                self.abs_tol, self.rel_tol
            ));
        }
        if self.abs_tol == T::zero() && self.rel_tol == T::zero() {
            return bad("at least one tolerance must be positive".into());
        }
        if self.max_level < 3 {
            return bad(format!(
                "max_level must be at least 3, got {}",
                self.max_level
            ));
        }
        if self.max_evals < 100 {
            return bad(format!(
                "max_evals must be at least 100, got {}",
                self.max_evals
            ));
        }
        Ok(())
    }

    /// `max(abs_tol, rel_tol·|value|)`.
    pub fn tolerance_for(&self, value: T) -> T {
        self.abs_tol.max(self.rel_tol * value.abs())
    }

    /// Both tolerances divided by `factor`.
    pub fn tightened(&self, factor: T) -> Self {
        Self {
            abs_tol: self.abs_tol / factor,
            rel_tol: self.rel_tol / factor,
            ..*self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuadResult<T> {
    pub value: T,
    pub error_estimate: T,
    pub evaluations: usize,
    pub converged: bool,
}

fn non_convergence<T: Real>(value: T, error: T, evaluations: usize, reason: &str) -> QuadError {
    QuadError::NonConvergence {
        estimate: value.to_f64().unwrap_or(f64::NAN),
        error_estimate: error.to_f64().unwrap_or(f64::NAN),
        evaluations,
        reason: reason.to_string(),
    }
}

/// `f` receives each abscissa together with its rule weight.
pub(crate) fn integrate_piece<T, F>(
    piece: Piece<T>,
    f: &mut F,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError>
where
    T: Real,
    F: FnMut(T, T) -> Result<T, QuadError>,
{
    let rule = match piece {
        Piece::Finite(lower, upper) => Rule::TanhSinh { lower, upper },
        Piece::SemiInfinite(lower) => Rule::ExpSinh { lower },
    };
    let out = rules::refine(rule, f, config, true)?;
    if !out.converged {
        return Err(non_convergence(
            out.value,
            out.error,
            out.evaluations,
            out.reason,
        ));
    }
    Ok(QuadResult {
        value: out.value,
        error_estimate: out.error,
        evaluations: out.evaluations,
        converged: true,
    })
}

/// Attempts at a composite integral before its combined error is reported
/// as non-convergence.
const COMPOSITE_ATTEMPTS: usize = 4;

/// Integrates over a whole domain, cutting at its split points.
///
/// Each piece runs with tolerances scaled by `1/√n` for `n` pieces; the
/// piece errors are combined in quadrature and the combined estimate must
/// still meet the caller's tolerance on the total. Piece tolerances are
/// relative to the piece values, so when pieces cancel the pass is repeated
/// with tolerances tightened by the shortfall.
pub(crate) fn integrate_domain<T, F>(
    f: &mut F,
    domain: &IntegrationDomain<T>,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError>
where
    T: Real,
    F: FnMut(T, T) -> Result<T, QuadError>,
{
    config.validate()?;
    let pieces = domain.pieces();
    let mut piece_config = config.tightened(T::lit(pieces.len() as f64).sqrt());
    let mut evaluations = 0;
    for attempt in 1..=COMPOSITE_ATTEMPTS {
        let mut value = CompensatedSum::new();
        let mut err_sq = T::zero();
        for &piece in &pieces {
            let r = integrate_piece(piece, f, &piece_config).map_err(|e| match e {
                QuadError::NonConvergence {
                    estimate,
                    error_estimate,
                    evaluations: n,
                    reason,
                } => QuadError::NonConvergence {
                    estimate,
                    error_estimate,
                    evaluations: evaluations + n,
                    reason,
                },
                other => other,
            })?;
            value.add(r.value);
            err_sq = err_sq + r.error_estimate * r.error_estimate;
            evaluations += r.evaluations;
        }
        let value = value.value();
        let error_estimate = err_sq.sqrt();
        let tolerance = config.tolerance_for(value);
        if error_estimate <= tolerance {
            return Ok(QuadResult {
                value,
                error_estimate,
                evaluations,
                converged: true,
            });
        }
        if attempt == COMPOSITE_ATTEMPTS || !(tolerance > T::zero()) {
            return Err(non_convergence(
                value,
                error_estimate,
                evaluations,
                "combined piece errors exceed tolerance",
            ));
        }
        let shortfall = (T::lit(2.0) * error_estimate / tolerance).max(T::lit(2.0));
        piece_config = piece_config.tightened(shortfall);
    }
    unreachable!("the last attempt returns")
}

fn fallible<T, E: Display>(
    f: impl Fn(T) -> Result<T, E>,
) -> impl FnMut(T, T) -> Result<T, QuadError>
where
    T: Real,
{
    move |x, _| {
        f(x).map_err(|e| QuadError::Evaluation {
            at: x.to_f64().unwrap_or(f64::NAN),
            message: e.to_string(),
        })
    }
}

/// Tanh-sinh quadrature of `f` over `[lower, upper]`.
pub fn integrate_finite<T: Real>(
    f: impl Fn(T) -> T,
    lower: T,
    upper: T,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    try_integrate_finite(
        |x| Ok::<T, std::convert::Infallible>(f(x)),
        lower,
        upper,
        config,
    )
}

/// As [`integrate_finite`] for an integrand that can fail.
pub fn try_integrate_finite<T: Real, E: Display>(
    f: impl Fn(T) -> Result<T, E>,
    lower: T,
    upper: T,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    let domain = IntegrationDomain::finite(lower, upper)?;
    integrate_domain(&mut fallible(f), &domain, config)
}

/// Exp-sinh quadrature of `f` over `[lower, ∞)`.
pub fn integrate_semi_infinite<T: Real>(
    f: impl Fn(T) -> T,
    lower: T,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    try_integrate_semi_infinite(|x| Ok::<T, std::convert::Infallible>(f(x)), lower, config)
}

pub fn try_integrate_semi_infinite<T: Real, E: Display>(
    f: impl Fn(T) -> Result<T, E>,
    lower: T,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    let domain = IntegrationDomain::semi_infinite(lower)?;
    integrate_domain(&mut fallible(f), &domain, config)
}

/// Integrates over `domain`, dispatching every split-free piece to the
/// finite or semi-infinite rule. Values are summed, error estimates are
/// combined root-sum-square.
pub fn integrate<T: Real>(
    f: impl Fn(T) -> T,
    domain: &IntegrationDomain<T>,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    try_integrate(|x| Ok::<T, std::convert::Infallible>(f(x)), domain, config)
}

pub fn try_integrate<T: Real, E: Display>(
    f: impl Fn(T) -> Result<T, E>,
    domain: &IntegrationDomain<T>,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    integrate_domain(&mut fallible(f), domain, config)
}

/// Tanh-sinh estimate after every level `0..=max_level`, without a
/// convergence test. Useful for convergence studies.
pub fn tanh_sinh_estimates<T: Real>(
    f: impl Fn(T) -> T,
    lower: T,
    upper: T,
    max_level: u32,
) -> Result<Vec<T>, QuadError> {
    IntegrationDomain::finite(lower, upper)?;
    let config = QuadConfig {
        abs_tol: T::zero(),
        rel_tol: T::zero(),
        max_level,
        max_evals: usize::MAX,
    };
    let mut g = |x, _| Ok(f(x));
    let out = rules::refine(Rule::TanhSinh { lower, upper }, &mut g, &config, false)?;
    Ok(out.levels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn cfg() -> QuadConfig<f64> {
        QuadConfig::default()
    }

    #[test]
    fn config_validation() {
        assert!(QuadConfig::new(0.0, 0.0, 12, 1000).is_err());
        assert!(QuadConfig::new(-1.0, 1e-10, 12, 1000).is_err());
        assert!(QuadConfig::new(1e-10, 0.0, 2, 1000).is_err());
        assert!(QuadConfig::new(1e-10, 0.0, 3, 99).is_err());
        assert!(QuadConfig::new(1e-10, 0.0, 3, 100).is_ok());
        assert!(QuadConfig::new(f64::NAN, 1e-10, 3, 100).is_err());
    }

    #[test]
    fn arctan_one() {
        let r = integrate_finite(|x: f64| 1.0 / (1.0 + x * x), 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - FRAC_PI_4).abs() < 1e-10);
        assert!(r.converged);
        assert!(r.error_estimate <= 1e-10);
    }

    #[test]
    fn constant_is_exact_within_estimate() {
        let r = integrate_finite(|_| 1.0f64, 0.0, 1.0, &cfg()).unwrap();
        assert!((r.value - 1.0).abs() <= r.error_estimate.max(4.0 * f64::EPSILON));
    }

    #[test]
    fn log_kernel_on_unit_interval() {
        let r = integrate_finite(|y: f64| y.ln() / (1.0 - y * y), 0.0, 1.0, &cfg()).unwrap();
        // -π²/8
        assert!(
            (r.value + 1.233_700_550_136_169_8).abs() < 1e-10,
            "{}",
            r.value
        );
    }

    #[test]
    fn semi_infinite_examples() {
        let r = integrate_semi_infinite(|x: f64| 1.0 / (1.0 + x * x), 0.0, &cfg()).unwrap();
        assert!((r.value - FRAC_PI_2).abs() < 1e-10);
        let r = integrate_semi_infinite(|y: f64| 1.0 / (y * y + 4.0), 0.0, &cfg()).unwrap();
        assert!((r.value - FRAC_PI_4).abs() < 1e-10);
        let r = integrate_semi_infinite(|x: f64| x.ln() / (1.0 + x * x), 0.0, &cfg()).unwrap();
        assert!(r.value.abs() < 1e-10, "{}", r.value);
    }

    #[test]
    fn shifted_semi_infinite() {
        // ∫_2^∞ e^{-x} dx = e^{-2}
        let r = integrate_semi_infinite(|x: f64| (-x).exp(), 2.0, &cfg()).unwrap();
        assert!((r.value - (-2.0f64).exp()).abs() < 1e-10);
    }

    #[test]
    fn split_domain_examples() {
        let d = IntegrationDomain::semi_infinite(0.0)
            .unwrap()
            .with_splits([1.0])
            .unwrap();
        let r = integrate(|y: f64| y.ln() / (1.0 - y * y), &d, &cfg()).unwrap();
        assert!((r.value + PI * PI / 4.0).abs() < 1e-10, "{}", r.value);

        let r = integrate(
            |y: f64| {
                let l = y.ln();
                let q = 1.0 - y * y;
                l * l / (q * q)
            },
            &d,
            &cfg(),
        )
        .unwrap();
        let unit = integrate_finite(
            |y: f64| {
                let l = y.ln();
                let q = 1.0 - y * y;
                (1.0 + y * y) * l * l / (q * q)
            },
            0.0,
            1.0,
            &cfg(),
        )
        .unwrap();
        assert!(
            (r.value - unit.value).abs() <= 2.0 * (r.error_estimate + unit.error_estimate) + 1e-12
        );
        // Both equal π²/4 (mpmath, 30 digits).
        assert!((r.value - 2.467_401_100_272_339_7).abs() < 1e-10);

        let plain = IntegrationDomain::semi_infinite(0.0).unwrap();
        let r = integrate(|x: f64| 1.0 / (1.0 + x * x), &plain, &cfg()).unwrap();
        assert!((r.value - FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn evaluation_errors_surface() {
        let err = try_integrate_finite(
            |y: f64| {
                if y <= 0.0 {
                    Err("ln of non-positive")
                } else {
                    Ok(y.ln())
                }
            },
            -1.0,
            1.0,
            &cfg(),
        )
        .unwrap_err();
        assert!(matches!(err, QuadError::Evaluation { .. }));
        let err = integrate_finite(|x: f64| 1.0 / (x - 0.5), 0.0, 1.0, &cfg()).unwrap_err();
        assert!(matches!(err, QuadError::Evaluation { .. }), "{err}");
    }

    #[test]
    fn budget_exhaustion_is_non_convergence() {
        let tight = QuadConfig::new(1e-300, 0.0, 30, 100).unwrap();
        let err = integrate_finite(|x: f64| (1.0 / x).sin(), 0.0, 1.0, &tight).unwrap_err();
        match err {
            QuadError::NonConvergence { evaluations, .. } => assert!(evaluations <= 100),
            other => panic!("{other}"),
        }
        let shallow = QuadConfig::new(1e-300, 0.0, 4, 200_000).unwrap();
        assert!(matches!(
            integrate_finite(|x: f64| (1.0 / x).sin(), 0.0, 1.0, &shallow),
            Err(QuadError::NonConvergence { .. })
        ));
    }

    #[test]
    fn non_integrable_tail_does_not_converge() {
        let err = integrate_semi_infinite(|x: f64| 1.0 / (1.0 + x), 0.0, &cfg()).unwrap_err();
        assert!(matches!(err, QuadError::NonConvergence { .. }), "{err}");
    }

    #[test]
    fn f32_instantiation() {
        let c = QuadConfig::<f32>::new(1e-5, 1e-5, 10, 100_000).unwrap();
        let r = integrate_finite(|x: f32| 1.0 / (1.0 + x * x), 0.0, 1.0, &c).unwrap();
        assert!((r.value - std::f32::consts::FRAC_PI_4).abs() < 1e-5);
    }

    #[test]
    fn estimates_per_level() {
        let est = tanh_sinh_estimates(|x: f64| x * x, 0.0, 1.0, 6).unwrap();
        assert_eq!(est.len(), 7);
        assert!((est[6] - 1.0 / 3.0).abs() < 1e-14);
    }
}
