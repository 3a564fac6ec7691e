//! Identities as data: claims, their numeric evaluation, and the
//! line-oriented manifest format they are stored in.

mod catalog;
mod manifest;
mod report;
mod runner;

use thiserror::Error;

use crate::expr::{Bindings, Expr, ParseError, Var};
use crate::quad::IntegrationDomain;
use crate::quad2d::IterationOrder;
use crate::series::SeriesSpec;

pub use catalog::{builtin_claims, BUILTIN_MANIFEST};
pub use manifest::{load_manifest, to_manifest, MANIFEST_VERSION};
pub use report::{Report, REPORT_VERSION};
pub use runner::{run_all, run_claim, RunConfig};

/// Default agreement tolerance of a claim.
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LedgerError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: bad expression: {error}")]
    Expr { line: usize, error: ParseError },
    #[error("duplicate claim id {0:?}")]
    DuplicateId(String),
    #[error("claim {id}: {reason}")]
    InvalidClaim { id: String, reason: String },
    #[error("unknown claim id {0:?}")]
    UnknownClaim(String),
}

/// Argument of a log-moment quantity: a literal or a claim parameter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentArg {
    Literal(u32),
    Param(Var),
}

/// One side of a claim.
#[derive(Debug, Clone, PartialEq)]
pub enum Quantity {
    Integral1D {
        integrand: Expr,
        variable: Var,
        domain: IntegrationDomain<f64>,
    },
    /// `integrand` is a function of `outer` and `inner`; `order` says which
    /// one is integrated innermost.
    Integral2D {
        integrand: Expr,
        outer: Var,
        inner: Var,
        outer_domain: IntegrationDomain<f64>,
        inner_domain: IntegrationDomain<f64>,
        order: IterationOrder,
    },
    Series {
        spec: SeriesSpec,
        scale: Expr,
    },
    ClosedForm(Expr),
    /// `∫₀¹ y^(2k) ln^p y dy` from its closed form.
    Moment {
        k: MomentArg,
        p: MomentArg,
    },
    /// `Σ coefficient·quantity`; terms may not be combinations themselves.
    LinearCombo(Vec<(Expr, Quantity)>),
}

/// An identity `lhs = rhs (= also...)` checked to an absolute tolerance.
///
/// A claim with parameter sets is evaluated once per set, with the set's
/// variables bound on every side.
#[derive(Debug, Clone, PartialEq)]
pub struct Claim {
    pub id: String,
    pub description: String,
    pub params: Vec<Bindings<f64>>,
    pub lhs: Quantity,
    pub rhs: Quantity,
    /// Further right-hand sides that must also equal `lhs`.
    pub also: Vec<Quantity>,
    pub tolerance: f64,
    pub citation: String,
}

impl Claim {
    /// Variables bound by the parameter sets (identical across sets).
    pub fn param_vars(&self) -> Vec<Var> {
        self.params
            .first()
            .map(|b| b.iter().map(|(v, _)| v).collect())
            .unwrap_or_default()
    }

    pub fn sides(&self) -> impl Iterator<Item = &Quantity> {
        std::iter::once(&self.lhs)
            .chain(std::iter::once(&self.rhs))
            .chain(self.also.iter())
    }

    pub fn validate(&self) -> Result<(), LedgerError> {
        let invalid = |reason: String| LedgerError::InvalidClaim {
            id: self.id.clone(),
            reason,
        };
        if self.id.is_empty() || self.id.chars().any(char::is_whitespace) {
            return Err(invalid("id must be non-empty without whitespace".into()));
        }
        if !(self.tolerance > 0.0 && self.tolerance.is_finite()) {
            return Err(invalid(format!(
                "tolerance must be positive, got {}",
                self.tolerance
            )));
        }
        let params = self.param_vars();
        for set in &self.params {
            let vars: Vec<Var> = set.iter().map(|(v, _)| v).collect();
            if vars != params {
                return Err(invalid(
                    "every parameter set must bind the same variables".into(),
                ));
            }
        }
        for q in self.sides() {
            check_quantity(q, &params, 0).map_err(invalid)?;
        }
        Ok(())
    }
}

fn check_vars(e: &Expr, allowed: &[Var], what: &str) -> Result<(), String> {
    match e.variables().into_iter().find(|v| !allowed.contains(v)) {
        Some(v) => Err(format!("{what} references undeclared variable {v}")),
        None => Ok(()),
    }
}

fn check_quantity(q: &Quantity, params: &[Var], depth: usize) -> Result<(), String> {
    match q {
        Quantity::Integral1D {
            integrand,
            variable,
            ..
        } => {
            if params.contains(variable) {
                return Err(format!(
                    "integration variable {variable} is also a parameter"
                ));
            }
            let mut allowed = params.to_vec();
            allowed.push(*variable);
            check_vars(integrand, &allowed, "integrand")
        }
        Quantity::Integral2D {
            integrand,
            outer,
            inner,
            ..
        } => {
            if outer == inner {
                return Err("outer and inner variables must differ".into());
            }
            if params.contains(outer) || params.contains(inner) {
                return Err("integration variables may not be parameters".into());
            }
            let mut allowed = params.to_vec();
            allowed.extend([*outer, *inner]);
            check_vars(integrand, &allowed, "integrand")
        }
        Quantity::Series { scale, .. } => check_vars(scale, params, "series scale"),
        Quantity::ClosedForm(e) => check_vars(e, params, "closed form"),
        Quantity::Moment { k, p } => {
            for arg in [k, p] {
                if let MomentArg::Param(v) = arg {
                    if !params.contains(v) {
                        return Err(format!("moment argument {v} is not a parameter"));
                    }
                }
            }
            Ok(())
        }
        Quantity::LinearCombo(terms) => {
            if terms.is_empty() {
                return Err("linear combination needs at least one term".into());
            }
            if depth > 0 {
                return Err("linear combinations may not be nested".into());
            }
            for (c, q) in terms {
                check_vars(c, params, "coefficient")?;
                check_quantity(q, params, depth + 1)?;
            }
            Ok(())
        }
    }
}

/// Why a claim could not be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum FailureKind {
    NonConvergence,
    Evaluation,
    Invalid,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimFailure {
    pub kind: FailureKind,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClaimResult {
    pub claim_id: String,
    /// Values at the parameter set with the largest disagreement.
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub abs_diff: f64,
    pub tolerance: f64,
    pub passed: bool,
    pub evaluations: usize,
    pub elapsed: std::time::Duration,
    pub failure: Option<ClaimFailure>,
}

impl ClaimResult {
    pub fn status(&self) -> &'static str {
        match (&self.failure, self.passed) {
            (_, true) => "PASS",
            (Some(f), _) if f.kind == FailureKind::NonConvergence => "NOCONV",
            (Some(_), _) => "ERROR",
            (None, false) => "FAIL",
        }
    }

    pub fn non_converged(&self) -> bool {
        matches!(&self.failure, Some(f) if f.kind == FailureKind::NonConvergence)
    }
}
