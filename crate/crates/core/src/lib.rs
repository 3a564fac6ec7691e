//! Numerical verification engine for integral and odd-integer series identities.
//!
//! The crate is organised bottom-up:
//!
//! * [`compensated`]: error-free-transform accumulation used by every node sum.
//! * [`quad`]: tanh-sinh / exp-sinh quadrature over finite and semi-infinite
//!   intervals, with interior split points.
//! * [`quad2d`]: iterated double integrals and an order-of-integration check.
//! * [`series`]: sums over odd integers with tail control, plus the closed-form
//!   log-moment integrals.
//! * [`expr`]: a small integrand language (`x`, `y`, `z`, `ln`, `exp`, ...).
//! * [`ledger`]: identities encoded as claims, a runner and a manifest format.
//!
//! The numeric core is generic over [`Real`]; the ledger and expression
//! evaluator work in `f64`. Concrete aliases for the common instantiation
//! live at the crate root.

// `!(a >= b)` rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compensated;
pub mod expr;
pub mod ledger;
pub mod quad;
pub mod quad2d;
pub mod series;

use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Floating point scalar accepted by the numeric core (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Converts a literal that is known to be representable.
    #[inline]
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("literal representable in scalar type")
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + Debug + Display + Send + Sync + 'static
{
}

pub use compensated::CompensatedSum;
pub use expr::{Expr, Var};
pub use ledger::{Claim, ClaimResult, Quantity, Report};
pub use quad::{IntegrationDomain, QuadConfig, QuadError, QuadResult};
pub use quad2d::{FubiniReport, IterationOrder, ProductDomain};
pub use series::{SeriesError, SeriesFamily, SeriesResult, SeriesSpec};

pub type QuadConfigF64 = quad::QuadConfig<f64>;
pub type QuadResultF64 = quad::QuadResult<f64>;
pub type DomainF64 = quad::IntegrationDomain<f64>;
pub type ProductDomainF64<'a> = quad2d::ProductDomain<'a, f64>;
pub type FubiniReportF64 = quad2d::FubiniReport<f64>;
pub type SeriesResultF64 = series::SeriesResult<f64>;

pub type QuadConfigF32 = quad::QuadConfig<f32>;
pub type QuadResultF32 = quad::QuadResult<f32>;
pub type DomainF32 = quad::IntegrationDomain<f32>;
