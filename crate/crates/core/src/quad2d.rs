//! Iterated double integrals over products of intervals.
//!
//! The integrand is always called as `f(outer, inner)`. With
//! [`IterationOrder::InnerFirst`] the inner variable is integrated for every
//! outer node; [`IterationOrder::OuterFirst`] swaps the roles. Integrating
//! both ways and comparing is the order-of-integration (Fubini) check.

use std::cell::Cell;

use serde::Serialize;

use crate::quad::{self, IntegrationDomain, QuadConfig, QuadError, QuadResult};
use crate::Real;

/// Default factor by which inner tolerances are tightened.
pub const INNER_TIGHTENING: f64 = 10.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum IterationOrder {
    /// `∫ d(outer) ∫ d(inner) f`
    InnerFirst,
    /// `∫ d(inner) ∫ d(outer) f`
    OuterFirst,
}

type SplitFn<'a, T> = dyn Fn(T) -> Vec<T> + Send + Sync + 'a;

/// Product of two integration domains.
///
/// `inner_splits` optionally adds inner split points that depend on the
/// current outer value; they are merged with the inner domain's own splits.
/// They only make sense when the inner variable is integrated innermost.
pub struct ProductDomain<'a, T> {
    pub outer: IntegrationDomain<T>,
    pub inner: IntegrationDomain<T>,
    inner_splits: Option<Box<SplitFn<'a, T>>>,
}

impl<T: std::fmt::Debug> std::fmt::Debug for ProductDomain<'_, T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ProductDomain")
            .field("outer", &self.outer)
            .field("inner", &self.inner)
            .field("dependent_inner_splits", &self.inner_splits.is_some())
            .finish()
    }
}

impl<'a, T: Real> ProductDomain<'a, T> {
    pub fn new(outer: IntegrationDomain<T>, inner: IntegrationDomain<T>) -> Self {
        Self {
            outer,
            inner,
            inner_splits: None,
        }
    }

    pub fn with_inner_splits(mut self, splits: impl Fn(T) -> Vec<T> + Send + Sync + 'a) -> Self {
        self.inner_splits = Some(Box::new(splits));
        self
    }

    /// Inner domain seen from outer value `outer`.
    fn inner_at(&self, outer: T) -> Result<IntegrationDomain<T>, QuadError> {
        let Some(extra) = &self.inner_splits else {
            return Ok(self.inner.clone());
        };
        let mut points: Vec<T> = self.inner.split_points().to_vec();
        for p in extra(outer) {
            if !self.inner.is_interior(p) {
                return Err(QuadError::InvalidDomain(format!(
                    "dependent split {p} at outer value {outer} lies outside the inner domain"
                )));
            }
            points.push(p);
        }
        points.sort_by(|a, b| a.partial_cmp(b).expect("finite split points"));
        points.dedup();
        self.inner.clone().with_splits(points)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FubiniReport<T> {
    /// Inner variable integrated first.
    pub value_order_ab: T,
    /// Outer variable integrated first.
    pub value_order_ba: T,
    pub discrepancy: T,
    pub both_converged: bool,
    pub evaluations: usize,
}

/// Iterated integral with the default inner tightening factor.
pub fn integrate_iterated<T: Real>(
    f: impl Fn(T, T) -> T,
    domain: &ProductDomain<'_, T>,
    order: IterationOrder,
    config: &QuadConfig<T>,
) -> Result<QuadResult<T>, QuadError> {
    try_integrate_iterated(
        |a, b| Ok::<T, std::convert::Infallible>(f(a, b)),
        domain,
        order,
        config,
        T::lit(INNER_TIGHTENING),
    )
}

/// Iterated integral of a fallible integrand.
///
/// Every inner integral runs with tolerances divided by `tightening`. The
/// first inner failure aborts the whole computation. `evaluations` in the
/// result counts integrand calls across all inner integrals.
pub fn try_integrate_iterated<T: Real, E: std::fmt::Display>(
    f: impl Fn(T, T) -> Result<T, E>,
    domain: &ProductDomain<'_, T>,
    order: IterationOrder,
    config: &QuadConfig<T>,
    tightening: T,
) -> Result<QuadResult<T>, QuadError> {
    config.validate()?;
    if !(tightening >= T::one()) {
        return Err(QuadError::InvalidConfig(format!(
            "inner tightening factor must be at least 1, got {tightening}"
        )));
    }
    if order == IterationOrder::OuterFirst && domain.inner_splits.is_some() {
        return Err(QuadError::InvalidDomain(
            "outer-dependent inner splits require inner-first order".into(),
        ));
    }
    let inner_config = config.tightened(tightening);
    let total = Cell::new(0usize);
    let (first, second) = match order {
        IterationOrder::InnerFirst => (&domain.outer, &domain.inner),
        IterationOrder::OuterFirst => (&domain.inner, &domain.outer),
    };
    // The inner absolute tolerance is also divided by the outer weight
    // (when above 1): on a semi-infinite outer range the weights grow without
    // bound, and a flat absolute tolerance would let inner errors of tiny
    // slices dominate the outer sum.
    let mut slice = |u: T, weight: T| -> Result<T, QuadError> {
        let node_config = QuadConfig {
            abs_tol: inner_config.abs_tol / weight.max(T::one()),
            ..inner_config
        };
        let inner_domain = match order {
            IterationOrder::InnerFirst => domain.inner_at(u)?,
            IterationOrder::OuterFirst => second.clone(),
        };
        let mut g = |v: T, _| {
            let r = match order {
                IterationOrder::InnerFirst => f(u, v),
                IterationOrder::OuterFirst => f(v, u),
            };
            r.map_err(|e| QuadError::Evaluation {
                at: v.to_f64().unwrap_or(f64::NAN),
                message: e.to_string(),
            })
        };
        let r = quad::integrate_domain(&mut g, &inner_domain, &node_config)?;
        total.set(total.get() + r.evaluations);
        Ok(r.value)
    };
    let mut r = quad::integrate_domain(&mut slice, first, config)?;
    r.evaluations = total.get();
    Ok(r)
}

/// Integrates in both orders and reports the discrepancy.
///
/// Non-convergence in either order is recorded in `both_converged` with
/// that order's best estimate; other errors propagate.
pub fn fubini_check<T: Real>(
    f: impl Fn(T, T) -> T,
    domain: &ProductDomain<'_, T>,
    config: &QuadConfig<T>,
) -> Result<FubiniReport<T>, QuadError> {
    let run = |order| match integrate_iterated(&f, domain, order, config) {
        Ok(r) => Ok((r.value, true, r.evaluations)),
        Err(QuadError::NonConvergence {
            estimate,
            evaluations,
            ..
        }) => Ok((
            T::from_f64(estimate).unwrap_or_else(T::nan),
            false,
            evaluations,
        )),
        Err(e) => Err(e),
    };
    let (ab, ok_ab, n_ab) = run(IterationOrder::InnerFirst)?;
    let (ba, ok_ba, n_ba) = run(IterationOrder::OuterFirst)?;
    Ok(FubiniReport {
        value_order_ab: ab,
        value_order_ba: ba,
        discrepancy: (ab - ba).abs(),
        both_converged: ok_ab && ok_ba,
        evaluations: n_ab + n_ba,
    })
}
