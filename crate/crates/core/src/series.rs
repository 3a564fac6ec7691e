//! Sums over odd integers and the log-moment integrals they come from.
//!
//! * `OddPower`: `Σ_{k≥0} 1/(2k+1)^s` (Dirichlet lambda).
//! * `AlternatingOddPower`: `Σ_{k≥0} (-1)^k/(2k+1)^s` (Dirichlet beta).
//!
//! `OddPower` adds an Euler–Maclaurin tail to a short partial sum. With
//! `f(k) = (2k+1)^-s` and `m = 2N+1`:
//!
//! ```text
//! Σ_{k≥N} f(k) ≈ ∫_N^∞ f + f(N)/2 - f'(N)/12
//!             = m^(1-s)/(2(s-1)) + m^-s/2 + s·m^(-s-1)/6
//! ```
//!
//! `f` is completely monotone, so the remainder has the sign of, and is
//! smaller than, the first omitted correction `f'''(N)/720`, whose
//! magnitude is `s(s+1)(s+2)·m^(-s-3)/90`.

use num_traits::{FromPrimitive, Num};
use serde::Serialize;
use thiserror::Error;

use crate::compensated::CompensatedSum;
use crate::Real;

/// Largest partial-sum length either family will use.
pub const MAX_TERMS: u64 = 10_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SeriesError {
    #[error("series exponent must be at least 2, got {0}")]
    InvalidExponent(u32),
    #[error("tolerance must be positive and finite, got {0}")]
    InvalidTolerance(f64),
    #[error("tolerance {tol:e} needs more than {MAX_TERMS} terms or lies below rounding")]
    ToleranceUnreachable { tol: f64 },
    #[error("log power must be 1, 2 or 3, got {0}")]
    UnsupportedPower(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SeriesFamily {
    /// `Σ 1/(2k+1)^s`
    OddPower,
    /// `Σ (-1)^k/(2k+1)^s`
    AlternatingOddPower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeriesSpec {
    family: SeriesFamily,
    exponent: u32,
}

impl SeriesSpec {
    pub fn new(family: SeriesFamily, exponent: u32) -> Result<Self, SeriesError> {
        if exponent < 2 {
            return Err(SeriesError::InvalidExponent(exponent));
        }
        Ok(Self { family, exponent })
    }

    pub fn odd(exponent: u32) -> Result<Self, SeriesError> {
        Self::new(SeriesFamily::OddPower, exponent)
    }

    pub fn alternating(exponent: u32) -> Result<Self, SeriesError> {
        Self::new(SeriesFamily::AlternatingOddPower, exponent)
    }

    pub fn family(&self) -> SeriesFamily {
        self.family
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SeriesResult<T> {
    pub value: T,
    pub terms_used: u64,
    pub tail_bound: T,
}

fn odd_term<T: Real>(k: u64, s: u32) -> T {
    T::lit((2 * k + 1) as f64).powi(-(s as i32))
}

/// Magnitude of the first omitted Euler–Maclaurin correction at `N`.
fn em_remainder_bound<T: Real>(n: u64, s: u32) -> T {
    let m = T::lit((2 * n + 1) as f64);
    let s_ = T::lit(s as f64);
    s_ * (s_ + T::one()) * (s_ + T::lit(2.0)) * m.powi(-(s as i32) - 3) / T::lit(90.0)
}

fn em_tail<T: Real>(n: u64, s: u32) -> T {
    let m = T::lit((2 * n + 1) as f64);
    let s_ = T::lit(s as f64);
    let integral = m.powi(1 - s as i32) / (T::lit(2.0) * (s_ - T::one()));
    let half = m.powi(-(s as i32)) / T::lit(2.0);
    let derivative = s_ * m.powi(-(s as i32) - 1) / T::lit(6.0);
    integral + half + derivative
}

/// Partial sum `Σ_{k<n}`, ascending, compensated.
fn partial_sum<T: Real>(spec: &SeriesSpec, n: u64) -> T {
    let mut acc = CompensatedSum::new();
    for k in 0..n {
        let t: T = odd_term(k, spec.exponent);
        match spec.family {
            SeriesFamily::AlternatingOddPower if k % 2 == 1 => acc.add(-t),
            _ => acc.add(t),
        }
    }
    acc.value()
}

/// Smallest `n` (from 1) for which `bound(n) <= target`, or `None` past
/// [`MAX_TERMS`].
fn terms_needed<T: Real>(target: T, bound: impl Fn(u64) -> T) -> Option<u64> {
    // Bounds are decreasing in n: gallop, then bisect.
    let mut hi = 1u64;
    while bound(hi) > target {
        if hi >= MAX_TERMS {
            return None;
        }
        hi = (hi * 2).min(MAX_TERMS);
    }
    let mut lo = hi / 2;
    if lo == 0 {
        return Some(hi);
    }
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(hi)
}

/// Sums `spec` to within `tol`.
///
/// The returned `tail_bound` covers the truncation (or Euler–Maclaurin)
/// remainder plus a rounding allowance of a few ulps of the value, and is
/// at most `tol`.
pub fn sum_series<T: Real>(spec: SeriesSpec, tol: T) -> Result<SeriesResult<T>, SeriesError> {
    let tol_f = tol.to_f64().unwrap_or(f64::NAN);
    if !(tol > T::zero()) || !tol.is_finite() {
        return Err(SeriesError::InvalidTolerance(tol_f));
    }
    // Values of both families lie in (0.5, 1.25]; reserve room for rounding.
    let rounding = T::lit(8.0) * T::epsilon() * T::lit(1.25);
    let budget = tol - rounding;
    if !(budget > T::zero()) {
        return Err(SeriesError::ToleranceUnreachable { tol: tol_f });
    }
    let s = spec.exponent;
    let unreachable = || SeriesError::ToleranceUnreachable { tol: tol_f };
    let (value, terms_used, truncation) = match spec.family {
        SeriesFamily::OddPower => {
            let n =
                terms_needed(budget, |n| em_remainder_bound::<T>(n, s)).ok_or_else(unreachable)?;
            let value = partial_sum::<T>(&spec, n) + em_tail::<T>(n, s);
            (value, n, em_remainder_bound::<T>(n, s))
        }
        SeriesFamily::AlternatingOddPower => {
            // Error of an alternating partial sum is below the first omitted term.
            let n = terms_needed(budget, |n| odd_term::<T>(n, s)).ok_or_else(unreachable)?;
            (partial_sum::<T>(&spec, n), n, odd_term::<T>(n, s))
        }
    };
    Ok(SeriesResult {
        value,
        terms_used,
        tail_bound: truncation + rounding,
    })
}

/// `ζ(2)` from the odd-square sum: splitting `Σ 1/n²` into odd and even
/// terms gives `ζ(2) = λ(2) + ζ(2)/4`, hence `ζ(2) = (4/3)·λ(2)`.
///
/// Generic over any field, so exact rationals stay exact. The input is
/// expected to be positive.
pub fn zeta2_from_odd<T: Num + FromPrimitive + Clone>(odd_sum: T) -> T {
    let four = T::from_u8(4).expect("4 representable");
    let three = T::from_u8(3).expect("3 representable");
    odd_sum * four / three
}

/// Closed form of `∫₀¹ y^(2k) ln^p(y) dy = (-1)^p·p!/(2k+1)^(p+1)` for
/// `p ∈ {1, 2, 3}`.
pub fn moment_integral<T: Num + FromPrimitive + Clone>(k: u64, p: u32) -> Result<T, SeriesError> {
    let factorial: i64 = match p {
        1 => 1,
        2 => 2,
        3 => 6,
        other => return Err(SeriesError::UnsupportedPower(other)),
    };
    let numerator = if p % 2 == 1 { -factorial } else { factorial };
    let base = T::from_u64(2 * k + 1).expect("odd base representable");
    let mut denominator = T::one();
    for _ in 0..=p {
        denominator = denominator * base.clone();
    }
    Ok(T::from_i64(numerator).expect("numerator representable") / denominator)
}
