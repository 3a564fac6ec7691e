use crate::Real;

use super::QuadError;

/// Bounds of an integration range.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DomainKind<T> {
    Finite { lower: T, upper: T },
    SemiInfinite { lower: T },
}

/// An interval plus the interior points where the integrand must not be
/// evaluated (singular or removable-singular points).
///
/// The interval is cut at every split point, so those points become
/// endpoints of sub-intervals and are never sampled.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegrationDomain<T> {
    kind: DomainKind<T>,
    split_points: Vec<T>,
}

/// A single split-free piece of a domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Piece<T> {
    Finite(T, T),
    SemiInfinite(T),
}

impl<T: Real> IntegrationDomain<T> {
    pub fn new(kind: DomainKind<T>, split_points: Vec<T>) -> Result<Self, QuadError> {
        match kind {
            DomainKind::Finite { lower, upper } => {
                if !lower.is_finite() || !upper.is_finite() {
                    return Err(QuadError::InvalidDomain(format!(
                        "finite domain needs finite bounds, got [{lower}, {upper}]"
                    )));
                }
                if lower >= upper {
                    return Err(QuadError::InvalidDomain(format!(
                        "lower bound {lower} must be below upper bound {upper}"
                    )));
                }
            }
            DomainKind::SemiInfinite { lower } => {
                if !lower.is_finite() {
                    return Err(QuadError::InvalidDomain(format!(
                        "semi-infinite domain needs a finite lower bound, got {lower}"
                    )));
                }
            }
        }
        let domain = Self {
            kind,
            split_points: Vec::new(),
        };
        domain.with_splits(split_points)
    }

    pub fn finite(lower: T, upper: T) -> Result<Self, QuadError> {
        Self::new(DomainKind::Finite { lower, upper }, Vec::new())
    }

    pub fn semi_infinite(lower: T) -> Result<Self, QuadError> {
        Self::new(DomainKind::SemiInfinite { lower }, Vec::new())
    }

    /// Replaces the split points. They must be strictly increasing and lie
    /// strictly inside the domain.
    pub fn with_splits(mut self, splits: impl IntoIterator<Item = T>) -> Result<Self, QuadError> {
        let splits: Vec<T> = splits.into_iter().collect();
        for (i, &p) in splits.iter().enumerate() {
            if !self.is_interior(p) {
                return Err(QuadError::InvalidDomain(format!(
                    "split point {p} is not strictly inside the domain"
                )));
            }
            if i > 0 && splits[i - 1] >= p {
                return Err(QuadError::InvalidDomain(format!(
                    "split points must be strictly increasing ({} then {p})",
                    splits[i - 1]
                )));
            }
        }
        self.split_points = splits;
        Ok(self)
    }

    pub fn kind(&self) -> DomainKind<T> {
        self.kind
    }

    pub fn split_points(&self) -> &[T] {
        &self.split_points
    }

    pub fn lower(&self) -> T {
        match self.kind {
            DomainKind::Finite { lower, .. } | DomainKind::SemiInfinite { lower } => lower,
        }
    }

    /// `None` for a semi-infinite domain.
    pub fn upper(&self) -> Option<T> {
        match self.kind {
            DomainKind::Finite { upper, .. } => Some(upper),
            DomainKind::SemiInfinite { .. } => None,
        }
    }

    pub fn is_interior(&self, p: T) -> bool {
        p.is_finite() && p > self.lower() && self.upper().is_none_or(|u| p < u)
    }

    /// Cuts the domain at every split point.
    pub fn pieces(&self) -> Vec<Piece<T>> {
        let mut out = Vec::with_capacity(self.split_points.len() + 1);
        let mut left = self.lower();
        for &p in &self.split_points {
            out.push(Piece::Finite(left, p));
            left = p;
        }
        out.push(match self.upper() {
            Some(u) => Piece::Finite(left, u),
            None => Piece::SemiInfinite(left),
        });
        out
    }
}
