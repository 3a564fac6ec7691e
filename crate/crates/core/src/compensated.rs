//! Compensated summation built on the two-sum error-free transform.

use num_traits::Float;

/// Returns `(s, e)` with `s = fl(a + b)` and `a + b = s + e` exactly.
#[inline]
pub fn two_sum<T: Float>(a: T, b: T) -> (T, T) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

/// Running sum that carries the rounding error of every addition.
#[derive(Debug, Clone, Copy)]
pub struct CompensatedSum<T> {
    sum: T,
    err: T,
}

impl<T: Float> Default for CompensatedSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Float> CompensatedSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            err: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, value: T) {
        let (s, e) = two_sum(self.sum, value);
        self.sum = s;
        self.err = self.err + e;
    }

    #[inline]
    pub fn value(&self) -> T {
        self.sum + self.err
    }
}

impl<T: Float> Extend<T> for CompensatedSum<T> {
    fn extend<I: IntoIterator<Item = T>>(&mut self, iter: I) {
        for v in iter {
            self.add(v);
        }
    }
}

impl<T: Float> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        acc.extend(iter);
        acc
    }
}

/// Compensated sum of an iterator.
pub fn sum<T: Float, I: IntoIterator<Item = T>>(iter: I) -> T {
    iter.into_iter().collect::<CompensatedSum<T>>().value()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_sum_is_exact() {
        let (s, e) = two_sum(1.0f64, 1e-17);
        assert_eq!(s, 1.0);
        assert_eq!(e, 1e-17);
    }

    #[test]
    fn recovers_small_terms_lost_by_naive_sum() {
        let values = [1.0f64, 1e100, 1.0, -1e100];
        let naive: f64 = values.iter().sum();
        assert_eq!(naive, 0.0);
        assert_eq!(sum(values), 2.0);
    }

    #[test]
    fn many_tenths() {
        let n = 1_000_000;
        let s = sum(std::iter::repeat_n(0.1f64, n));
        assert!((s - 100_000.0).abs() < 1e-9);
    }

    #[test]
    fn works_for_f32() {
        let s = sum([1.0f32, 1e-8, 1e-8, 1e-8]);
        assert!((s - 1.000_000_03).abs() < 1e-7);
    }
}
