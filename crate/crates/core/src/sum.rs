//! Compensated summation.

use crate::real::Real;

/// Kahan–Babuška (Neumaier) accumulator. Deterministic for a fixed input
/// order, which is how every surface integral in this crate is reduced.
#[derive(Debug, Clone, Copy)]
pub struct KahanSum<T: Real> {
    sum: T,
    comp: T,
}

impl<T: Real> Default for KahanSum<T> {
    fn default() -> Self {
        Self::new()
    }
}

impl<T: Real> KahanSum<T> {
    pub fn new() -> Self {
        Self {
            sum: T::zero(),
            comp: T::zero(),
        }
    }

    #[inline]
    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn total(&self) -> T {
        self.sum + self.comp
    }
}

pub fn kahan_sum<T: Real, I: IntoIterator<Item = T>>(it: I) -> T {
    let mut acc = KahanSum::new();
    for x in it {
        acc.add(x);
    }
    acc.total()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_small_terms() {
        let mut v = vec![1.0e16_f64];
        v.extend(std::iter::repeat(1.0).take(1000));
        v.push(-1.0e16);
        assert_eq!(kahan_sum(v), 1000.0);
    }
}
