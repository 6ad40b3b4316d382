//! Zero-sum populations and their summary statistics.

use alloc::vec::Vec;

use crate::scalar::{Scalar, ZERO_SUM_TOL};
use crate::{Error, Result};

/// An immutable population `(x_1, …, x_n)` with `n ≥ 2` and `Σ x_i = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Population<S> {
    values: Vec<S>,
    sum: S,
    abs_sum: S,
}

/// `a = min x_i`, `b = max x_i`, `σ² = (1/n) Σ x_i²` and `α = (1/2) Σ |x_i|`.
#[derive(Debug, Clone, PartialEq)]
pub struct PopulationStats<S> {
    pub a: S,
    pub b: S,
    pub sigma2: S,
    pub alpha: S,
}

impl<S: Scalar> PopulationStats<S> {
    pub fn to_f64(&self) -> PopulationStats<f64> {
        PopulationStats {
            a: self.a.as_f64(),
            b: self.b.as_f64(),
            sigma2: self.sigma2.as_f64(),
            alpha: self.alpha.as_f64(),
        }
    }
}

impl<S: Scalar> Population<S> {
    /// Validates `values`. In float mode the sum may deviate from zero by
    /// `1e-12 · max(1, Σ|x_i|)`; in exact mode it must vanish.
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { len: values.len() });
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite_value()) {
            return Err(Error::NonFinite { index });
        }
        let sum = values.iter().fold(S::zero(), |acc, v| acc + v.clone());
        let abs_sum = values.iter().fold(S::zero(), |acc, v| acc + v.abs());
        let scale = if abs_sum > S::one() { abs_sum.clone() } else { S::one() };
        if !S::is_negligible(&sum, &scale, ZERO_SUM_TOL) {
            return Err(Error::ZeroSumViolation { sum: sum.as_f64(), scale: scale.as_f64() });
        }
        Ok(Self { values, sum, abs_sum })
    }

    /// Subtracts the mean so that arbitrary data satisfies the zero-sum
    /// hypothesis.
    pub fn centered(values: Vec<S>) -> Result<Self> {
        if values.len() < 2 {
            return Err(Error::TooShort { len: values.len() });
        }
        let n = S::from_count(values.len() as u64);
        let mean = values.iter().fold(S::zero(), |acc, v| acc + v.clone()) / n;
        Self::new(values.into_iter().map(|v| v - mean.clone()).collect())
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn sum(&self) -> &S {
        &self.sum
    }

    /// `Σ |x_i|`, which equals `2α`.
    pub fn abs_sum(&self) -> &S {
        &self.abs_sum
    }

    pub fn alpha(&self) -> S {
        self.abs_sum.clone() / S::from_count(2)
    }

    pub fn stats(&self) -> PopulationStats<S> {
        let mut a = self.values[0].clone();
        let mut b = self.values[0].clone();
        let mut squares = S::zero();
        for v in &self.values {
            if *v < a {
                a = v.clone();
            }
            if *v > b {
                b = v.clone();
            }
            squares = squares + v.clone() * v.clone();
        }
        PopulationStats { a, b, sigma2: squares / S::from_count(self.len() as u64), alpha: self.alpha() }
    }

    pub fn negate(&self) -> Self {
        Self {
            values: self.values.iter().map(|v| -v.clone()).collect(),
            sum: -self.sum.clone(),
            abs_sum: self.abs_sum.clone(),
        }
    }

    /// Float copy of the values.
    pub fn to_f64_values(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::as_f64).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use alloc::vec;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn two_point_population() {
        let p = Population::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(*p.abs_sum(), 2.0);
        let s = p.stats();
        assert_eq!((s.a, s.b, s.sigma2, s.alpha), (-1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn mms_extremal_population() {
        let p = Population::new(vec![q(1, 1), q(-1, 3), q(-1, 3), q(-1, 3)]).unwrap();
        assert_eq!(p.len(), 4);
        assert_eq!(*p.abs_sum(), q(2, 1));
        let s = p.stats();
        assert_eq!(s.a, q(-1, 3));
        assert_eq!(s.b, q(1, 1));
        assert_eq!(s.sigma2, q(1, 3));
        assert_eq!(s.alpha, q(1, 1));
    }

    #[test]
    fn extreme_population_stats() {
        let mut values = vec![0.0; 100];
        values[0] = 1.0;
        values[99] = -1.0;
        let s = Population::new(values).unwrap().stats();
        assert_abs_diff_eq!(s.sigma2, 0.02, epsilon = 1e-15);
        assert_eq!((s.a, s.b), (-1.0, 1.0));
    }

    #[test]
    fn rejects_nonzero_sum_and_short_input() {
        assert!(matches!(Population::new(vec![1.0, -0.9]), Err(Error::ZeroSumViolation { .. })));
        assert!(matches!(Population::new(vec![q(1, 3), q(-1, 4)]), Err(Error::ZeroSumViolation { .. })));
        assert_eq!(Population::new(vec![0.0]), Err(Error::TooShort { len: 1 }));
        assert_eq!(Population::<f64>::centered(vec![]), Err(Error::TooShort { len: 0 }));
        assert_eq!(Population::new(vec![f64::NAN, 0.0]), Err(Error::NonFinite { index: 0 }));
    }

    #[test]
    fn float_tolerance_is_relative() {
        assert!(Population::new(vec![1e6, -1e6 + 1e-7]).is_ok());
        assert!(Population::new(vec![1.0, -1.0 + 1e-9]).is_err());
    }

    #[test]
    fn centering() {
        let p = Population::centered(vec![q(3, 1), q(1, 1), q(2, 1)]).unwrap();
        assert_eq!(p.values(), &[q(1, 1), q(-1, 1), q(0, 1)]);
        let p = Population::centered(vec![0.0, 0.0]).unwrap();
        assert_eq!(p.values(), &[0.0, 0.0]);
        let p = Population::centered(vec![5.0, 5.0, 5.0, 1.0]).unwrap();
        assert_eq!(p.values(), &[1.0, 1.0, 1.0, -3.0]);
        assert_eq!(*p.sum(), 0.0);
    }

    #[test]
    fn negation() {
        let p = Population::new(vec![q(1, 1), q(-1, 3), q(-1, 3), q(-1, 3)]).unwrap();
        assert_eq!(p.negate().values(), &[q(-1, 1), q(1, 3), q(1, 3), q(1, 3)]);
        assert_eq!(Population::new(vec![1.0, -1.0]).unwrap().negate().values(), &[-1.0, 1.0]);
    }

    fn raw_values() -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), -10.0..10.0f64], 2..30)
    }

    proptest! {
        #[test]
        fn stats_invariants(raw in raw_values()) {
            let p = Population::centered(raw).unwrap();
            let s = p.stats();
            prop_assert!(s.a <= 1e-12 && s.b >= -1e-12);
            prop_assert!(s.sigma2 >= 0.0 && s.alpha >= 0.0);
            let positive: f64 = p.values().iter().filter(|v| **v > 0.0).sum();
            prop_assert!((p.abs_sum() - 2.0 * positive).abs() <= 1e-9 * (1.0 + p.abs_sum()));
        }

        #[test]
        fn negate_is_an_involution(raw in raw_values()) {
            let p = Population::centered(raw).unwrap();
            prop_assert_eq!(p.negate().negate(), p.clone());
            let (s, t) = (p.stats(), p.negate().stats());
            prop_assert_eq!(s.alpha, t.alpha);
            prop_assert_eq!(s.sigma2, t.sigma2);
            prop_assert_eq!(s.a, -t.b);
            prop_assert_eq!(s.b, -t.a);
        }

        #[test]
        fn centering_is_idempotent(raw in raw_values()) {
            let once = Population::centered(raw).unwrap();
            let twice = Population::centered(once.values().to_vec()).unwrap();
            for (x, y) in once.values().iter().zip(twice.values()) {
                prop_assert!((x - y).abs() <= 1e-12 * (1.0 + once.abs_sum()));
            }
        }

        #[test]
        fn exact_centering_sums_to_zero(raw in prop::collection::vec(-50i64..50, 2..20)) {
            let p = Population::centered(raw.into_iter().map(|v| q(v, 1)).collect()).unwrap();
            prop_assert_eq!(p.sum().clone(), q(0, 1));
            let again = Population::centered(p.values().to_vec()).unwrap();
            prop_assert_eq!(again, p);
        }
    }
}
