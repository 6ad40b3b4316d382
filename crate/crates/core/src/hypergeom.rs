//! The hypergeometric law `Hyp(n, i, k)`: the number of marked elements in
//! a uniform `k`-subset of `n` elements of which `i` are marked.
//!
//! Exact quantities come back as [`Rational`]s built from big-integer
//! binomial counts. The `f64` pmf is computed from the ratio recurrence
//! `p(m+1)/p(m) = (i-m)(k-m) / ((m+1)(n-i-k+m+1))`, anchored at the mode
//! and normalized over the support, which keeps relative error near
//! machine precision without overflow.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::RangeInclusive;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};

use crate::bounds::{BoundInputs, BoundKind, BoundResult, Inapplicable};
use crate::math::{exp, ln, sqrt, PI};
use crate::scalar::Rational;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Hypergeometric {
    n: u64,
    i: u64,
    k: u64,
}

/// Robbins' bracket `lower < ln(n!) < upper`, in nats.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StirlingBracket {
    pub lower: f64,
    pub upper: f64,
}

pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for j in 0..k {
        acc *= n - j;
        acc /= j + 1;
    }
    acc
}

impl Hypergeometric {
    /// Requires `1 ≤ i ≤ n-1` and `1 ≤ k ≤ n-1`.
    pub fn new(n: u64, i: u64, k: u64) -> Result<Self> {
        if n < 2 || i == 0 || i >= n || k == 0 || k >= n {
            return Err(Error::InvalidHypergeometric { n, i, k });
        }
        Ok(Self { n, i, k })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn marked(&self) -> u64 {
        self.i
    }

    pub fn sample_size(&self) -> u64 {
        self.k
    }

    pub fn support(&self) -> RangeInclusive<u64> {
        self.k.saturating_sub(self.n - self.i)..=self.i.min(self.k)
    }

    /// `Hyp(n, n-i, k)`, the law of `k - H`.
    pub fn complement(&self) -> Self {
        Self { n: self.n, i: self.n - self.i, k: self.k }
    }

    /// `Hyp(n, k, i)`, which has the same pmf.
    pub fn transpose(&self) -> Self {
        Self { n: self.n, i: self.k, k: self.i }
    }

    /// `n - i - k + m`, the count of unmarked elements left out of the sample.
    fn rest(&self, m: u64) -> u64 {
        (self.n + m) - self.i - self.k
    }

    fn up_ratio(&self, m: u64) -> f64 {
        ((self.i - m) as f64 * (self.k - m) as f64) / ((m + 1) as f64 * (self.rest(m) + 1) as f64)
    }

    /// `C(i, m) · C(n-i, k-m)` for every `m` in the support.
    pub fn counts(&self) -> Vec<BigUint> {
        let support = self.support();
        let (lo, hi) = (*support.start(), *support.end());
        let mut counts = Vec::with_capacity((hi - lo + 1) as usize);
        let mut current = binomial(self.i, lo) * binomial(self.n - self.i, self.k - lo);
        for m in lo..=hi {
            counts.push(current.clone());
            if m < hi {
                current = current * ((self.i - m) * (self.k - m)) / ((m + 1) * (self.rest(m) + 1));
            }
        }
        counts
    }

    /// `C(n, k)`.
    pub fn total(&self) -> BigUint {
        binomial(self.n, self.k)
    }

    /// Float pmf over the support, indexed from `support().start()`.
    pub fn pmf_table(&self) -> Vec<f64> {
        let support = self.support();
        let (lo, hi) = (*support.start(), *support.end());
        let mode = (((self.i + 1) * (self.k + 1)) / (self.n + 2)).clamp(lo, hi);
        let mut weights = vec![0.0; (hi - lo + 1) as usize];
        let at = |m: u64| (m - lo) as usize;
        weights[at(mode)] = 1.0;
        for m in mode..hi {
            weights[at(m + 1)] = weights[at(m)] * self.up_ratio(m);
        }
        for m in (lo + 1..=mode).rev() {
            weights[at(m - 1)] = weights[at(m)] / self.up_ratio(m - 1);
        }
        let total: f64 = weights.iter().sum();
        weights.iter_mut().for_each(|w| *w /= total);
        weights
    }

    fn support_index(&self, m: i64) -> Option<usize> {
        let support = self.support();
        let m = u64::try_from(m).ok()?;
        support.contains(&m).then(|| (m - support.start()) as usize)
    }

    /// `P(H = m)`; zero off the support.
    pub fn pmf(&self, m: i64) -> f64 {
        self.support_index(m).map_or(0.0, |idx| self.pmf_table()[idx])
    }

    pub fn pmf_exact(&self, m: i64) -> Rational {
        match self.support_index(m) {
            Some(idx) => ratio(&self.counts()[idx], &self.total()),
            None => Rational::zero(),
        }
    }

    /// `P(H ≤ m)`.
    pub fn cdf(&self, m: i64) -> f64 {
        let support = self.support();
        if m < *support.start() as i64 {
            return 0.0;
        }
        if m >= *support.end() as i64 {
            return 1.0;
        }
        let upto = (m as u64 - support.start()) as usize;
        self.pmf_table()[..=upto].iter().sum()
    }

    pub fn cdf_exact(&self, m: i64) -> Rational {
        let support = self.support();
        if m < *support.start() as i64 {
            return Rational::zero();
        }
        if m >= *support.end() as i64 {
            return Rational::one();
        }
        let upto = (m as u64 - support.start()) as usize;
        let favourable: BigUint = self.counts()[..=upto].iter().sum();
        ratio(&favourable, &self.total())
    }

    /// `ik/n`.
    pub fn mean(&self) -> f64 {
        (self.i * self.k) as f64 / self.n as f64
    }

    pub fn mean_exact(&self) -> Rational {
        Rational::new(BigInt::from(self.i * self.k), BigInt::from(self.n))
    }

    /// `k · (i/n) · ((n-i)/n) · ((n-k)/(n-1))`.
    pub fn variance(&self) -> f64 {
        let (n, i, k) = (self.n as f64, self.i as f64, self.k as f64);
        k * (i / n) * ((n - i) / n) * ((n - k) / (n - 1.0))
    }

    pub fn variance_exact(&self) -> Rational {
        let (n, i, k) = (BigInt::from(self.n), BigInt::from(self.i), BigInt::from(self.k));
        let num = &k * &i * (&n - &i) * (&n - &k);
        let den = &n * &n * (&n - 1u32);
        Rational::new(num, den)
    }

    /// `m = ⌈ik/n⌉`, so that `ik/n ∈ (m-1, m]`.
    pub fn mean_ceiling(&self) -> u64 {
        (self.i * self.k).div_ceil(self.n)
    }

    /// Mean absolute deviation `E|H - ik/n|` through the closed form
    /// `(2m/n) · (n-i-k+m) · P(H = m)` with `m = ⌈ik/n⌉`.
    pub fn mean_abs_deviation(&self) -> f64 {
        let m = self.mean_ceiling();
        2.0 * m as f64 / self.n as f64 * self.rest(m) as f64 * self.pmf(m as i64)
    }

    pub fn mean_abs_deviation_exact(&self) -> Rational {
        let m = self.mean_ceiling();
        let factor = Rational::new(BigInt::from(2 * m * self.rest(m)), BigInt::from(self.n));
        factor * self.pmf_exact(m as i64)
    }

    /// `n / (2i(n-i)) · E|H - ik/n|`; the lower bound on `P(X_P > 0)`
    /// contributed by the two-block population with `i` positive entries.
    pub fn normalized_mad(&self) -> f64 {
        self.n as f64 / (2.0 * self.i as f64 * (self.n - self.i) as f64) * self.mean_abs_deviation()
    }

    pub fn normalized_mad_exact(&self) -> Rational {
        let scale = Rational::new(BigInt::from(self.n), BigInt::from(2 * self.i * (self.n - self.i)));
        scale * self.mean_abs_deviation_exact()
    }

    /// Lower bound on `P(H = m)` at `m = ⌈ik/n⌉`:
    /// `e^{-1/3}/(16√(2π)) · √(i(n-i)k(n-k) / (m(i-m)(k-m)(n-i-k+m) n))`.
    /// Applicable when `m ∈ {2, …, min(i,k) - 1}`.
    pub fn mode_probability_lower_bound(&self) -> BoundResult {
        let inputs = BoundInputs { n: Some(self.n), k: Some(self.k), ..Default::default() };
        let m = self.mean_ceiling();
        if m < 2 || m + 1 > self.i.min(self.k) {
            return BoundResult::inapplicable(BoundKind::Lower, Inapplicable::ModeOutOfRange { m }, inputs);
        }
        let (n, i, k, mf) = (self.n as f64, self.i as f64, self.k as f64, m as f64);
        let num = i * (n - i) * k * (n - k);
        let den = mf * (i - mf) * (k - mf) * self.rest(m) as f64 * n;
        let c = exp(-1.0 / 3.0) / (16.0 * sqrt(2.0 * PI));
        BoundResult::new(BoundKind::Lower, c * sqrt(num / den), inputs)
    }
}

fn ratio(num: &BigUint, den: &BigUint) -> Rational {
    Rational::new(BigInt::from(num.clone()), BigInt::from(den.clone()))
}

/// `c · √(k/n) · √(n-k) / n` with `c = e^{-1/3}/(8√(2π))`: the uniform lower
/// bound on [`Hypergeometric::normalized_mad`] over all `i`.
pub fn mad_normalized_lower_bound(n: u64, k: u64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    crate::bounds::zero_threshold_constant() * sqrt(kf / nf) * sqrt(nf - kf) / nf
}

/// Robbins' refinement of Stirling's formula,
/// `√(2πn)(n/e)^n e^{1/(12n+1)} < n! < √(2πn)(n/e)^n e^{1/(12n)}`, in logs.
pub fn robbins_bounds(n: u64) -> Result<StirlingBracket> {
    if n == 0 {
        return Err(Error::Domain(alloc::format!("Robbins' bracket needs n ≥ 1, got {n}")));
    }
    let nf = n as f64;
    let base = 0.5 * ln(2.0 * PI * nf) + nf * ln(nf) - nf;
    Ok(StirlingBracket { lower: base + 1.0 / (12.0 * nf + 1.0), upper: base + 1.0 / (12.0 * nf) })
}

impl StirlingBracket {
    pub fn contains(&self, value: f64) -> bool {
        self.lower < value && value < self.upper
    }
}

/// `ln` of a big unsigned integer, accurate to double precision.
pub fn ln_big(value: &BigUint) -> f64 {
    let bits = value.bits();
    if bits <= 1000 {
        return ln(value.to_f64().unwrap_or(f64::INFINITY));
    }
    let shift = bits - 64;
    let top = (value >> shift).to_f64().unwrap_or(f64::NAN);
    ln(top) + shift as f64 * core::f64::consts::LN_2
}
