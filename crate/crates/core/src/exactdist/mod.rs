//! Exact and simulated distributions of `X_P`, the sum of a uniform
//! `k`-subset of a population.
//!
//! [`exact_distribution`] enumerates every subset; [`two_block_distribution`]
//! and [`extreme_distribution`] give the same law in closed form for the two
//! populations the bounds are built on; [`mc_tail`] estimates tails beyond
//! the enumeration budget.

mod enumerate;
mod montecarlo;

use alloc::vec::Vec;
use core::cmp::Ordering;

use num_bigint::{BigInt, BigUint};
use num_traits::Zero;

pub use enumerate::RevolvingDoor;
pub use montecarlo::{mc_tail, MCEstimate, TailSampler, DEFAULT_SHARDS};

use crate::hypergeom::{binomial, Hypergeometric};
use crate::population::Population;
use crate::scalar::{Scalar, ATOM_TOL};
use crate::{Error, Result};

/// Caps on exhaustive enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    pub max_n: usize,
    pub max_subsets: u64,
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self { max_n: 25, max_subsets: 5_000_000 }
    }
}

impl EnumerationBudget {
    pub fn allows(&self, n: usize, k: usize) -> bool {
        n <= self.max_n && binomial(n as u64, k as u64) <= BigUint::from(self.max_subsets)
    }
}

/// A finite law on sums: atoms with big-integer multiplicities over
/// `C(n, k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteDistribution<S> {
    support: Vec<S>,
    counts: Vec<BigUint>,
    denominator: BigUint,
    n: usize,
    k: usize,
    /// Half absolute deviation of the source population; float
    /// comparisons are relative to it.
    scale: S,
}

/// Positive/negative part decomposition of a mean-zero law.
#[derive(Debug, Clone, PartialEq)]
pub struct PositivePartIdentities<S> {
    pub e_plus: S,
    pub e_minus: S,
    pub e_abs: S,
    pub p_positive: S,
    /// `E(X | X > 0)`.
    pub cond_mean_pos: S,
    /// `P(X > 0) - E|X| / (2 E(X | X > 0))`, zero for every mean-zero law.
    pub folklore_residual: S,
}

fn check_sample<S: Scalar>(pop: &Population<S>, k: usize) -> Result<()> {
    let n = pop.len();
    if k == 0 || k >= n {
        return Err(Error::InvalidSampleSize { n, k });
    }
    Ok(())
}

pub fn exact_distribution<S: Scalar>(pop: &Population<S>, k: usize) -> Result<DiscreteDistribution<S>> {
    exact_distribution_with_budget(pop, k, EnumerationBudget::default())
}

/// Enumerates all `C(n, k)` subsets with a revolving-door walk and groups
/// equal sums.
pub fn exact_distribution_with_budget<S: Scalar>(
    pop: &Population<S>,
    k: usize,
    budget: EnumerationBudget,
) -> Result<DiscreteDistribution<S>> {
    check_sample(pop, k)?;
    let n = pop.len();
    if !budget.allows(n, k) {
        return Err(Error::TooLarge { n, k });
    }
    let scale = pop.alpha();
    let atoms = S::subset_sum_atoms(pop.values(), k, &scale);
    let (support, counts) = atoms.into_iter().map(|(v, c)| (v, BigUint::from(c))).unzip();
    Ok(DiscreteDistribution { support, counts, denominator: binomial(n as u64, k as u64), n, k, scale })
}

/// Law of `X` for the two-block population with `i` entries `α/i` and
/// `n-i` entries `-α/(n-i)`: `X = (αn / (i(n-i))) · (H - ik/n)` with
/// `H ~ Hyp(n, i, k)`.
pub fn two_block_distribution<S: Scalar>(n: u64, i: u64, k: u64, alpha: S) -> Result<DiscreteDistribution<S>> {
    let h = Hypergeometric::new(n, i, k)?;
    if !(alpha > S::zero()) {
        return Err(Error::DegeneratePopulation);
    }
    let den = BigInt::from(i * (n - i));
    let support = h
        .support()
        .map(|m| {
            let num = BigInt::from(n * m) - BigInt::from(i * k);
            alpha.clone() * S::from_ratio(num, den.clone())
        })
        .collect();
    Ok(DiscreteDistribution {
        support,
        counts: h.counts(),
        denominator: h.total(),
        n: n as usize,
        k: k as usize,
        scale: alpha,
    })
}

/// Law of `X` for `(α, 0, …, 0, -α)`: `±α` each with probability
/// `k(n-k)/(n(n-1))`, zero otherwise.
pub fn extreme_distribution<S: Scalar>(n: u64, k: u64, alpha: S) -> Result<DiscreteDistribution<S>> {
    if n < 2 || k == 0 || k >= n {
        return Err(Error::InvalidSampleSize { n: n as usize, k: k as usize });
    }
    if !(alpha > S::zero()) {
        return Err(Error::DegeneratePopulation);
    }
    let total = binomial(n, k);
    let side = binomial(n - 2, k - 1);
    let middle = &total - &side - &side;
    let mut support = Vec::with_capacity(3);
    let mut counts = Vec::with_capacity(3);
    support.push(-alpha.clone());
    counts.push(side.clone());
    if !middle.is_zero() {
        support.push(S::zero());
        counts.push(middle);
    }
    support.push(alpha.clone());
    counts.push(side);
    Ok(DiscreteDistribution { support, counts, denominator: total, n: n as usize, k: k as usize, scale: alpha })
}

impl<S: Scalar> DiscreteDistribution<S> {
    pub fn support(&self) -> &[S] {
        &self.support
    }

    pub fn counts(&self) -> &[BigUint] {
        &self.counts
    }

    pub fn denominator(&self) -> &BigUint {
        &self.denominator
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn scale(&self) -> &S {
        &self.scale
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    pub fn probabilities(&self) -> Vec<S> {
        self.counts.iter().map(|c| S::from_counts(c, &self.denominator)).collect()
    }

    /// `(value, probability)` pairs in increasing order of value.
    pub fn atoms(&self) -> impl Iterator<Item = (&S, S)> + '_ {
        self.support.iter().zip(self.probabilities())
    }

    fn cmp_to(&self, value: &S, threshold: &S) -> Ordering {
        S::cmp_within(value, threshold, &self.scale, ATOM_TOL)
    }

    fn mass_where(&self, keep: impl Fn(&S) -> bool) -> S {
        let favourable: BigUint =
            self.support.iter().zip(&self.counts).filter(|(v, _)| keep(v)).map(|(_, c)| c).sum();
        S::from_counts(&favourable, &self.denominator)
    }

    /// `P(X > t)` when `strict`, else `P(X ≥ t)`. In float mode atoms within
    /// the grouping tolerance of `t` count as equal to `t`.
    pub fn tail_probability(&self, t: &S, strict: bool) -> S {
        self.mass_where(|v| match self.cmp_to(v, t) {
            Ordering::Greater => true,
            Ordering::Equal => !strict,
            Ordering::Less => false,
        })
    }

    /// `E f(X)`.
    pub fn expectation(&self, f: impl Fn(&S) -> S) -> S {
        self.atoms().fold(S::zero(), |acc, (v, p)| acc + f(v) * p)
    }

    pub fn mean(&self) -> S {
        self.expectation(|v| v.clone())
    }

    pub fn expected_abs(&self) -> S {
        self.expectation(|v| v.abs())
    }

    pub fn positive_part_identities(&self) -> Result<PositivePartIdentities<S>> {
        if !S::is_negligible(&self.mean(), &self.scale, ATOM_TOL) {
            return Err(Error::Domain(alloc::format!("distribution mean {:?} is not zero", self.mean())));
        }
        let zero = S::zero();
        let positive = |v: &S| self.cmp_to(v, &zero) == Ordering::Greater;
        let negative = |v: &S| self.cmp_to(v, &zero) == Ordering::Less;
        let e_plus = self.expectation(|v| if positive(v) { v.clone() } else { S::zero() });
        let e_minus = self.expectation(|v| if negative(v) { -v.clone() } else { S::zero() });
        let e_abs = self.expected_abs();
        let p_positive = self.mass_where(positive);
        if p_positive.is_zero() {
            return Err(Error::NoPositiveMass);
        }
        let cond_mean_pos = e_plus.clone() / p_positive.clone();
        let two = S::from_count(2);
        let folklore_residual = p_positive.clone() - e_abs.clone() / (two * cond_mean_pos.clone());
        Ok(PositivePartIdentities { e_plus, e_minus, e_abs, p_positive, cond_mean_pos, folklore_residual })
    }

    /// Same atoms and probabilities, up to the float grouping tolerance.
    pub fn matches(&self, other: &Self) -> bool {
        let scale = if self.scale > other.scale { &self.scale } else { &other.scale };
        self.n == other.n
            && self.k == other.k
            && self.len() == other.len()
            && self.support.iter().zip(&other.support).all(|(a, b)| S::cmp_within(a, b, scale, ATOM_TOL).is_eq())
            && self.probabilities().iter().zip(other.probabilities()).all(|(p, q)| {
                S::cmp_within(p, &q, &S::one(), 1e-12).is_eq()
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::majorization::{extreme_population, minimal_population};
    use crate::Rational;
    use alloc::vec;
    use alloc::vec::Vec;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn pop(values: &[(i64, i64)]) -> Population<Rational> {
        Population::new(values.iter().map(|&(n, d)| q(n, d)).collect()).unwrap()
    }

    fn atoms(d: &DiscreteDistribution<Rational>) -> Vec<(Rational, Rational)> {
        d.atoms().map(|(v, p)| (v.clone(), p)).collect()
    }

    /// Oracle: brute force over bitmasks.
    fn brute_tail(values: &[f64], k: usize, t: f64, strict: bool) -> f64 {
        let n = values.len();
        let (mut hit, mut total) = (0u64, 0u64);
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != k {
                continue;
            }
            let s: f64 = (0..n).filter(|j| mask >> j & 1 == 1).map(|j| values[j]).sum();
            total += 1;
            if (strict && s > t + 1e-9) || (!strict && s >= t - 1e-9) {
                hit += 1;
            }
        }
        hit as f64 / total as f64
    }

    #[test]
    fn enumeration_examples() {
        let mms = pop(&[(1, 1), (-1, 3), (-1, 3), (-1, 3)]);
        let d = exact_distribution(&mms, 2).unwrap();
        assert_eq!(atoms(&d), vec![(q(-2, 3), q(1, 2)), (q(2, 3), q(1, 2))]);
        assert_eq!(d.counts(), &[BigUint::from(3u32), BigUint::from(3u32)]);
        assert_eq!(*d.denominator(), BigUint::from(6u32));

        let d = exact_distribution(&pop(&[(1, 1), (-1, 1)]), 1).unwrap();
        assert_eq!(atoms(&d), vec![(q(-1, 1), q(1, 2)), (q(1, 1), q(1, 2))]);

        let d = exact_distribution(&pop(&[(1, 1), (0, 1), (0, 1), (-1, 1)]), 2).unwrap();
        assert_eq!(atoms(&d), vec![(q(-1, 1), q(1, 3)), (q(0, 1), q(1, 3)), (q(1, 1), q(1, 3))]);
    }

    #[test]
    fn enumeration_rejects_bad_k_and_budget() {
        let p = Population::new(vec![1.0, -1.0]).unwrap();
        assert_eq!(exact_distribution(&p, 0).unwrap_err(), Error::InvalidSampleSize { n: 2, k: 0 });
        assert_eq!(exact_distribution(&p, 2).unwrap_err(), Error::InvalidSampleSize { n: 2, k: 2 });
        let mut values = vec![0.0; 40];
        values[0] = 1.0;
        values[1] = -1.0;
        let p = Population::new(values).unwrap();
        assert_eq!(exact_distribution(&p, 20).unwrap_err(), Error::TooLarge { n: 40, k: 20 });
        let tight = EnumerationBudget { max_n: 25, max_subsets: 50 };
        let p = Population::new(vec![1.0, -1.0, 2.0, -2.0, 0.0, 0.0, 0.0, 0.0]).unwrap();
        assert!(exact_distribution_with_budget(&p, 4, tight).is_err());
        assert!(exact_distribution_with_budget(&p, 1, tight).is_ok());
    }

    #[test]
    fn tails() {
        let mms = exact_distribution(&pop(&[(1, 1), (-1, 3), (-1, 3), (-1, 3)]), 2).unwrap();
        assert_eq!(mms.tail_probability(&q(0, 1), true), q(1, 2));
        assert_eq!(mms.tail_probability(&q(-5, 1), false), q(1, 1));
        let ext = exact_distribution(&pop(&[(1, 1), (0, 1), (0, 1), (-1, 1)]), 2).unwrap();
        assert_eq!(ext.tail_probability(&q(0, 1), false), q(2, 3));
        assert_eq!(ext.tail_probability(&q(0, 1), true), q(1, 3));
    }

    #[test]
    fn float_tails_match_brute_force() {
        let values = [0.7, -0.2, 0.1, -0.35, 0.05, -0.3, 0.0, 0.0];
        let p = Population::new(values.to_vec()).unwrap();
        for k in 1..values.len() {
            let d = exact_distribution(&p, k).unwrap();
            for t in [-0.4, -0.1, 0.0, 0.05, 0.1, 0.3, 0.6] {
                for strict in [false, true] {
                    let expected = brute_tail(&values, k, t, strict);
                    assert!((d.tail_probability(&t, strict) - expected).abs() < 1e-12, "k={k} t={t}");
                }
            }
        }
    }

    #[test]
    fn expected_abs_examples() {
        let two = exact_distribution(&pop(&[(1, 1), (-1, 1)]), 1).unwrap();
        assert_eq!(two.expected_abs(), q(1, 1));
        let mms = exact_distribution(&pop(&[(1, 1), (-1, 3), (-1, 3), (-1, 3)]), 2).unwrap();
        assert_eq!(mms.expected_abs(), q(2, 3));
        let ext = exact_distribution(&pop(&[(1, 1), (0, 1), (0, 1), (-1, 1)]), 2).unwrap();
        assert_eq!(ext.expected_abs(), q(2, 3));
    }

    #[test]
    fn folklore_identity_examples() {
        let two = exact_distribution(&pop(&[(1, 1), (-1, 1)]), 1).unwrap();
        let id = two.positive_part_identities().unwrap();
        assert_eq!((id.e_plus.clone(), id.e_minus.clone()), (q(1, 2), q(1, 2)));
        assert_eq!(id.cond_mean_pos, q(1, 1));
        assert_eq!(id.folklore_residual, q(0, 1));

        let mms = exact_distribution(&pop(&[(1, 1), (-1, 3), (-1, 3), (-1, 3)]), 2).unwrap();
        let id = mms.positive_part_identities().unwrap();
        assert_eq!(id.cond_mean_pos, q(2, 3));
        assert_eq!(id.folklore_residual, q(0, 1));

        let ext = exact_distribution(&pop(&[(1, 1), (0, 1), (0, 1), (-1, 1)]), 2).unwrap();
        assert_eq!(ext.positive_part_identities().unwrap().folklore_residual, q(0, 1));

        let zeros = exact_distribution(&Population::new(vec![0.0, 0.0, 0.0]).unwrap(), 1).unwrap();
        assert_eq!(zeros.positive_part_identities().unwrap_err(), Error::NoPositiveMass);
    }

    #[test]
    fn two_block_examples() {
        let d = two_block_distribution(4, 1, 2, q(1, 1)).unwrap();
        assert_eq!(atoms(&d), vec![(q(-2, 3), q(1, 2)), (q(2, 3), q(1, 2))]);
        let d = two_block_distribution(2, 1, 1, q(1, 1)).unwrap();
        assert_eq!(atoms(&d), vec![(q(-1, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        // m ∈ {0,1,2} maps to (5/6)(m - 4/5)
        let d = two_block_distribution(5, 2, 2, q(1, 1)).unwrap();
        assert_eq!(
            atoms(&d),
            vec![(q(-2, 3), q(3, 10)), (q(1, 6), q(6, 10)), (q(1, 1), q(1, 10))]
        );
        let minimal = minimal_population(&pop(&[(1, 2), (1, 2), (-1, 2), (-1, 2), (0, 1)])).unwrap();
        assert_eq!(minimal.index_i, 3);
        assert_eq!(
            exact_distribution(&minimal.minimal_vector, 2).unwrap(),
            two_block_distribution(5, 3, 2, q(1, 1)).unwrap()
        );
        assert!(two_block_distribution(5, 0, 2, q(1, 1)).is_err());
        assert!(two_block_distribution(5, 2, 2, q(0, 1)).is_err());
    }

    #[test]
    fn extreme_examples() {
        let d = extreme_distribution(4, 2, q(1, 1)).unwrap();
        assert_eq!(atoms(&d), vec![(q(-1, 1), q(1, 3)), (q(0, 1), q(1, 3)), (q(1, 1), q(1, 3))]);
        assert_eq!(d, exact_distribution(&extreme_population(4, q(1, 1)).unwrap(), 2).unwrap());
        let d = extreme_distribution(2, 1, q(1, 1)).unwrap();
        assert_eq!(atoms(&d), vec![(q(-1, 1), q(1, 2)), (q(1, 1), q(1, 2))]);
        let d = extreme_distribution(100, 50, q(1, 1)).unwrap();
        let probs = d.probabilities();
        assert_eq!(probs[0], q(2500, 9900));
        assert_eq!(probs[1], q(4900, 9900));
        assert_eq!(probs[0].clone() * q(2, 1) + probs[1].clone(), q(1, 1));
    }

    #[test]
    fn float_distributions_match_closed_forms() {
        for n in 2..=10u64 {
            for k in 1..n {
                let p = extreme_population(n as usize, 1.5).unwrap();
                let enumerated = exact_distribution(&p, k as usize).unwrap();
                assert!(enumerated.matches(&extreme_distribution(n, k, 1.5).unwrap()));
                for i in 1..n {
                    let two = two_block_distribution(n, i, k, 0.75).unwrap();
                    let mut values = vec![0.75 / i as f64; i as usize];
                    values.extend(vec![-0.75 / (n - i) as f64; (n - i) as usize]);
                    let enumerated = exact_distribution(&Population::new(values).unwrap(), k as usize).unwrap();
                    assert!(enumerated.matches(&two), "n={n} i={i} k={k}");
                    let mad = Hypergeometric::new(n, i, k).unwrap().mean_abs_deviation();
                    let scaled = 0.75 * n as f64 / (i * (n - i)) as f64 * mad;
                    assert!((two.expected_abs() - scaled).abs() < 1e-12);
                }
            }
        }
    }
}
