//! The majorization order `x ≺ y` on real vectors and the extremal
//! populations it singles out.
//!
//! `x ≺ y` when the descending prefix sums of `x` never exceed those of
//! `y` and the totals agree. Within the zero-sum vectors of absolute sum
//! `2α`, the two-block vector `P_{i,α}` sits below every population with
//! `i` nonnegative entries, and `(α, 0, …, 0, -α)` sits above all of them.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::population::Population;
use crate::scalar::{Scalar, MAJORIZATION_TOL};
use crate::{Error, Result};

/// Partial sums of the `len` largest entries of both vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct PrefixStep<S> {
    pub len: usize,
    pub dominated: S,
    pub dominating: S,
}

/// Witness that the two-block vector `P_{i,α}` is majorized by a population.
#[derive(Debug, Clone, PartialEq)]
pub struct MajorizationCertificate<S> {
    pub index_i: usize,
    pub minimal_vector: Population<S>,
    pub prefix_trace: Vec<PrefixStep<S>>,
    scale: S,
}

impl<S: Scalar> MajorizationCertificate<S> {
    /// Re-checks every prefix inequality and the equality of totals.
    pub fn is_valid(&self) -> bool {
        let Some((last, prefixes)) = self.prefix_trace.split_last() else {
            return false;
        };
        prefixes.iter().all(|s| leq(&s.dominated, &s.dominating, &self.scale))
            && S::cmp_within(&last.dominated, &last.dominating, &self.scale, MAJORIZATION_TOL).is_eq()
    }
}

fn leq<S: Scalar>(a: &S, b: &S, scale: &S) -> bool {
    S::cmp_within(a, b, scale, MAJORIZATION_TOL) != Ordering::Greater
}

/// Stable descending sort.
fn descending<S: Scalar>(values: &[S]) -> Vec<S> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
    sorted
}

fn prefix_trace<S: Scalar>(dominated: &[S], dominating: &[S]) -> Vec<PrefixStep<S>> {
    let (mut sx, mut sy) = (S::zero(), S::zero());
    descending(dominated)
        .into_iter()
        .zip(descending(dominating))
        .enumerate()
        .map(|(idx, (x, y))| {
            sx = sx.clone() + x;
            sy = sy.clone() + y;
            PrefixStep { len: idx + 1, dominated: sx.clone(), dominating: sy.clone() }
        })
        .collect()
}

/// Tolerance scale: half the larger absolute sum, so that float slack is
/// `1e-9` after normalizing to `α = 1`.
fn comparison_scale<S: Scalar>(x: &[S], y: &[S]) -> S {
    let abs = |v: &[S]| v.iter().fold(S::zero(), |acc, e| acc + e.abs());
    let (ax, ay) = (abs(x), abs(y));
    let larger = if ax > ay { ax } else { ay };
    if larger.is_zero() {
        S::one()
    } else {
        larger / S::from_count(2)
    }
}

/// Whether `x ≺ y`.
pub fn is_majorized_by<S: Scalar>(x: &[S], y: &[S]) -> Result<bool> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch { left: x.len(), right: y.len() });
    }
    let trace = prefix_trace(x, y);
    let scale = comparison_scale(x, y);
    let Some((last, prefixes)) = trace.split_last() else {
        return Ok(true);
    };
    Ok(prefixes.iter().all(|s| leq(&s.dominated, &s.dominating, &scale))
        && S::cmp_within(&last.dominated, &last.dominating, &scale, MAJORIZATION_TOL).is_eq())
}

/// Builds `P_{i,α} = (α/i, …, α/i, -α/(n-i), …, -α/(n-i))` with `i` the number
/// of nonnegative entries of `pop` (zeros included), together with the
/// prefix sums certifying `P_{i,α} ≺ pop`.
pub fn minimal_population<S: Scalar>(pop: &Population<S>) -> Result<MajorizationCertificate<S>> {
    let alpha = pop.alpha();
    if !(alpha > S::zero()) {
        return Err(Error::DegeneratePopulation);
    }
    let n = pop.len();
    let i = pop.values().iter().filter(|v| **v >= S::zero()).count();
    if i == 0 || i == n {
        return Err(Error::DegeneratePopulation);
    }
    let high = alpha.clone() / S::from_count(i as u64);
    let low = -(alpha.clone() / S::from_count((n - i) as u64));
    let mut values = Vec::with_capacity(n);
    values.resize(i, high);
    values.resize(n, low);
    let minimal_vector = Population::new(values)?;
    let prefix_trace = prefix_trace(minimal_vector.values(), pop.values());
    let scale = comparison_scale(minimal_vector.values(), pop.values());
    Ok(MajorizationCertificate { index_i: i, minimal_vector, prefix_trace, scale })
}

/// `(α, 0, …, 0, -α)` of length `n`, the maximal element of its class.
pub fn extreme_population<S: Scalar>(n: usize, alpha: S) -> Result<Population<S>> {
    if n < 2 {
        return Err(Error::TooShort { len: n });
    }
    if !(alpha > S::zero()) {
        return Err(Error::DegeneratePopulation);
    }
    let mut values = Vec::with_capacity(n);
    values.push(alpha.clone());
    values.resize(n - 1, S::zero());
    values.push(-alpha);
    Population::new(values)
}

/// Moves `eps` from `values[donor]` to `values[receiver]` (0-based
/// indices). Requires `values[donor] > values[receiver]` and
/// `0 < eps ≤ (values[donor] - values[receiver]) / 2`; the result is
/// majorized by the input.
pub fn robin_hood_transfer<S: Scalar>(pop: &Population<S>, donor: usize, receiver: usize, eps: S) -> Result<Population<S>> {
    let values = pop.values();
    if donor >= values.len() || receiver >= values.len() || donor == receiver {
        return Err(Error::InvalidTransfer(format!(
            "indices {donor} -> {receiver} invalid for length {}",
            values.len()
        )));
    }
    let gap = values[donor].clone() - values[receiver].clone();
    if !(gap > S::zero()) {
        return Err(Error::InvalidTransfer(format!("donor {donor} is not larger than receiver {receiver}")));
    }
    if !(eps > S::zero()) || eps.clone() * S::from_count(2) > gap {
        return Err(Error::InvalidTransfer(format!("amount {eps:?} outside (0, {gap:?}/2]")));
    }
    let mut out = values.to_vec();
    out[donor] = out[donor].clone() - eps.clone();
    out[receiver] = out[receiver].clone() + eps;
    Population::new(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;
    use alloc::vec;
    use proptest::prelude::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn order_examples() {
        assert!(is_majorized_by(&[0.0, 0.0], &[1.0, -1.0]).unwrap());
        assert!(!is_majorized_by(&[1.0, -1.0], &[0.0, 0.0]).unwrap());
        assert!(is_majorized_by(&[0.5, 0.5, -0.5, -0.5], &[0.5, 0.5, -0.3, -0.7]).unwrap());
        assert!(!is_majorized_by(&[0.5, 0.5, -0.3, -0.7], &[0.5, 0.5, -0.5, -0.5]).unwrap());
        assert!(!is_majorized_by(&[1.0, 0.0], &[1.0, 1.0]).unwrap());
        assert_eq!(is_majorized_by(&[1.0], &[1.0, 0.0]), Err(Error::LengthMismatch { left: 1, right: 2 }));
    }

    #[test]
    fn minimal_population_examples() {
        let p = Population::new(vec![q(1, 2), q(1, 2), q(-3, 10), q(-7, 10)]).unwrap();
        let cert = minimal_population(&p).unwrap();
        assert_eq!(cert.index_i, 2);
        assert_eq!(cert.minimal_vector.values(), &[q(1, 2), q(1, 2), q(-1, 2), q(-1, 2)]);
        assert!(cert.is_valid());

        let p = Population::new(vec![q(1, 1), q(-1, 3), q(-1, 3), q(-1, 3)]).unwrap();
        let cert = minimal_population(&p).unwrap();
        assert_eq!(cert.index_i, 1);
        assert_eq!(cert.minimal_vector, p);

        let p = Population::new(vec![0.5, 0.0, -0.5]).unwrap();
        let cert = minimal_population(&p).unwrap();
        assert_eq!(cert.index_i, 2);
        assert_eq!(cert.minimal_vector.values(), &[0.25, 0.25, -0.5]);
        assert!(cert.is_valid());
        assert!(is_majorized_by(cert.minimal_vector.values(), p.values()).unwrap());
        assert_eq!(cert.prefix_trace.len(), 3);

        let zeros = Population::new(vec![0.0, 0.0]).unwrap();
        assert_eq!(minimal_population(&zeros).unwrap_err(), Error::DegeneratePopulation);
    }

    #[test]
    fn extreme_population_examples() {
        assert_eq!(extreme_population(2, 1.0).unwrap().values(), &[1.0, -1.0]);
        assert_eq!(extreme_population(4, 1.0).unwrap().values(), &[1.0, 0.0, 0.0, -1.0]);
        let top = extreme_population(4, 1.0).unwrap();
        assert!(is_majorized_by(&[0.5, 0.5, -0.3, -0.7], top.values()).unwrap());
        assert!(extreme_population(1, 1.0).is_err());
        assert!(extreme_population(3, 0.0).is_err());
    }

    #[test]
    fn transfer_examples() {
        let p = Population::new(vec![1.0, -1.0]).unwrap();
        let t = robin_hood_transfer(&p, 0, 1, 0.5).unwrap();
        assert_eq!(t.values(), &[0.5, -0.5]);
        assert!(is_majorized_by(t.values(), p.values()).unwrap());

        let p = Population::new(vec![1.0, 0.0, 0.0, -1.0]).unwrap();
        assert_eq!(robin_hood_transfer(&p, 0, 3, 1.0).unwrap().values(), &[0.0, 0.0, 0.0, 0.0]);
        assert!(matches!(robin_hood_transfer(&p, 0, 3, 1.5), Err(Error::InvalidTransfer(_))));
        assert!(matches!(robin_hood_transfer(&p, 3, 0, 0.5), Err(Error::InvalidTransfer(_))));
        assert!(matches!(robin_hood_transfer(&p, 0, 0, 0.5), Err(Error::InvalidTransfer(_))));
        assert!(matches!(robin_hood_transfer(&p, 0, 9, 0.5), Err(Error::InvalidTransfer(_))));
    }

    fn population() -> impl Strategy<Value = Population<f64>> {
        prop::collection::vec(prop_oneof![Just(0.0), -5.0..5.0f64], 2..20)
            .prop_filter_map("degenerate", |raw| {
                Population::centered(raw).ok().filter(|p| p.alpha() > 1e-6)
            })
    }

    proptest! {
        #[test]
        fn reflexive(p in population()) {
            prop_assert!(is_majorized_by(p.values(), p.values()).unwrap());
        }

        #[test]
        fn permutation_invariant(p in population(), seed in any::<u64>()) {
            let mut shuffled = p.values().to_vec();
            let len = shuffled.len();
            shuffled.rotate_left((seed as usize) % len);
            shuffled.reverse();
            let top = extreme_population(len, p.alpha()).unwrap();
            prop_assert!(is_majorized_by(&shuffled, top.values()).unwrap());
            let cert = minimal_population(&p).unwrap();
            prop_assert!(is_majorized_by(cert.minimal_vector.values(), &shuffled).unwrap());
        }

        #[test]
        fn bracketed_by_minimal_and_extreme(p in population()) {
            let cert = minimal_population(&p).unwrap();
            prop_assert!(cert.is_valid());
            let top = extreme_population(p.len(), p.alpha()).unwrap();
            prop_assert!(is_majorized_by(p.values(), top.values()).unwrap());
        }

        #[test]
        fn transfers_move_down(p in population(), a in any::<prop::sample::Index>(), b in any::<prop::sample::Index>(), frac in 0.01..1.0f64) {
            let (x, y) = (a.index(p.len()), b.index(p.len()));
            let (donor, receiver) = if p.values()[x] >= p.values()[y] { (x, y) } else { (y, x) };
            let gap = p.values()[donor] - p.values()[receiver];
            prop_assume!(gap > 1e-9);
            let out = robin_hood_transfer(&p, donor, receiver, frac * gap / 2.0).unwrap();
            prop_assert!(is_majorized_by(out.values(), p.values()).unwrap());
        }
    }
}
