//! Numeric modes.
//!
//! Populations, majorization checks and exact distributions run either in
//! binary floating point or in exact big rationals. [`Scalar`] is the seam
//! between the two: float comparisons go through relative tolerances scaled
//! by the population's half absolute deviation, rational comparisons are
//! exact.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use crate::exactdist::RevolvingDoor;

pub type Rational = num_rational::BigRational;

/// Relative tolerance for the zero-sum check in float mode.
pub const ZERO_SUM_TOL: f64 = 1e-12;
/// Two subset sums closer than `ATOM_TOL · α` are the same atom.
pub const ATOM_TOL: f64 = 1e-9;
/// Prefix-sum slack for majorization after normalizing to `α = 1`.
pub const MAJORIZATION_TOL: f64 = 1e-9;

/// Float subset sums are recomputed from scratch this often to stop drift.
const REFRESH_EVERY: u32 = 256;

pub trait Scalar: Clone + fmt::Debug + PartialOrd + Signed + FromPrimitive + ToPrimitive {
    /// True for exact arithmetic.
    const EXACT: bool;

    fn from_ratio(num: BigInt, den: BigInt) -> Self;

    fn from_counts(num: &BigUint, den: &BigUint) -> Self {
        Self::from_ratio(BigInt::from(num.clone()), BigInt::from(den.clone()))
    }

    fn from_count(v: u64) -> Self {
        <Self as FromPrimitive>::from_u64(v).expect("u64 converts to every scalar")
    }

    fn as_f64(&self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool;

    /// `|value| ≤ rel_tol · scale` in float mode, `value == 0` in exact mode.
    fn is_negligible(value: &Self, scale: &Self, rel_tol: f64) -> bool;

    /// Every `k`-subset sum of `values`, grouped into atoms sorted ascending
    /// with multiplicities. Float sums within `ATOM_TOL · scale` of each
    /// other are merged.
    fn subset_sum_atoms(values: &[Self], k: usize, scale: &Self) -> Vec<(Self, u64)>;

    /// Ordering with the float tolerance applied; ties resolve to `Equal`.
    fn cmp_within(a: &Self, b: &Self, scale: &Self, rel_tol: f64) -> Ordering {
        if Self::is_negligible(&(a.clone() - b.clone()), scale, rel_tol) {
            Ordering::Equal
        } else {
            a.partial_cmp(b).unwrap_or(Ordering::Equal)
        }
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn from_ratio(num: BigInt, den: BigInt) -> Self {
        Rational::new(num, den).to_f64().unwrap_or(f64::NAN)
    }

    fn is_finite_value(&self) -> bool {
        self.is_finite()
    }

    fn is_negligible(value: &Self, scale: &Self, rel_tol: f64) -> bool {
        value.abs() <= rel_tol * scale.abs()
    }

    fn subset_sum_atoms(values: &[Self], k: usize, scale: &Self) -> Vec<(Self, u64)> {
        let mut sums = Vec::new();
        let mut door = RevolvingDoor::new(values.len(), k);
        let mut sum: f64 = door.current().iter().map(|&j| values[j]).sum();
        sums.push(sum);
        let mut since_refresh = 0;
        while let Some((out, into)) = door.next() {
            since_refresh += 1;
            if since_refresh == REFRESH_EVERY {
                since_refresh = 0;
                sum = door.current().iter().map(|&j| values[j]).sum();
            } else {
                sum += values[into] - values[out];
            }
            sums.push(sum);
        }
        sums.sort_unstable_by(f64::total_cmp);

        let tol = ATOM_TOL * scale.abs();
        let mut atoms = Vec::new();
        let mut start = 0;
        while start < sums.len() {
            let mut end = start + 1;
            while end < sums.len() && sums[end] - sums[start] <= tol {
                end += 1;
            }
            // median of the group, so an atom at zero prints as zero
            atoms.push((sums[(start + end - 1) / 2], (end - start) as u64));
            start = end;
        }
        atoms
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn from_ratio(num: BigInt, den: BigInt) -> Self {
        Rational::new(num, den)
    }

    fn is_finite_value(&self) -> bool {
        true
    }

    fn is_negligible(value: &Self, _scale: &Self, _rel_tol: f64) -> bool {
        value.is_zero()
    }

    fn subset_sum_atoms(values: &[Self], k: usize, _scale: &Self) -> Vec<(Self, u64)> {
        let denom = values.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let ints: Vec<BigInt> = values.iter().map(|v| v.numer() * (&denom / v.denom())).collect();

        let max_abs = ints.iter().map(|v| v.abs()).max().unwrap_or_default();
        let fits_i128 = (max_abs * BigInt::from(k.max(1))) < BigInt::from(i128::MAX);
        let sums: Vec<(BigInt, u64)> = if fits_i128 {
            let small: Vec<i128> = ints.iter().map(|v| v.to_i128().expect("checked bound")).collect();
            integer_subset_sums(&small, k).into_iter().map(|(s, c)| (BigInt::from(s), c)).collect()
        } else {
            integer_subset_sums(&ints, k)
        };
        sums.into_iter().map(|(s, c)| (Rational::new(s, denom.clone()), c)).collect()
    }
}

fn integer_subset_sums<T>(values: &[T], k: usize) -> Vec<(T, u64)>
where
    T: Clone + Ord + Zero + for<'a> core::ops::AddAssign<&'a T> + for<'a> core::ops::SubAssign<&'a T>,
{
    let door = RevolvingDoor::new(values.len(), k);
    let mut sum = T::zero();
    for &j in door.current() {
        sum += &values[j];
    }
    let mut counts: BTreeMap<T, u64> = BTreeMap::new();
    *counts.entry(sum.clone()).or_insert(0) += 1;
    for (out, into) in door {
        sum += &values[into];
        sum -= &values[out];
        *counts.entry(sum.clone()).or_insert(0) += 1;
    }
    counts.into_iter().collect()
}
