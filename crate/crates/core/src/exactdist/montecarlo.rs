//! Monte Carlo tail estimates for populations too large to enumerate.
//!
//! Repetitions are split across `shards`; shard `s` draws from ChaCha8
//! seeded with `seed` on stream `s`. The estimate depends only on
//! `(seed, reps, shards)`, whatever order or thread the shards run on.

use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::population::Population;
use crate::scalar::{Scalar, ATOM_TOL};
use crate::{Error, Result};

pub const DEFAULT_SHARDS: u32 = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MCEstimate {
    pub estimate: f64,
    /// `√(p̂(1-p̂)/reps)`.
    pub std_error: f64,
    pub reps: u64,
    pub seed: u64,
    pub shards: u32,
}

impl MCEstimate {
    pub fn from_hits(hits: u64, reps: u64, seed: u64, shards: u32) -> Self {
        let estimate = hits as f64 / reps as f64;
        let std_error = crate::math::sqrt(estimate * (1.0 - estimate) / reps as f64);
        Self { estimate, std_error, reps, seed, shards }
    }
}

/// Draws uniform `k`-subsets and counts sums beyond a threshold. Sums are
/// accumulated in `f64` whatever the population's numeric mode.
#[derive(Debug, Clone)]
pub struct TailSampler {
    values: Vec<f64>,
    k: usize,
    threshold: f64,
    strict: bool,
    tol: f64,
}

impl TailSampler {
    pub fn new<S: Scalar>(pop: &Population<S>, k: usize, t: &S, strict: bool) -> Result<Self> {
        if k == 0 || k >= pop.len() {
            return Err(Error::InvalidSampleSize { n: pop.len(), k });
        }
        Ok(Self {
            values: pop.to_f64_values(),
            k,
            threshold: t.as_f64(),
            strict,
            tol: ATOM_TOL * pop.alpha().as_f64(),
        })
    }

    /// Repetitions assigned to `shard`; the first `reps % shards` shards take one extra.
    pub fn shard_reps(reps: u64, shards: u32, shard: u32) -> u64 {
        let shards = u64::from(shards.max(1));
        reps / shards + u64::from(u64::from(shard) < reps % shards)
    }

    fn hit(&self, sum: f64) -> bool {
        if self.strict {
            sum > self.threshold + self.tol
        } else {
            sum >= self.threshold - self.tol
        }
    }

    /// Runs one shard and returns the number of hits.
    pub fn count_hits(&self, reps: u64, seed: u64, shard: u32) -> u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(u64::from(shard));
        let n = self.values.len();
        let mut order: Vec<usize> = (0..n).collect();
        let mut hits = 0;
        for _ in 0..reps {
            // partial Fisher–Yates: the first k slots become a uniform k-subset
            let mut sum = 0.0;
            for j in 0..self.k {
                let pick = rng.gen_range(j..n);
                order.swap(j, pick);
                sum += self.values[order[j]];
            }
            if self.hit(sum) {
                hits += 1;
            }
        }
        hits
    }

    pub fn run(&self, reps: u64, seed: u64, shards: u32) -> Result<MCEstimate> {
        if reps == 0 {
            return Err(Error::Domain("Monte Carlo needs at least one repetition".into()));
        }
        let shards = shards.max(1);
        let hits = (0..shards).map(|s| self.count_hits(Self::shard_reps(reps, shards, s), seed, s)).sum();
        Ok(MCEstimate::from_hits(hits, reps, seed, shards))
    }
}

/// Estimates `P(X > t)` (`strict`) or `P(X ≥ t)` from `reps` uniform draws.
pub fn mc_tail<S: Scalar>(
    pop: &Population<S>,
    k: usize,
    t: &S,
    strict: bool,
    reps: u64,
    seed: u64,
) -> Result<MCEstimate> {
    TailSampler::new(pop, k, t, strict)?.run(reps, seed, DEFAULT_SHARDS)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn mms() -> Population<f64> {
        Population::new(vec![1.0, -1.0 / 3.0, -1.0 / 3.0, -1.0 / 3.0]).unwrap()
    }

    #[test]
    fn converges_to_exact_tail() {
        let est = mc_tail(&mms(), 2, &0.0, true, 100_000, 11).unwrap();
        assert!((est.estimate - 0.5).abs() <= 4.0 * est.std_error, "{est:?}");
        assert_eq!(est.reps, 100_000);
    }

    #[test]
    fn single_repetition() {
        let est = mc_tail(&mms(), 2, &0.0, true, 1, 3).unwrap();
        assert!(est.estimate == 0.0 || est.estimate == 1.0);
        assert_eq!(est.std_error, 0.0);
    }

    #[test]
    fn deterministic_per_seed() {
        let a = mc_tail(&mms(), 2, &0.0, false, 5_000, 7).unwrap();
        let b = mc_tail(&mms(), 2, &0.0, false, 5_000, 7).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn shards_partition_repetitions() {
        for reps in [1, 7, 8, 9, 1000, 1001] {
            let total: u64 = (0..8).map(|s| TailSampler::shard_reps(reps, 8, s)).sum();
            assert_eq!(total, reps);
        }
    }

    #[test]
    fn rejects_zero_reps_and_bad_k() {
        assert!(mc_tail(&mms(), 2, &0.0, true, 0, 1).is_err());
        assert!(mc_tail(&mms(), 4, &0.0, true, 10, 1).is_err());
    }
}
