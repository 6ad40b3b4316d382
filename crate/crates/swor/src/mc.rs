//! Monte Carlo tail estimates with shards spread over threads.

use rayon::prelude::*;
use swor_core::exactdist::DEFAULT_SHARDS;
use swor_core::{MCEstimate, Population, Result, Scalar, TailSampler};

/// Same estimate as [`swor_core::mc_tail`] for equal `(seed, reps, shards)`,
/// with each shard on its own thread.
pub fn par_mc_tail_with_shards<S: Scalar>(
    pop: &Population<S>,
    k: usize,
    t: &S,
    strict: bool,
    reps: u64,
    seed: u64,
    shards: u32,
) -> Result<MCEstimate> {
    let sampler = TailSampler::new(pop, k, t, strict)?;
    if reps == 0 {
        return sampler.run(reps, seed, shards);
    }
    let shards = shards.max(1);
    let hits = (0..shards)
        .into_par_iter()
        .map(|s| sampler.count_hits(TailSampler::shard_reps(reps, shards, s), seed, s))
        .sum();
    Ok(MCEstimate::from_hits(hits, reps, seed, shards))
}

pub fn par_mc_tail<S: Scalar>(
    pop: &Population<S>,
    k: usize,
    t: &S,
    strict: bool,
    reps: u64,
    seed: u64,
) -> Result<MCEstimate> {
    par_mc_tail_with_shards(pop, k, t, strict, reps, seed, DEFAULT_SHARDS)
}
