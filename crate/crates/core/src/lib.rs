//! Non-asymptotic tail bounds for the sum of `k` elements drawn without
//! replacement from a zero-sum population, together with the exact
//! machinery used to check them: hypergeometric laws, the majorization
//! order, and exact subset-sum distributions.
//!
//! The crate is `no_std` (it needs `alloc`). Every numeric routine that
//! touches population values is generic over [`Scalar`], implemented for
//! `f64` and for exact big rationals ([`Rational`]).

#![cfg_attr(not(feature = "std"), no_std)]
#![deny(unsafe_code)]
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod bounds;
pub mod error;
pub mod exactdist;
pub mod hypergeom;
pub mod majorization;
mod math;
pub mod population;
pub mod scalar;

pub use bounds::{BoundId, BoundInputs, BoundKind, BoundResult, Inapplicable};
pub use error::Error;
pub use exactdist::{
    exact_distribution, extreme_distribution, mc_tail, two_block_distribution, DiscreteDistribution,
    EnumerationBudget, MCEstimate, PositivePartIdentities, TailSampler,
};
pub use hypergeom::{Hypergeometric, StirlingBracket};
pub use majorization::{
    extreme_population, is_majorized_by, minimal_population, robin_hood_transfer, MajorizationCertificate,
};
pub use population::{Population, PopulationStats};
pub use scalar::{Rational, Scalar};

pub type Result<T, E = Error> = core::result::Result<T, E>;
