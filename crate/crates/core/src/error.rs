use alloc::string::String;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("population needs at least 2 values, got {len}")]
    TooShort { len: usize },
    #[error("population does not sum to zero (sum = {sum:e}, tolerance scale = {scale:e})")]
    ZeroSumViolation { sum: f64, scale: f64 },
    #[error("population contains a non-finite value at index {index}")]
    NonFinite { index: usize },
    #[error("population has zero absolute deviation")]
    DegeneratePopulation,
    #[error("invalid hypergeometric parameters n={n}, i={i}, k={k}")]
    InvalidHypergeometric { n: u64, i: u64, k: u64 },
    #[error("sample size k={k} must lie in [1, n-1] for n={n}")]
    InvalidSampleSize { n: usize, k: usize },
    #[error("vectors have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },
    #[error("invalid transfer: {0}")]
    InvalidTransfer(String),
    #[error("enumerating C({n},{k}) subsets exceeds the budget")]
    TooLarge { n: usize, k: usize },
    #[error("distribution has no mass above zero")]
    NoPositiveMass,
    #[error("argument outside the domain: {0}")]
    Domain(String),
}
