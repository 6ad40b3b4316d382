//! Tail bounds for `X_P`, the sum of a uniform `k`-subset of a zero-sum
//! population, each gated by its hypotheses.
//!
//! Every bound returns a [`BoundResult`] even when its hypotheses fail, so
//! sweeps can skip inapplicable entries instead of aborting. Thresholds are
//! on the sum `X_P` except for the two sample-average bounds
//! ([`bm_serfling_upper`], [`bm_bernstein_upper`]), which take `ε` on
//! `A_P = X_P / k`; [`evaluate_all`] bridges the two with `ε = t / k`.
//!
//! Strictness: [`lower_at_zero`] bounds `P(X_P > 0)`; every other bound
//! refers to `P(X_P ≥ threshold)`.

use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use num_bigint::BigUint;
use num_traits::{Pow, ToPrimitive};

use crate::math::{exp, ln, sqrt, PI};
use crate::population::PopulationStats;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    Upper,
    Lower,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundId {
    Hoeffding,
    Pokrovskiy,
    LowerAtZero,
    UpperAtZero,
    AbsDevUpper,
    AbsDevLower,
    BmSerfling,
    BmBernstein,
}

impl BoundId {
    pub const ALL: [BoundId; 8] = [
        BoundId::Hoeffding,
        BoundId::Pokrovskiy,
        BoundId::LowerAtZero,
        BoundId::UpperAtZero,
        BoundId::AbsDevUpper,
        BoundId::AbsDevLower,
        BoundId::BmSerfling,
        BoundId::BmBernstein,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundId::Hoeffding => "hoeffding",
            BoundId::Pokrovskiy => "pokrovskiy",
            BoundId::LowerAtZero => "lower_at_zero",
            BoundId::UpperAtZero => "upper_at_zero",
            BoundId::AbsDevUpper => "abs_dev_upper",
            BoundId::AbsDevLower => "abs_dev_lower",
            BoundId::BmSerfling => "bm_serfling",
            BoundId::BmBernstein => "bm_bernstein",
        }
    }

    pub fn kind(self) -> BoundKind {
        match self {
            BoundId::Pokrovskiy | BoundId::LowerAtZero | BoundId::AbsDevLower => BoundKind::Lower,
            _ => BoundKind::Upper,
        }
    }

    /// True when the bound refers to `P(X_P > threshold)` rather than `≥`.
    pub fn is_strict(self) -> bool {
        self == BoundId::LowerAtZero
    }
}

impl fmt::Display for BoundId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Why a bound's hypotheses fail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inapplicable {
    ThresholdNotPositive,
    ThresholdNotZero,
    ThresholdAtLeastAlpha,
    ThresholdOutsideWindow { window_end: f64 },
    DegenerateRange,
    DegeneratePopulation,
    InvalidSampleSize,
    SampleTooLarge,
    DeltaOutOfRange,
    NegativeVariance,
    GateNotMet,
    ModeOutOfRange { m: u64 },
}

impl Inapplicable {
    /// Stable machine-readable code.
    pub fn code(&self) -> &'static str {
        match self {
            Inapplicable::ThresholdNotPositive => "threshold_not_positive",
            Inapplicable::ThresholdNotZero => "threshold_not_zero",
            Inapplicable::ThresholdAtLeastAlpha => "threshold_at_least_alpha",
            Inapplicable::ThresholdOutsideWindow { .. } => "threshold_outside_window",
            Inapplicable::DegenerateRange => "degenerate_range",
            Inapplicable::DegeneratePopulation => "degenerate_population",
            Inapplicable::InvalidSampleSize => "invalid_sample_size",
            Inapplicable::SampleTooLarge => "sample_too_large",
            Inapplicable::DeltaOutOfRange => "delta_out_of_range",
            Inapplicable::NegativeVariance => "negative_variance",
            Inapplicable::GateNotMet => "gate_not_met",
            Inapplicable::ModeOutOfRange { .. } => "mode_out_of_range",
        }
    }
}

impl fmt::Display for Inapplicable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Inapplicable::ThresholdOutsideWindow { window_end } => {
                write!(f, "{} (window ends at {window_end})", self.code())
            }
            Inapplicable::ModeOutOfRange { m } => write!(f, "{} (m = {m})", self.code()),
            _ => f.write_str(self.code()),
        }
    }
}

/// Statistics a bound consumed.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BoundInputs {
    pub n: Option<u64>,
    pub k: Option<u64>,
    pub a: Option<f64>,
    pub b: Option<f64>,
    pub sigma2: Option<f64>,
    pub alpha: Option<f64>,
    pub t: Option<f64>,
    pub eps: Option<f64>,
    pub delta: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub kind: BoundKind,
    /// Formula value before clamping; NaN when inapplicable.
    pub raw: f64,
    /// `raw` clamped to `[0, 1]`; NaN when inapplicable.
    pub value: f64,
    pub applicable: bool,
    pub reason: Option<Inapplicable>,
    pub inputs: BoundInputs,
}

impl BoundResult {
    pub fn new(kind: BoundKind, raw: f64, inputs: BoundInputs) -> Self {
        Self { kind, raw, value: raw.clamp(0.0, 1.0), applicable: true, reason: None, inputs }
    }

    pub fn inapplicable(kind: BoundKind, reason: Inapplicable, inputs: BoundInputs) -> Self {
        Self { kind, raw: f64::NAN, value: f64::NAN, applicable: false, reason: Some(reason), inputs }
    }

    /// The clamped value, if the hypotheses hold.
    pub fn applicable_value(&self) -> Option<f64> {
        self.applicable.then_some(self.value)
    }

    /// Whether `probability` respects the bound (vacuously true when
    /// inapplicable).
    pub fn admits(&self, probability: f64) -> bool {
        match (self.applicable, self.kind) {
            (false, _) => true,
            (true, BoundKind::Upper) => probability <= self.value,
            (true, BoundKind::Lower) => probability >= self.value,
        }
    }
}

fn valid_sample(n: u64, k: u64) -> bool {
    n >= 2 && k >= 1 && k < n
}

/// `e^{-1/3} / (8 √(2π))`, the constant of the lower bound at zero.
pub fn zero_threshold_constant() -> f64 {
    exp(-1.0 / 3.0) / (8.0 * sqrt(2.0 * PI))
}

/// Hoeffding: `P(X_P ≥ t) ≤ exp(-2t² / (k (b-a)²))` for `t > 0`.
pub fn hoeffding_upper(k: u64, a: f64, b: f64, t: f64) -> BoundResult {
    let inputs = BoundInputs { k: Some(k), a: Some(a), b: Some(b), t: Some(t), ..Default::default() };
    if k == 0 {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::InvalidSampleSize, inputs);
    }
    if !(t > 0.0) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::ThresholdNotPositive, inputs);
    }
    if !(b > a) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::DegenerateRange, inputs);
    }
    let range = b - a;
    BoundResult::new(BoundKind::Upper, exp(-2.0 * t * t / (k as f64 * range * range)), inputs)
}

/// `P(X_P ≥ 0) ≥ k/n`, valid only when `n ≥ 10^46 · k`. The gate is
/// checked in exact integer arithmetic.
pub fn pokrovskiy_lower(n: &BigUint, k: &BigUint) -> BoundResult {
    let inputs = BoundInputs { n: n.to_u64(), k: k.to_u64(), t: Some(0.0), ..Default::default() };
    let zero = BigUint::default();
    if *k == zero || k >= n {
        return BoundResult::inapplicable(BoundKind::Lower, Inapplicable::InvalidSampleSize, inputs);
    }
    let gate = BigUint::from(10u32).pow(46u32) * k;
    if *n < gate {
        return BoundResult::inapplicable(BoundKind::Lower, Inapplicable::GateNotMet, inputs);
    }
    let raw = num_rational::Ratio::new(k.clone(), n.clone()).to_f64().unwrap_or(0.0);
    BoundResult::new(BoundKind::Lower, raw, inputs)
}

/// `P(X_P > 0) ≥ c · (k/n) · √((n-k)/(n k))` with
/// `c = e^{-1/3} / (8√(2π))`, for any population with `Σ|x_i| > 0`.
pub fn lower_at_zero(n: u64, k: u64) -> BoundResult {
    let inputs = BoundInputs { n: Some(n), k: Some(k), t: Some(0.0), ..Default::default() };
    if !valid_sample(n, k) {
        return BoundResult::inapplicable(BoundKind::Lower, Inapplicable::InvalidSampleSize, inputs);
    }
    let (nf, kf) = (n as f64, k as f64);
    let raw = zero_threshold_constant() * (kf / nf) * sqrt((nf - kf) / (nf * kf));
    BoundResult::new(BoundKind::Lower, raw, inputs)
}

/// `P(X_P ≥ 0) ≤ 1 - lower_at_zero(n, k)`, by applying the lower bound to `-P`.
pub fn upper_at_zero(n: u64, k: u64) -> BoundResult {
    let lower = lower_at_zero(n, k);
    if !lower.applicable {
        return BoundResult { kind: BoundKind::Upper, ..lower };
    }
    BoundResult::new(BoundKind::Upper, 1.0 - lower.raw, lower.inputs)
}

fn extreme_spread(n: u64, k: u64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    2.0 * kf * (nf - kf) / (nf * (nf - 1.0))
}

/// Upper bound from the absolute deviation `2α`:
/// `P(X_P ≥ t) ≤ 1 - min{1, t/(α-t)} · (1 - 2k(n-k)/(n(n-1)))` for `t ∈ (0, α)`.
pub fn abs_dev_upper(n: u64, k: u64, alpha: f64, t: f64) -> BoundResult {
    let inputs = BoundInputs { n: Some(n), k: Some(k), alpha: Some(alpha), t: Some(t), ..Default::default() };
    if !valid_sample(n, k) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::InvalidSampleSize, inputs);
    }
    if !(alpha > 0.0) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::DegeneratePopulation, inputs);
    }
    if !(t > 0.0) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::ThresholdNotPositive, inputs);
    }
    if t >= alpha {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::ThresholdAtLeastAlpha, inputs);
    }
    let weight = (t / (alpha - t)).min(1.0);
    BoundResult::new(BoundKind::Upper, 1.0 - weight * (1.0 - extreme_spread(n, k)), inputs)
}

/// [`abs_dev_upper`] on the sample average: threshold `ε` on `X_P / k`,
/// applicable for `ε ∈ (0, α/k)`.
pub fn abs_dev_upper_average(n: u64, k: u64, alpha: f64, eps: f64) -> BoundResult {
    let mut result = abs_dev_upper(n, k, alpha, eps * k as f64);
    result.inputs.eps = Some(eps);
    result
}

/// End of the window `(0, 4k(n-k)α / (n²(n-1)))` on which [`abs_dev_lower`] applies.
pub fn abs_dev_lower_window(n: u64, k: u64, alpha: f64) -> f64 {
    let (nf, kf) = (n as f64, k as f64);
    4.0 * kf * (nf - kf) / (nf * nf * (nf - 1.0)) * alpha
}

/// Lower bound for moderate thresholds:
/// `P(X_P ≥ t) ≥ 2α/(α-t) · k(n-k)/(n²(n-1)) - t/(2(α-t))`.
pub fn abs_dev_lower(n: u64, k: u64, alpha: f64, t: f64) -> BoundResult {
    let inputs = BoundInputs { n: Some(n), k: Some(k), alpha: Some(alpha), t: Some(t), ..Default::default() };
    if !valid_sample(n, k) {
        return BoundResult::inapplicable(BoundKind::Lower, Inapplicable::InvalidSampleSize, inputs);
    }
    if !(alpha > 0.0) {
        return BoundResult::inapplicable(BoundKind::Lower, Inapplicable::DegeneratePopulation, inputs);
    }
    let window_end = abs_dev_lower_window(n, k, alpha);
    if !(t > 0.0 && t < window_end) {
        return BoundResult::inapplicable(
            BoundKind::Lower,
            Inapplicable::ThresholdOutsideWindow { window_end },
            inputs,
        );
    }
    let (nf, kf) = (n as f64, k as f64);
    let raw = 2.0 * alpha / (alpha - t) * kf * (nf - kf) / (nf * nf * (nf - 1.0)) - t / (2.0 * (alpha - t));
    BoundResult::new(BoundKind::Lower, raw, inputs)
}

/// Serfling-type bound on the sample average (Bardenet–Maillard):
/// `P(A_P ≥ ε) ≤ exp(-2kε² / ((1 - k/n)(1 + 1/k)(b-a)²))`.
pub fn bm_serfling_upper(n: u64, k: u64, a: f64, b: f64, eps: f64) -> BoundResult {
    let inputs =
        BoundInputs { n: Some(n), k: Some(k), a: Some(a), b: Some(b), eps: Some(eps), ..Default::default() };
    if !valid_sample(n, k) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::InvalidSampleSize, inputs);
    }
    if !(eps > 0.0) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::ThresholdNotPositive, inputs);
    }
    if !(b > a) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::DegenerateRange, inputs);
    }
    let (nf, kf, range) = (n as f64, k as f64, b - a);
    let denom = (1.0 - kf / nf) * (1.0 + 1.0 / kf) * range * range;
    BoundResult::new(BoundKind::Upper, exp(-2.0 * kf * eps * eps / denom), inputs)
}

/// Bernstein–Serfling bound on the sample average (Bardenet–Maillard):
/// `P(A_P ≥ ε) ≤ exp(-(kε²/2) / (γ² + (2/3)(b-a)ε)) + δ`, where
/// `γ² = (1 - k/n)((k+1)/k · σ² + (n-k-1)/k · c)` and
/// `c = σ(b-a)√(2 ln(1/δ) / (n-k-1))`. Needs `k ≤ n - 2`.
pub fn bm_bernstein_upper(n: u64, k: u64, a: f64, b: f64, sigma2: f64, eps: f64, delta: f64) -> BoundResult {
    let inputs = BoundInputs {
        n: Some(n),
        k: Some(k),
        a: Some(a),
        b: Some(b),
        sigma2: Some(sigma2),
        eps: Some(eps),
        delta: Some(delta),
        ..Default::default()
    };
    if !valid_sample(n, k) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::InvalidSampleSize, inputs);
    }
    if k + 1 >= n {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::SampleTooLarge, inputs);
    }
    if !(eps > 0.0) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::ThresholdNotPositive, inputs);
    }
    if !(delta > 0.0 && delta <= 1.0) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::DeltaOutOfRange, inputs);
    }
    if !(b > a) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::DegenerateRange, inputs);
    }
    if !(sigma2 >= 0.0) {
        return BoundResult::inapplicable(BoundKind::Upper, Inapplicable::NegativeVariance, inputs);
    }
    let (nf, kf, range) = (n as f64, k as f64, b - a);
    let rest = nf - kf - 1.0;
    let c = sqrt(sigma2) * range * sqrt(2.0 * ln(1.0 / delta) / rest);
    let gamma2 = (1.0 - kf / nf) * ((kf + 1.0) / kf * sigma2 + rest / kf * c);
    let exponent = -(kf * eps * eps / 2.0) / (gamma2 + (2.0 / 3.0) * range * eps);
    BoundResult::new(BoundKind::Upper, exp(exponent) + delta, inputs)
}

/// Piecewise-linear minorant of `1{x > -y}` on `[-1, 1]`:
/// `x/(1-y) + y/(1-y)` up to `x = 1 - 2y`, then `1`.
pub fn linear_minorant(y: f64, x: f64) -> Result<f64> {
    if !(y > 0.0 && y < 1.0) || !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("linear minorant needs y in (0,1), x in [-1,1]; got y={y}, x={x}")));
    }
    if x <= 1.0 - 2.0 * y {
        Ok((x + y) / (1.0 - y))
    } else {
        Ok(1.0)
    }
}

/// Convex quadratic minorant of `1{x ≥ y}` on `[-1, 1]`:
/// `x²/(2(1-y)) + x/2 - y/(2(1-y))`, vanishing at `-1` and `y`, equal to 1 at 1.
pub fn quadratic_minorant(y: f64, x: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&y) || !(-1.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!("quadratic minorant needs y in [0,1), x in [-1,1]; got y={y}, x={x}")));
    }
    let scale = 2.0 * (1.0 - y);
    Ok(x * x / scale + x / 2.0 - y / scale)
}

/// Every bound at sum-threshold `t`; the sample-average bounds receive
/// `ε = t / k`. At `t = 0` only the zero-threshold bounds apply.
pub fn evaluate_all(n: u64, k: u64, stats: &PopulationStats<f64>, t: f64, delta: f64) -> Vec<(BoundId, BoundResult)> {
    let eps = if k > 0 { t / k as f64 } else { f64::NAN };
    BoundId::ALL
        .iter()
        .map(|&id| {
            let result = match id {
                BoundId::Hoeffding => hoeffding_upper(k, stats.a, stats.b, t),
                BoundId::Pokrovskiy => {
                    let result = pokrovskiy_lower(&BigUint::from(n), &BigUint::from(k));
                    at_zero_only(result, t)
                }
                BoundId::LowerAtZero => {
                    let result = lower_at_zero(n, k);
                    if result.applicable && !(stats.alpha > 0.0) {
                        BoundResult::inapplicable(
                            BoundKind::Lower,
                            Inapplicable::DegeneratePopulation,
                            result.inputs,
                        )
                    } else {
                        at_zero_only(result, t)
                    }
                }
                BoundId::UpperAtZero => {
                    // P(X ≥ t) ≤ P(X ≥ 0) keeps this valid for every t ≥ 0.
                    let mut result = upper_at_zero(n, k);
                    if result.applicable && !(stats.alpha > 0.0) {
                        result = BoundResult::inapplicable(
                            BoundKind::Upper,
                            Inapplicable::DegeneratePopulation,
                            result.inputs,
                        );
                    } else if result.applicable && t < 0.0 {
                        result =
                            BoundResult::inapplicable(BoundKind::Upper, Inapplicable::ThresholdNotZero, result.inputs);
                    }
                    result.inputs.t = Some(t);
                    result
                }
                BoundId::AbsDevUpper => abs_dev_upper(n, k, stats.alpha, t),
                BoundId::AbsDevLower => abs_dev_lower(n, k, stats.alpha, t),
                BoundId::BmSerfling => {
                    let mut result = bm_serfling_upper(n, k, stats.a, stats.b, eps);
                    result.inputs.t = Some(t);
                    result
                }
                BoundId::BmBernstein => {
                    let mut result = bm_bernstein_upper(n, k, stats.a, stats.b, stats.sigma2, eps, delta);
                    result.inputs.t = Some(t);
                    result
                }
            };
            (id, result)
        })
        .collect()
}

fn at_zero_only(result: BoundResult, t: f64) -> BoundResult {
    if result.applicable && t != 0.0 {
        BoundResult::inapplicable(result.kind, Inapplicable::ThresholdNotZero, result.inputs)
    } else {
        result
    }
}
