//! Property suites checked against exact oracles.
//!
//! Every check draws its random cases up front from a ChaCha8 stream keyed
//! by `(seed, check)`, then evaluates them in parallel and collects the
//! results in case order, so reports are identical across runs and thread
//! counts.

use std::fmt::{self, Display, Write as _};
use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use swor_core::bounds::{
    abs_dev_lower, abs_dev_lower_window, abs_dev_upper, evaluate_all, linear_minorant, lower_at_zero,
    quadratic_minorant, upper_at_zero,
};
use swor_core::hypergeom::{mad_normalized_lower_bound, robbins_bounds};
use swor_core::{
    exact_distribution, extreme_distribution, extreme_population, is_majorized_by, minimal_population,
    robin_hood_transfer, two_block_distribution, BoundKind, DiscreteDistribution, Error, Hypergeometric, Population,
    Rational, Scalar,
};

use crate::mc::par_mc_tail;

/// Float slack when comparing a probability with a bound.
pub const PROBABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum Suite {
    Hypergeom,
    Majorization,
    Schur,
    Bounds,
    Folklore,
    All,
}

impl Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Suite::Hypergeom => "hypergeom",
            Suite::Majorization => "majorization",
            Suite::Schur => "schur",
            Suite::Bounds => "bounds",
            Suite::Folklore => "folklore",
            Suite::All => "all",
        };
        f.write_str(name)
    }
}

/// Sizes and case counts.
#[derive(Debug, Clone, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest `n` in the hypergeometric sweeps.
    pub hypergeom_max_n: u64,
    /// Largest `n` in the exact mean-absolute-deviation sweeps.
    pub mad_max_n: u64,
    /// Largest population enumerated exhaustively.
    pub enum_max_n: usize,
    pub zero_threshold_cases: usize,
    pub abs_dev_cases: usize,
    pub bounds_cases: usize,
    pub majorization_cases: usize,
    pub majorization_max_n: usize,
    pub schur_pairs: usize,
    pub schur_max_n: usize,
    pub folklore_cases: usize,
    pub mc_instances: usize,
    pub mc_reps: u64,
    /// Misses tolerated among `mc_instances` at five standard errors.
    pub mc_allowed_misses: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            hypergeom_max_n: 200,
            mad_max_n: 60,
            enum_max_n: 14,
            zero_threshold_cases: 1000,
            abs_dev_cases: 500,
            bounds_cases: 500,
            majorization_cases: 1000,
            majorization_max_n: 30,
            schur_pairs: 300,
            schur_max_n: 12,
            folklore_cases: 300,
            mc_instances: 30,
            mc_reps: 100_000,
            mc_allowed_misses: 1,
        }
    }
}

/// One violated inequality.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure {
    pub inputs: String,
    pub lhs: String,
    pub relation: &'static str,
    pub rhs: String,
}

impl Failure {
    fn new(inputs: impl Into<String>, lhs: impl Display, relation: &'static str, rhs: impl Display) -> Self {
        Self { inputs: inputs.into(), lhs: lhs.to_string(), relation, rhs: rhs.to_string() }
    }
}

impl Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {} {} {}", self.inputs, self.lhs, self.relation, self.rhs)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: &'static str,
    pub cases: u64,
    pub failures: Vec<Failure>,
    pub elapsed: Duration,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyReport {
    pub suite: Suite,
    pub seed: u64,
    pub checks: Vec<CheckReport>,
    pub elapsed: Duration,
}

impl VerifyReport {
    pub fn cases(&self) -> u64 {
        self.checks.iter().map(|c| c.cases).sum()
    }

    pub fn failures(&self) -> impl Iterator<Item = (&'static str, &Failure)> {
        self.checks.iter().flat_map(|c| c.failures.iter().map(move |f| (c.name, f)))
    }

    pub fn failure_count(&self) -> usize {
        self.checks.iter().map(|c| c.failures.len()).sum()
    }

    pub fn passed(&self) -> bool {
        self.failure_count() == 0
    }

    /// Plain-text summary listing at most `max_failures` failures per check.
    pub fn render(&self, max_failures: usize) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "suite {} (seed {})", self.suite, self.seed);
        for check in &self.checks {
            let status = if check.passed() { "ok" } else { "FAILED" };
            let _ = writeln!(
                out,
                "  {:<28} {:>9} cases  {:>6} failures  {:>8.3}s  {status}",
                check.name,
                check.cases,
                check.failures.len(),
                check.elapsed.as_secs_f64()
            );
            for failure in check.failures.iter().take(max_failures) {
                let _ = writeln!(out, "      {failure}");
            }
            if check.failures.len() > max_failures {
                let _ = writeln!(out, "      … {} more", check.failures.len() - max_failures);
            }
        }
        let _ = writeln!(
            out,
            "total: {} cases, {} failures, {:.3}s",
            self.cases(),
            self.failure_count(),
            self.elapsed.as_secs_f64()
        );
        out
    }
}

fn timed(name: &'static str, body: impl FnOnce() -> (u64, Vec<Failure>)) -> CheckReport {
    let start = Instant::now();
    let (cases, failures) = body();
    CheckReport { name, cases, failures, elapsed: start.elapsed() }
}

/// Runs `check` on every case in parallel, keeping failures in case order.
fn sweep<T: Sync>(cases: &[T], check: impl Fn(&T) -> Vec<Failure> + Sync + Send) -> (u64, Vec<Failure>) {
    let failures = cases.par_iter().map(check).collect::<Vec<_>>().into_iter().flatten().collect();
    (cases.len() as u64, failures)
}

/// Like [`sweep`], for checks that cover several cases per item.
fn sweep_counted<T: Sync>(items: &[T], check: impl Fn(&T) -> (u64, Vec<Failure>) + Sync + Send) -> (u64, Vec<Failure>) {
    let results: Vec<(u64, Vec<Failure>)> = items.par_iter().map(check).collect();
    (results.iter().map(|r| r.0).sum(), results.into_iter().flat_map(|r| r.1).collect())
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn show<S: Display>(values: &[S]) -> String {
    let items: Vec<String> = values.iter().map(ToString::to_string).collect();
    format!("[{}]", items.join(", "))
}

fn q(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

fn exact_f64(value: f64) -> Rational {
    Rational::from_float(value).expect("finite")
}

/// Integer entries in `[-9, 9]` minus their mean: exact and never all zero.
pub fn random_rational_population(rng: &mut ChaCha8Rng, n: usize) -> Population<Rational> {
    loop {
        let raw: Vec<Rational> = (0..n).map(|_| Rational::from_integer(rng.gen_range(-9i64..=9).into())).collect();
        if let Ok(pop) = Population::centered(raw) {
            if !pop.alpha().is_zero() {
                return pop;
            }
        }
    }
}

/// Centered float data in one of three shapes (uniform, skewed, tied) at
/// a random scale.
pub fn random_float_population(rng: &mut ChaCha8Rng, n: usize) -> Population<f64> {
    loop {
        let shape = rng.gen_range(0..3);
        let scale = 10f64.powf(rng.gen_range(-2.0..2.0));
        let raw: Vec<f64> = (0..n)
            .map(|_| match shape {
                0 => rng.gen_range(-1.0..1.0),
                1 => -(1.0 - rng.gen::<f64>()).ln(),
                _ => rng.gen_range(-3i32..=3) as f64,
            })
            .map(|v| v * scale)
            .collect();
        if let Ok(pop) = Population::centered(raw) {
            if pop.alpha() > 1e-9 * scale {
                return pop;
            }
        }
    }
}

fn all_pairs(max_n: u64) -> Vec<(u64, u64)> {
    (2..=max_n).flat_map(|n| (1..n).map(move |i| (n, i))).collect()
}

/// Sweeps every `(n, i)` with `2 ≤ n ≤ max_n`; `cases(n, i)` counts the
/// triples `check(n, i)` covers.
fn sweep_triples(
    max_n: u64,
    cases: impl Fn(u64, u64) -> u64 + Sync + Send,
    check: impl Fn(u64, u64) -> Vec<Failure> + Sync + Send,
) -> (u64, Vec<Failure>) {
    sweep_counted(&all_pairs(max_n), |&(n, i)| (cases(n, i), check(n, i)))
}

fn hyp(n: u64, i: u64, k: u64) -> Hypergeometric {
    Hypergeometric::new(n, i, k).expect("valid parameters")
}

/// Exact pmf sums to one for `n ≤ mad_max_n`; float pmf within `1e-12`
/// for `n ≤ hypergeom_max_n`.
pub fn check_pmf_normalization(config: &VerifyConfig) -> CheckReport {
    timed("pmf_normalization", || {
        sweep_triples(config.hypergeom_max_n, |n, _| n - 1, |n, i| {
            let mut failures = Vec::new();
            for k in 1..n {
                let h = hyp(n, i, k);
                let total: f64 = h.pmf_table().iter().sum();
                if (total - 1.0).abs() > 1e-12 {
                    failures.push(Failure::new(format!("Hyp({n},{i},{k}) float"), total, "=", 1));
                }
                if n <= config.mad_max_n {
                    let exact: BigUint = h.counts().iter().sum();
                    if exact != h.total() {
                        failures.push(Failure::new(format!("Hyp({n},{i},{k}) exact"), exact, "=", h.total()));
                    }
                }
            }
            failures
        })
    })
}

/// `Hyp(n,i,k)` and `Hyp(n,k,i)` share their pmf.
pub fn check_pmf_symmetry(config: &VerifyConfig) -> CheckReport {
    timed("pmf_symmetry", || {
        sweep_triples(config.hypergeom_max_n, |n, i| n - 1 - i, |n, i| {
            let mut failures = Vec::new();
            for k in (i + 1)..n {
                let (h, t) = (hyp(n, i, k), hyp(n, k, i));
                for (m, (a, b)) in h.support().zip(h.pmf_table().into_iter().zip(t.pmf_table())) {
                    if (a - b).abs() > 1e-12 {
                        failures.push(Failure::new(format!("n={n} i={i} k={k} m={m}"), a, "=", b));
                    }
                }
                if n <= config.mad_max_n / 2 {
                    for m in h.support() {
                        let (a, b) = (h.pmf_exact(m as i64), t.pmf_exact(m as i64));
                        if a != b {
                            failures.push(Failure::new(format!("n={n} i={i} k={k} m={m} exact"), a, "=", b));
                        }
                    }
                }
            }
            failures
        })
    })
}

fn relative_gap(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

/// Closed-form mean absolute deviation against `Σ_j |j - ik/n| P(H = j)`:
/// exact equality in rationals, relative `1e-10` in floats.
pub fn check_mad_identity(config: &VerifyConfig) -> CheckReport {
    timed("mad_identity", || {
        sweep_triples(config.mad_max_n, |n, _| n - 1, |n, i| {
            let mut failures = Vec::new();
            for k in 1..n {
                let h = hyp(n, i, k);
                let ik = BigInt::from(i * k);
                let weighted: BigInt = h
                    .support()
                    .zip(h.counts())
                    .map(|(j, count)| (BigInt::from(n * j) - &ik).abs() * BigInt::from(count))
                    .sum();
                let direct = Rational::new(weighted, BigInt::from(h.total()) * BigInt::from(n));
                let closed = h.mean_abs_deviation_exact();
                if direct != closed {
                    failures.push(Failure::new(format!("Hyp({n},{i},{k}) exact"), &closed, "=", &direct));
                }
                let mean = h.mean();
                let direct_f: f64 =
                    h.support().zip(h.pmf_table()).map(|(j, p)| (j as f64 - mean).abs() * p).sum();
                let closed_f = h.mean_abs_deviation();
                if relative_gap(closed_f, direct_f) > 1e-10 {
                    failures.push(Failure::new(format!("Hyp({n},{i},{k}) float"), closed_f, "≈", direct_f));
                }
            }
            failures
        })
    })
}

/// `E|H - ik/n| = E|W - (n-i)k/n|` with `W ~ Hyp(n, n-i, k)`.
pub fn check_mad_complement(config: &VerifyConfig) -> CheckReport {
    timed("mad_complement", || {
        sweep_triples(config.mad_max_n, |n, _| n - 1, |n, i| {
            (1..n)
                .filter_map(|k| {
                    let h = hyp(n, i, k);
                    let (a, b) = (h.mean_abs_deviation_exact(), h.complement().mean_abs_deviation_exact());
                    (a != b).then(|| Failure::new(format!("Hyp({n},{i},{k})"), &a, "=", &b))
                })
                .collect()
        })
    })
}

/// `P(H = m) ≥ e^{-1/3}/(16√(2π)) · …` wherever `m = ⌈ik/n⌉ ∈ {2, …, min(i,k)-1}`.
/// Cases count the triples where the bound applies.
pub fn check_mode_lower_bound(config: &VerifyConfig) -> CheckReport {
    timed("mode_lower_bound", || {
        let results: Vec<(u64, Vec<Failure>)> = all_pairs(config.hypergeom_max_n)
            .par_iter()
            .map(|&(n, i)| {
                let mut applicable = 0;
                let mut failures = Vec::new();
                for k in 1..n {
                    let h = hyp(n, i, k);
                    let bound = h.mode_probability_lower_bound();
                    if let Some(value) = bound.applicable_value() {
                        applicable += 1;
                        let m = h.mean_ceiling();
                        let p = h.pmf(m as i64);
                        if p < value {
                            failures.push(Failure::new(format!("Hyp({n},{i},{k}) m={m}"), p, "≥", value));
                        }
                    }
                }
                (applicable, failures)
            })
            .collect();
        let cases = results.iter().map(|r| r.0).sum();
        (cases, results.into_iter().flat_map(|r| r.1).collect())
    })
}

/// `n/(2i(n-i)) · E|H - ik/n| ≥ c·√(k/n)·√(n-k)/n` for every `(i, k)`.
pub fn check_mad_lower_bound(config: &VerifyConfig) -> CheckReport {
    timed("mad_lower_bound", || {
        sweep_triples(config.hypergeom_max_n, |n, _| n - 1, |n, i| {
            (1..n)
                .filter_map(|k| {
                    let value = hyp(n, i, k).normalized_mad();
                    let bound = mad_normalized_lower_bound(n, k);
                    (value < bound).then(|| Failure::new(format!("Hyp({n},{i},{k})"), value, "≥", bound))
                })
                .collect()
        })
    })
}

/// `n/(2i(n-i)) · E|H - ik/n| ≥ k/(2n)` when `ik/n ≤ 1/2`, exactly.
pub fn check_small_mean_rate(config: &VerifyConfig) -> CheckReport {
    timed("small_mean_rate", || {
        sweep_triples(config.hypergeom_max_n, |n, i| (1..n).filter(|&k| 2 * i * k <= n).count() as u64, |n, i| {
            (1..n)
                .filter(|&k| 2 * i * k <= n)
                .filter_map(|k| {
                    let value = hyp(n, i, k).normalized_mad_exact();
                    let bound = q(k as i64, 2 * n as i64);
                    (value < bound).then(|| Failure::new(format!("Hyp({n},{i},{k})"), &value, "≥", &bound))
                })
                .collect()
        })
    })
}

/// Robbins' bracket contains `ln n!` computed from big integers.
pub fn check_robbins() -> CheckReport {
    timed("robbins_bracket", || {
        let mut failures = Vec::new();
        let mut factorial = BigUint::from(1u8);
        for n in 1..=300u64 {
            factorial *= n;
            let exact = swor_core::hypergeom::ln_big(&factorial);
            match robbins_bounds(n) {
                Ok(bracket) if bracket.contains(exact) => {}
                Ok(bracket) => failures.push(Failure::new(
                    format!("n={n}"),
                    exact,
                    "∈",
                    format!("({}, {})", bracket.lower, bracket.upper),
                )),
                Err(e) => failures.push(Failure::new(format!("n={n}"), e, "=", "bracket")),
            }
        }
        (300, failures)
    })
}

pub fn hypergeom_suite(config: &VerifyConfig) -> Vec<CheckReport> {
    vec![
        check_pmf_normalization(config),
        check_pmf_symmetry(config),
        check_mad_identity(config),
        check_mad_complement(config),
        check_mode_lower_bound(config),
        check_mad_lower_bound(config),
        check_small_mean_rate(config),
        check_robbins(),
    ]
}

fn random_in_b_alpha(rng: &mut ChaCha8Rng, max_n: usize) -> Population<f64> {
    let n = rng.gen_range(2..=max_n);
    let pop = random_float_population(rng, n);
    let target = rng.gen_range(0.0..10.0f64).max(1e-3);
    let factor = target / pop.alpha();
    Population::new(pop.values().iter().map(|v| v * factor).collect()).expect("rescaled population stays centered")
}

/// Two-block certificates validate and every population sits between the
/// two-block vector and the extreme vector, under any permutation.
pub fn check_majorization_bracket(config: &VerifyConfig) -> CheckReport {
    timed("majorization_bracket", || {
        let mut rng = rng_for(config.seed, 11);
        let cases: Vec<(Population<f64>, Vec<f64>)> = (0..config.majorization_cases)
            .map(|_| {
                let pop = random_in_b_alpha(&mut rng, config.majorization_max_n);
                let mut shuffled = pop.values().to_vec();
                shuffled.shuffle(&mut rng);
                (pop, shuffled)
            })
            .collect();
        sweep(&cases, |(pop, shuffled)| {
            let inputs = || format!("P={}", show(pop.values()));
            let mut failures = Vec::new();
            if !is_majorized_by(pop.values(), pop.values()).unwrap_or(false) {
                failures.push(Failure::new(inputs(), "P", "≺", "P"));
            }
            match minimal_population(pop) {
                Ok(cert) => {
                    if !cert.is_valid() {
                        failures.push(Failure::new(inputs(), "certificate", "is", "valid"));
                    }
                    for side in [pop.values(), shuffled.as_slice()] {
                        if !is_majorized_by(cert.minimal_vector.values(), side).unwrap_or(false) {
                            failures.push(Failure::new(inputs(), show(cert.minimal_vector.values()), "≺", show(side)));
                        }
                    }
                }
                Err(e) => failures.push(Failure::new(inputs(), e, "=", "certificate")),
            }
            let top = extreme_population(pop.len(), pop.alpha()).expect("α > 0");
            for side in [pop.values(), shuffled.as_slice()] {
                if !is_majorized_by(side, top.values()).unwrap_or(false) {
                    failures.push(Failure::new(inputs(), show(side), "≺", show(top.values())));
                }
            }
            failures
        })
    })
}

/// The relation between two vectors is unchanged by permuting either one.
pub fn check_permutation_invariance(config: &VerifyConfig) -> CheckReport {
    timed("permutation_invariance", || {
        let mut rng = rng_for(config.seed, 12);
        let cases: Vec<[Vec<Rational>; 4]> = (0..config.majorization_cases)
            .map(|_| {
                let n = rng.gen_range(2..=config.majorization_max_n.min(12));
                let x = random_rational_population(&mut rng, n).values().to_vec();
                let y = random_rational_population(&mut rng, n).values().to_vec();
                let (mut px, mut py) = (x.clone(), y.clone());
                px.shuffle(&mut rng);
                py.shuffle(&mut rng);
                [x, y, px, py]
            })
            .collect();
        sweep(&cases, |[x, y, px, py]| {
            let base = is_majorized_by(x, y).expect("equal lengths");
            let permuted = is_majorized_by(px, py).expect("equal lengths");
            if base == permuted {
                Vec::new()
            } else {
                vec![Failure::new(format!("x={} y={}", show(x), show(y)), base, "=", permuted)]
            }
        })
    })
}

fn random_transfer(rng: &mut ChaCha8Rng, pop: &Population<Rational>) -> Option<Population<Rational>> {
    let n = pop.len();
    let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
    let values = pop.values();
    let (donor, receiver) = if values[a] >= values[b] { (a, b) } else { (b, a) };
    let gap = values[donor].clone() - values[receiver].clone();
    if !gap.is_positive() {
        return None;
    }
    let eps = gap * q(rng.gen_range(1..=4), 8);
    robin_hood_transfer(pop, donor, receiver, eps).ok()
}

/// Robin Hood transfers never move a population up the order.
pub fn check_transfers(config: &VerifyConfig) -> CheckReport {
    timed("transfers_descend", || {
        let mut rng = rng_for(config.seed, 13);
        let cases: Vec<(Population<Rational>, Population<Rational>)> = (0..config.majorization_cases)
            .filter_map(|_| {
                let n = rng.gen_range(2..=config.majorization_max_n);
                let pop = random_rational_population(&mut rng, n);
                random_transfer(&mut rng, &pop).map(|out| (pop, out))
            })
            .collect();
        sweep(&cases, |(before, after)| {
            if is_majorized_by(after.values(), before.values()).unwrap_or(false) {
                Vec::new()
            } else {
                vec![Failure::new(format!("P={}", show(before.values())), show(after.values()), "≺", "P")]
            }
        })
    })
}

pub fn majorization_suite(config: &VerifyConfig) -> Vec<CheckReport> {
    vec![check_majorization_bracket(config), check_permutation_invariance(config), check_transfers(config)]
}

/// A comparable pair `(lower, upper)` with `lower ≺ upper`.
pub fn random_majorized_pair(rng: &mut ChaCha8Rng, max_n: usize) -> (Population<Rational>, Population<Rational>) {
    loop {
        let n = rng.gen_range(2..=max_n);
        let upper = random_rational_population(rng, n);
        if rng.gen_bool(0.2) {
            if let Ok(cert) = minimal_population(&upper) {
                return (cert.minimal_vector, upper);
            }
        }
        let mut lower = upper.clone();
        let mut moved = false;
        for _ in 0..rng.gen_range(1..=3) {
            if let Some(next) = random_transfer(rng, &lower) {
                lower = next;
                moved = true;
            }
        }
        if moved {
            return (lower, upper);
        }
    }
}

type ConvexFn = Box<dyn Fn(&Rational) -> Rational + Send + Sync>;

fn convex_family(alpha: &Rational) -> Vec<(String, ConvexFn)> {
    let mut family: Vec<(String, ConvexFn)> = vec![
        ("x^2".into(), Box::new(|x: &Rational| x * x)),
        ("|x|".into(), Box::new(|x: &Rational| x.abs())),
    ];
    for (num, den) in [(-1, 2), (0, 1), (1, 2)] {
        let c = alpha * q(num, den);
        family.push((
            format!("max(0, x - {})", c),
            Box::new(move |x: &Rational| {
                let d = x - &c;
                if d.is_positive() {
                    d
                } else {
                    Rational::zero()
                }
            }),
        ));
    }
    family
}

/// For generated pairs `P' ≺ P`: `E|X_{P'}| ≤ E|X_P|` and `E g(X_{P'}) ≤ E g(X_P)`
/// for `g` in `x²`, `|x|`, `(x - c)₊` with `c ∈ {-α/2, 0, α/2}`, and the
/// quadratic minorant at `y = 1/4` on `X/α` (`α` of the larger vector).
pub fn check_schur_pairs(config: &VerifyConfig) -> CheckReport {
    timed("schur_convex_order", || {
        let mut rng = rng_for(config.seed, 21);
        let pairs: Vec<_> =
            (0..config.schur_pairs).map(|_| random_majorized_pair(&mut rng, config.schur_max_n)).collect();
        sweep(&pairs, |(lower, upper)| {
            let inputs = |k: usize| format!("P'={} P={} k={k}", show(lower.values()), show(upper.values()));
            let mut failures = Vec::new();
            if !is_majorized_by(lower.values(), upper.values()).unwrap_or(false) {
                failures.push(Failure::new(inputs(0), "P'", "≺", "P"));
                return failures;
            }
            let alpha = upper.alpha();
            let alpha_f = alpha.as_f64();
            let family = convex_family(&alpha);
            for k in 1..upper.len() {
                let (dl, du) = (exact_distribution(lower, k).expect("small"), exact_distribution(upper, k).expect("small"));
                let (el, eu) = (dl.expected_abs(), du.expected_abs());
                if el > eu {
                    failures.push(Failure::new(inputs(k), format!("E|X_P'|={el}"), "≤", format!("E|X_P|={eu}")));
                }
                for (name, g) in &family {
                    let (gl, gu) = (dl.expectation(|v| g(v)), du.expectation(|v| g(v)));
                    if gl > gu {
                        failures.push(Failure::new(inputs(k), format!("E {name} (P')={gl}"), "≤", format!("E {name} (P)={gu}")));
                    }
                }
                let minorant = |d: &DiscreteDistribution<Rational>| -> f64 {
                    d.atoms()
                        .map(|(v, p)| {
                            let y = (v.as_f64() / alpha_f).clamp(-1.0, 1.0);
                            quadratic_minorant(0.25, y).expect("in domain") * p.as_f64()
                        })
                        .sum()
                };
                let (ql, qu) = (minorant(&dl), minorant(&du));
                if ql > qu + PROBABILITY_SLACK {
                    failures.push(Failure::new(inputs(k), format!("E quad (P')={ql}"), "≤", format!("E quad (P)={qu}")));
                }
            }
            failures
        })
    })
}

pub fn schur_suite(config: &VerifyConfig) -> Vec<CheckReport> {
    vec![check_schur_pairs(config)]
}

/// For random exact populations and every `k`:
/// `P(X > 0) ≥ lower_at_zero` and `P(X ≥ 0) ≤ upper_at_zero`.
pub fn check_zero_threshold(config: &VerifyConfig) -> CheckReport {
    timed("zero_threshold_bounds", || {
        let mut rng = rng_for(config.seed, 31);
        let pops: Vec<_> = (0..config.zero_threshold_cases)
            .map(|_| {
                let n = rng.gen_range(2..=config.enum_max_n);
                random_rational_population(&mut rng, n)
            })
            .collect();
        let results: Vec<(u64, Vec<Failure>)> = pops
            .par_iter()
            .map(|pop| {
                let n = pop.len();
                let mut failures = Vec::new();
                for k in 1..n {
                    let dist = exact_distribution(pop, k).expect("small");
                    let zero = Rational::zero();
                    let above = dist.tail_probability(&zero, true).as_f64();
                    let at_least = dist.tail_probability(&zero, false).as_f64();
                    let lower = lower_at_zero(n as u64, k as u64).value;
                    let upper = upper_at_zero(n as u64, k as u64).value;
                    let inputs = || format!("P={} k={k}", show(pop.values()));
                    if above < lower {
                        failures.push(Failure::new(inputs(), format!("P(X>0)={above}"), "≥", format!("lower_at_zero={lower}")));
                    }
                    if at_least > upper {
                        failures.push(Failure::new(inputs(), format!("P(X≥0)={at_least}"), "≤", format!("upper_at_zero={upper}")));
                    }
                }
                (n as u64 - 1, failures)
            })
            .collect();
        (results.iter().map(|r| r.0).sum(), results.into_iter().flat_map(|r| r.1).collect())
    })
}

/// Random `(P, k, t)`: `abs_dev_lower ≤ P(X ≥ t) ≤ abs_dev_upper` for `t`
/// inside the lower bound's window, and `P(X ≥ t) ≤ abs_dev_upper` for
/// `t ∈ (0, α)`.
pub fn check_abs_dev_soundness(config: &VerifyConfig) -> CheckReport {
    timed("abs_dev_soundness", || {
        let mut rng = rng_for(config.seed, 32);
        let cases: Vec<(Population<Rational>, usize, f64, f64)> = (0..config.abs_dev_cases)
            .map(|_| {
                let n = rng.gen_range(2..=config.enum_max_n);
                let pop = random_rational_population(&mut rng, n);
                let k = rng.gen_range(1..n);
                let alpha = pop.alpha().as_f64();
                let window = abs_dev_lower_window(n as u64, k as u64, alpha);
                let t_window = window * (1.0 - rng.gen::<f64>());
                let t_wide = alpha * (1.0 - rng.gen::<f64>());
                (pop, k, t_window.min(window * (1.0 - 1e-12)), t_wide.min(alpha * (1.0 - 1e-12)))
            })
            .collect();
        sweep(&cases, |(pop, k, t_window, t_wide)| {
            let (n, k) = (pop.len() as u64, *k);
            let alpha = pop.alpha().as_f64();
            let dist = exact_distribution(pop, k).expect("small");
            let mut failures = Vec::new();
            for (t, with_lower) in [(*t_window, true), (*t_wide, false)] {
                let tail = dist.tail_probability(&exact_f64(t), false).as_f64();
                let inputs = || format!("P={} k={k} t={t}", show(pop.values()));
                let upper = abs_dev_upper(n, k as u64, alpha, t);
                if !upper.applicable {
                    failures.push(Failure::new(inputs(), "abs_dev_upper", "is", "applicable"));
                } else if tail > upper.value + PROBABILITY_SLACK {
                    failures.push(Failure::new(inputs(), format!("P(X≥t)={tail}"), "≤", format!("abs_dev_upper={}", upper.value)));
                }
                if with_lower {
                    let lower = abs_dev_lower(n, k as u64, alpha, t);
                    if !lower.applicable {
                        failures.push(Failure::new(inputs(), "abs_dev_lower", "is", "applicable"));
                    } else if tail + PROBABILITY_SLACK < lower.value {
                        failures.push(Failure::new(inputs(), format!("P(X≥t)={tail}"), "≥", format!("abs_dev_lower={}", lower.value)));
                    }
                }
            }
            failures
        })
    })
}

/// Every applicable bound from the dispatcher against the exact tail of a
/// random float population, with each bound's strictness.
pub fn check_dispatcher_soundness(config: &VerifyConfig) -> CheckReport {
    timed("all_bounds_soundness", || {
        let mut rng = rng_for(config.seed, 33);
        let cases: Vec<(Population<f64>, usize, f64, f64)> = (0..config.bounds_cases)
            .map(|_| {
                let n = rng.gen_range(2..=config.enum_max_n);
                let pop = random_float_population(&mut rng, n);
                let k = rng.gen_range(1..n);
                let t = if rng.gen_bool(0.2) { 0.0 } else { rng.gen_range(0.0..1.1) * pop.alpha() };
                let delta = [0.01, 0.05, 0.2][rng.gen_range(0..3)];
                (pop, k, t, delta)
            })
            .collect();
        sweep(&cases, |(pop, k, t, delta)| {
            let dist = exact_distribution(pop, *k).expect("small");
            let stats = pop.stats();
            evaluate_all(pop.len() as u64, *k as u64, &stats, *t, *delta)
                .into_iter()
                .filter(|(_, result)| result.applicable)
                .filter_map(|(id, result)| {
                    let tail = dist.tail_probability(t, id.is_strict());
                    let sound = match result.kind {
                        BoundKind::Upper => tail <= result.value + PROBABILITY_SLACK,
                        BoundKind::Lower => tail + PROBABILITY_SLACK >= result.value,
                    };
                    (!sound).then(|| {
                        let relation = if result.kind == BoundKind::Upper { "≤" } else { "≥" };
                        let op = if id.is_strict() { ">" } else { "≥" };
                        Failure::new(
                            format!("P={} k={k} t={t} delta={delta}", show(pop.values())),
                            format!("P(X{op}t)={tail}"),
                            relation,
                            format!("{}={}", id.name(), result.value),
                        )
                    })
                })
                .collect()
        })
    })
}

/// `abs_dev_upper` is non-increasing on `(0, α)`, flat on `[α/2, α)`,
/// matches its formula, and dominates the tail of the extreme population.
pub fn check_abs_dev_upper_shape(config: &VerifyConfig) -> CheckReport {
    timed("abs_dev_upper_shape", || {
        let grid: Vec<(u64, u64)> =
            (2..=config.enum_max_n as u64 * 2).flat_map(|n| (1..n).map(move |k| (n, k))).collect();
        sweep(&grid, |&(n, k)| {
            let mut failures = Vec::new();
            let dist = extreme_distribution(n, k, Rational::from_integer(1.into())).expect("valid");
            let spread = 2.0 * (k * (n - k)) as f64 / (n * (n - 1)) as f64;
            let flat = abs_dev_upper(n, k, 1.0, 0.5).value;
            let mut previous = f64::INFINITY;
            for step in 1..1000 {
                let t = step as f64 / 1000.0;
                let value = abs_dev_upper(n, k, 1.0, t).value;
                let inputs = || format!("n={n} k={k} t={t}");
                if value > previous {
                    failures.push(Failure::new(inputs(), value, "≤", previous));
                }
                if t >= 0.5 && value != flat {
                    failures.push(Failure::new(inputs(), value, "=", flat));
                }
                let formula = 1.0 - (t / (1.0 - t)).min(1.0) * (1.0 - spread);
                if (value - formula.clamp(0.0, 1.0)).abs() > 1e-15 {
                    failures.push(Failure::new(inputs(), value, "=", formula));
                }
                let tail = dist.tail_probability(&exact_f64(t), false).as_f64();
                if tail > value + PROBABILITY_SLACK {
                    failures.push(Failure::new(inputs(), format!("P(Y*≥t)={tail}"), "≤", value));
                }
                previous = value;
            }
            failures
        })
    })
}

/// The zero-threshold lower bound sits below the normalized mean absolute
/// deviation of every two-block population.
pub fn check_central_chain(config: &VerifyConfig) -> CheckReport {
    timed("lower_at_zero_chain", || {
        sweep_triples(config.hypergeom_max_n.min(100), |n, _| n - 1, |n, i| {
            (1..n)
                .filter_map(|k| {
                    let raw = lower_at_zero(n, k).raw;
                    let value = hyp(n, i, k).normalized_mad();
                    (raw > value).then(|| Failure::new(format!("n={n} i={i} k={k}"), raw, "≤", value))
                })
                .collect()
        })
    })
}

/// Minorants stay below their indicators on a dense grid, and their
/// expectations under rescaled exact laws stay below the matching tails.
pub fn check_minorants(config: &VerifyConfig) -> CheckReport {
    timed("minorants", || {
        let ys: Vec<f64> = (1..20).map(|j| j as f64 / 20.0).collect();
        let mut failures = Vec::new();
        let mut cases = 0;
        for &y in &ys {
            for step in 0..=2000 {
                let x = -1.0 + step as f64 / 1000.0;
                cases += 1;
                let lin = linear_minorant(y, x).expect("in domain");
                if lin > f64::from(u8::from(x > -y)) + PROBABILITY_SLACK {
                    failures.push(Failure::new(format!("y={y} x={x}"), format!("linear={lin}"), "≤", "1{x>-y}"));
                }
                let quad = quadratic_minorant(y, x).expect("in domain");
                if quad > f64::from(u8::from(x >= y)) + PROBABILITY_SLACK {
                    failures.push(Failure::new(format!("y={y} x={x}"), format!("quadratic={quad}"), "≤", "1{x≥y}"));
                }
            }
        }
        let mut rng = rng_for(config.seed, 34);
        let pops: Vec<(Population<f64>, usize)> = (0..100)
            .map(|_| {
                let n = rng.gen_range(2..=config.enum_max_n.min(12));
                let pop = random_float_population(&mut rng, n);
                let k = rng.gen_range(1..n);
                (pop, k)
            })
            .collect();
        let (law_cases, law_failures) = sweep(&pops, |(pop, k)| {
            let dist = exact_distribution(pop, *k).expect("small");
            let alpha = pop.alpha();
            let mut failures = Vec::new();
            for &y in &ys {
                let rescaled = |v: &f64| (v / alpha).clamp(-1.0, 1.0);
                let e_lin: f64 = dist.atoms().map(|(v, p)| linear_minorant(y, rescaled(v)).expect("in domain") * p).sum();
                let e_quad: f64 =
                    dist.atoms().map(|(v, p)| quadratic_minorant(y, rescaled(v)).expect("in domain") * p).sum();
                let above = dist.tail_probability(&(-y * alpha), true);
                let at_least = dist.tail_probability(&(y * alpha), false);
                let inputs = || format!("P={} k={k} y={y}", show(pop.values()));
                if e_lin > above + PROBABILITY_SLACK {
                    failures.push(Failure::new(inputs(), format!("E linear={e_lin}"), "≤", format!("P(Y>-y)={above}")));
                }
                if e_quad > at_least + PROBABILITY_SLACK {
                    failures.push(Failure::new(inputs(), format!("E quadratic={e_quad}"), "≤", format!("P(Y≥y)={at_least}")));
                }
            }
            failures
        });
        failures.extend(law_failures);
        (cases + law_cases, failures)
    })
}

/// For two-block laws, `E q(t/α, X/α)` computed directly matches
/// `α/(2(α-t)) · E X²/α² - t/(2(α-t))` with `E X²` from the hypergeometric
/// variance, to `1e-10`.
pub fn check_quadratic_reconstruction(config: &VerifyConfig) -> CheckReport {
    timed("quadratic_reconstruction", || {
        sweep_triples(config.enum_max_n as u64, |n, _| n - 1, |n, i| {
            let mut failures = Vec::new();
            for k in 1..n {
                let alpha = 1.0;
                let dist = two_block_distribution(n, i, k, alpha).expect("valid");
                let h = hyp(n, i, k);
                let scale = n as f64 / (i * (n - i)) as f64;
                let second_moment = alpha * alpha * scale * scale * h.variance();
                for t in [0.1, 0.3, 0.6, 0.9] {
                    let y = t / alpha;
                    let direct: f64 = dist
                        .atoms()
                        .map(|(v, p)| quadratic_minorant(y, (v / alpha).clamp(-1.0, 1.0)).expect("in domain") * p)
                        .sum();
                    let closed = alpha / (2.0 * (alpha - t)) * second_moment / (alpha * alpha) - t / (2.0 * (alpha - t));
                    if (direct - closed).abs() > 1e-10 {
                        failures.push(Failure::new(format!("n={n} i={i} k={k} t={t}"), direct, "≈", closed));
                    }
                }
            }
            failures
        })
    })
}

pub fn bounds_suite(config: &VerifyConfig) -> Vec<CheckReport> {
    vec![
        check_zero_threshold(config),
        check_abs_dev_soundness(config),
        check_dispatcher_soundness(config),
        check_abs_dev_upper_shape(config),
        check_central_chain(config),
        check_minorants(config),
        check_quadratic_reconstruction(config),
    ]
}

fn check_identities(pop: &Population<Rational>, k: usize) -> Vec<Failure> {
    let inputs = || format!("P={} k={k}", show(pop.values()));
    let dist = match exact_distribution(pop, k) {
        Ok(dist) => dist,
        Err(e) => return vec![Failure::new(inputs(), e, "=", "distribution")],
    };
    let mut failures = Vec::new();
    let total = dist.probabilities().into_iter().fold(Rational::zero(), |acc, p| acc + p);
    if total != q(1, 1) {
        failures.push(Failure::new(inputs(), format!("Σp={total}"), "=", 1));
    }
    if !dist.mean().is_zero() {
        failures.push(Failure::new(inputs(), format!("E X={}", dist.mean()), "=", 0));
    }
    match dist.positive_part_identities() {
        Ok(ids) => {
            if !ids.folklore_residual.is_zero() {
                failures.push(Failure::new(inputs(), format!("residual={}", ids.folklore_residual), "=", 0));
            }
            if ids.cond_mean_pos > pop.alpha() {
                failures.push(Failure::new(inputs(), format!("E(X|X>0)={}", ids.cond_mean_pos), "≤", format!("α={}", pop.alpha())));
            }
            if ids.e_plus != ids.e_minus {
                failures.push(Failure::new(inputs(), format!("E X+={}", ids.e_plus), "=", format!("E X-={}", ids.e_minus)));
            }
            if ids.e_abs != &ids.e_plus * q(2, 1) {
                failures.push(Failure::new(inputs(), format!("E|X|={}", ids.e_abs), "=", format!("2 E X+={}", &ids.e_plus * q(2, 1))));
            }
        }
        Err(Error::NoPositiveMass) => {}
        Err(e) => failures.push(Failure::new(inputs(), e, "=", "identities")),
    }
    failures
}

/// `P(X > 0) = E|X| / (2 E(X | X > 0))` exactly, together with
/// `E(X | X > 0) ≤ α`, for random, two-block and extreme populations.
pub fn check_folklore(config: &VerifyConfig) -> CheckReport {
    timed("folklore_identity", || {
        let mut rng = rng_for(config.seed, 41);
        let max_n = config.enum_max_n.min(12);
        let mut pops: Vec<Population<Rational>> = (0..config.folklore_cases)
            .map(|_| {
                let n = rng.gen_range(2..=max_n);
                random_rational_population(&mut rng, n)
            })
            .collect();
        for n in 2..=max_n {
            pops.push(extreme_population(n, q(1, 1)).expect("n ≥ 2"));
            for i in 1..n {
                let mut values = vec![q(1, i as i64); i];
                values.extend(std::iter::repeat_n(q(-1, (n - i) as i64), n - i));
                pops.push(Population::new(values).expect("zero sum"));
            }
        }
        let cases: Vec<(Population<Rational>, usize)> =
            pops.into_iter().flat_map(|p| (1..p.len()).map(move |k| (p.clone(), k))).collect();
        sweep(&cases, |(pop, k)| check_identities(pop, *k))
    })
}

/// The closed-form two-block law equals enumeration of `P_{i,1}`, and its
/// `E|X|` equals `n/(i(n-i)) · E|H - ik/n|`.
pub fn check_two_block(config: &VerifyConfig) -> CheckReport {
    timed("two_block_consistency", || {
        let cases: Vec<(u64, u64, u64)> = all_pairs(config.enum_max_n as u64)
            .into_iter()
            .flat_map(|(n, i)| (1..n).map(move |k| (n, i, k)))
            .collect();
        sweep(&cases, |&(n, i, k)| {
            let one = q(1, 1);
            let closed = two_block_distribution(n, i, k, one.clone()).expect("valid");
            let mut values = vec![q(1, i as i64); i as usize];
            values.extend(std::iter::repeat_n(q(-1, (n - i) as i64), (n - i) as usize));
            let pop = Population::new(values).expect("zero sum");
            let enumerated = exact_distribution(&pop, k as usize).expect("small");
            let mut failures = Vec::new();
            let inputs = || format!("n={n} i={i} k={k}");
            if closed.support() != enumerated.support() || closed.probabilities() != enumerated.probabilities() {
                failures.push(Failure::new(inputs(), "two_block_distribution", "=", "exact_distribution"));
            }
            let expected = q(n as i64, (i * (n - i)) as i64) * hyp(n, i, k).mean_abs_deviation_exact();
            if closed.expected_abs() != expected {
                failures.push(Failure::new(inputs(), closed.expected_abs(), "=", expected));
            }
            failures
        })
    })
}

/// The closed-form extreme law equals enumeration of `(1, 0, …, 0, -1)`.
pub fn check_extreme(config: &VerifyConfig) -> CheckReport {
    timed("extreme_consistency", || {
        let cases: Vec<(u64, u64)> =
            (2..=config.enum_max_n as u64).flat_map(|n| (1..n).map(move |k| (n, k))).collect();
        sweep(&cases, |&(n, k)| {
            let closed = extreme_distribution(n, k, q(1, 1)).expect("valid");
            let pop = extreme_population(n as usize, q(1, 1)).expect("n ≥ 2");
            let enumerated = exact_distribution(&pop, k as usize).expect("small");
            if closed == enumerated {
                Vec::new()
            } else {
                vec![Failure::new(format!("n={n} k={k}"), "extreme_distribution", "=", "exact_distribution")]
            }
        })
    })
}

/// One Monte Carlo calibration instance.
#[derive(Debug, Clone, PartialEq)]
pub struct Calibration {
    pub population: Vec<f64>,
    pub k: usize,
    pub t: f64,
    pub strict: bool,
    pub exact: f64,
    pub estimate: f64,
    pub std_error: f64,
}

impl Calibration {
    pub fn within(&self, std_errors: f64) -> bool {
        (self.estimate - self.exact).abs() <= std_errors * self.std_error
    }
}

/// Monte Carlo against exact tails on random instances.
pub fn mc_calibrations(config: &VerifyConfig) -> Vec<Calibration> {
    let mut rng = rng_for(config.seed, 51);
    let instances: Vec<(Population<f64>, usize, f64, bool, u64)> = (0..config.mc_instances)
        .map(|_| {
            let n = rng.gen_range(4..=config.enum_max_n);
            let pop = random_float_population(&mut rng, n);
            let k = rng.gen_range(1..n);
            let t = rng.gen_range(0.0..0.5) * pop.alpha();
            (pop, k, t, rng.gen_bool(0.5), rng.gen())
        })
        .collect();
    instances
        .iter()
        .map(|(pop, k, t, strict, seed)| {
            let exact = exact_distribution(pop, *k).expect("small").tail_probability(t, *strict);
            let est = par_mc_tail(pop, *k, t, *strict, config.mc_reps, *seed).expect("valid instance");
            Calibration {
                population: pop.values().to_vec(),
                k: *k,
                t: *t,
                strict: *strict,
                exact,
                estimate: est.estimate,
                std_error: est.std_error,
            }
        })
        .collect()
}

/// At most `mc_allowed_misses` instances farther than five standard errors
/// from the exact tail; when exceeded every miss is reported.
pub fn check_mc_calibration(config: &VerifyConfig) -> CheckReport {
    timed("mc_calibration", || {
        let calibrations = mc_calibrations(config);
        let misses: Vec<&Calibration> = calibrations.iter().filter(|c| !c.within(5.0)).collect();
        let failures = if misses.len() > config.mc_allowed_misses {
            misses
                .iter()
                .map(|c| {
                    Failure::new(
                        format!("P={} k={} t={} strict={}", show(&c.population), c.k, c.t, c.strict),
                        format!("|{} - {}|", c.estimate, c.exact),
                        "≤",
                        format!("5·{}", c.std_error),
                    )
                })
                .collect()
        } else {
            Vec::new()
        };
        (calibrations.len() as u64, failures)
    })
}

pub fn folklore_suite(config: &VerifyConfig) -> Vec<CheckReport> {
    vec![check_folklore(config), check_two_block(config), check_extreme(config), check_mc_calibration(config)]
}

pub fn run_suite(suite: Suite, config: &VerifyConfig) -> VerifyReport {
    let start = Instant::now();
    let checks = match suite {
        Suite::Hypergeom => hypergeom_suite(config),
        Suite::Majorization => majorization_suite(config),
        Suite::Schur => schur_suite(config),
        Suite::Bounds => bounds_suite(config),
        Suite::Folklore => folklore_suite(config),
        Suite::All => [
            hypergeom_suite(config),
            majorization_suite(config),
            schur_suite(config),
            bounds_suite(config),
            folklore_suite(config),
        ]
        .into_iter()
        .flatten()
        .collect(),
    };
    VerifyReport { suite, seed: config.seed, checks, elapsed: start.elapsed() }
}
