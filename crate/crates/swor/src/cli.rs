//! Command-line surface. Exit codes: 0 success, 1 property failure,
//! 2 usage or input error, 3 enumeration budget exceeded.

use std::fmt::{Display, Write as _};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use swor_core::bounds::evaluate_all;
use swor_core::hypergeom::binomial;
use swor_core::{exact_distribution, Error, Population, Scalar};
use thiserror::Error;

use crate::compare::{compare_rows, write_csv, write_svgs, CompareConfig};
use crate::dist::write_distribution_csv;
use crate::format::{parse_f64, parse_rational, read_population, AnyPopulation, ReadOptions};
use crate::mc::par_mc_tail;
use crate::verify::{run_suite, Suite, VerifyConfig};

#[derive(Debug, Parser)]
#[command(name = "swor", version, about = "Tail bounds for sums sampled without replacement from zero-sum populations")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate every bound on a population, with the exact (or Monte Carlo) tail.
    Eval(EvalArgs),
    /// Compare the absolute-deviation bound with the Bardenet–Maillard bounds.
    Compare(CompareArgs),
    /// Dump the exact distribution of the sample sum as CSV.
    Dist(DistArgs),
    /// Monte Carlo estimate of a tail probability.
    Sample(SampleArgs),
    /// Run a property suite against exact oracles.
    Verify(VerifyArgs),
}

#[derive(Debug, Args)]
pub struct PopulationArgs {
    /// Population file: one entry per line, or a JSON array; entries are decimals or p/q.
    pub file: PathBuf,
    /// Read every entry as an exact rational.
    #[arg(long)]
    pub rational: bool,
    /// Subtract the mean instead of requiring a zero sum.
    #[arg(long)]
    pub center: bool,
}

impl PopulationArgs {
    fn load(&self) -> anyhow::Result<AnyPopulation> {
        let options = ReadOptions { rational: self.rational, center: self.center };
        read_population(&self.file, options).with_context(|| format!("loading {}", self.file.display()))
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    /// Sample size.
    #[arg(long)]
    pub k: usize,
    /// Threshold on the sample sum (decimal or p/q).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: String,
    /// Confidence parameter of the Bernstein bound.
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// Monte Carlo repetitions when enumeration is over budget.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, default_value_t = 100)]
    pub n: u64,
    #[arg(long, default_value_t = 1.0)]
    pub alpha: f64,
    /// Thresholds on the sample average, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0.001,0.005,0.01")]
    pub eps: Vec<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory receiving one SVG chart per threshold.
    #[arg(long)]
    pub svg: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct DistArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub population: PopulationArgs,
    #[arg(long)]
    pub k: usize,
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub t: String,
    /// Estimate P(X > t) instead of P(X ≥ t).
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Largest n in the hypergeometric sweeps.
    #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
    pub n: Option<u64>,
    /// Monte Carlo repetitions per calibration instance.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub reps: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0:#}")]
    Usage(#[from] anyhow::Error),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Success,
    PropertyFailure,
}

fn usage(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Usage(e.into())
}

fn emit(out: Option<&Path>, content: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, content).with_context(|| format!("writing {}", path.display()))?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(content).and_then(|_| stdout.flush()).context("writing to stdout")?;
        }
    }
    Ok(())
}

fn over_budget(n: usize, k: usize) -> CliError {
    CliError::Budget(format!(
        "C({n},{k}) = {} subsets exceeds the enumeration budget; use `swor sample` for a Monte Carlo estimate",
        binomial(n as u64, k as u64)
    ))
}

fn fmt_value(v: f64) -> String {
    if v.is_nan() {
        "-".into()
    } else {
        format!("{v:.6}")
    }
}

fn eval_report<S: Scalar + Display>(pop: &Population<S>, args: &EvalArgs, t: S) -> Result<String, CliError> {
    let (n, k) = (pop.len(), args.k);
    if k == 0 || k >= n {
        return Err(usage(Error::InvalidSampleSize { n, k }));
    }
    let stats = pop.stats().to_f64();
    let tf = t.as_f64();
    let mut out = String::new();
    let mode = if S::EXACT { "exact" } else { "float" };
    let _ = writeln!(
        out,
        "population: n={n} mode={mode} alpha={} a={} b={} sigma2={}",
        stats.alpha, stats.a, stats.b, stats.sigma2
    );
    let _ = writeln!(out, "k={k} t={t} delta={}", args.delta);
    let _ = writeln!(out, "{:<15} {:<6} {:<11} {:>10} {:>12}  reason", "bound", "kind", "status", "value", "raw");
    for (id, result) in evaluate_all(n as u64, k as u64, &stats, tf, args.delta) {
        let kind = match result.kind {
            swor_core::BoundKind::Upper => "upper",
            swor_core::BoundKind::Lower => "lower",
        };
        let status = if result.applicable { "applicable" } else { "n/a" };
        let reason = result.reason.map(|r| r.to_string()).unwrap_or_default();
        let _ = writeln!(
            out,
            "{:<15} {:<6} {:<11} {:>10} {:>12}  {reason}",
            id.name(),
            kind,
            status,
            fmt_value(result.value),
            fmt_value(result.raw)
        );
    }
    match exact_distribution(pop, k) {
        Ok(dist) => {
            for (strict, op) in [(true, ">"), (false, ">=")] {
                let p = dist.tail_probability(&t, strict);
                let exact = if S::EXACT { format!(" ({p})") } else { String::new() };
                let _ = writeln!(out, "exact P(X {op} t) = {}{exact}", fmt_value(p.as_f64()));
            }
        }
        Err(Error::TooLarge { .. }) => {
            for (strict, op) in [(true, ">"), (false, ">=")] {
                let est = par_mc_tail(pop, k, &t, strict, args.reps, args.seed).map_err(usage)?;
                let _ = writeln!(
                    out,
                    "monte carlo P(X {op} t) = {} ± {} (reps={}, seed={}, shards={})",
                    fmt_value(est.estimate),
                    fmt_value(est.std_error),
                    est.reps,
                    est.seed,
                    est.shards
                );
            }
        }
        Err(e) => return Err(usage(e)),
    }
    Ok(out)
}

fn cmd_eval(args: &EvalArgs) -> Result<Outcome, CliError> {
    let report = match args.population.load()? {
        AnyPopulation::Float(pop) => eval_report(&pop, args, parse_f64(&args.t).map_err(usage)?)?,
        AnyPopulation::Exact(pop) => eval_report(&pop, args, parse_rational(&args.t).map_err(usage)?)?,
    };
    emit(args.out.as_deref(), report.as_bytes())?;
    Ok(Outcome::Success)
}

fn cmd_compare(args: &CompareArgs) -> Result<Outcome, CliError> {
    let config = CompareConfig { n: args.n, alpha: args.alpha, eps: args.eps.clone(), delta: args.delta };
    let rows = compare_rows(&config).map_err(usage)?;
    let mut csv = Vec::new();
    write_csv(&mut csv, &config, &rows).map_err(usage)?;
    emit(args.out.as_deref(), &csv)?;
    if let Some(dir) = &args.svg {
        for path in write_svgs(dir, &config, &rows).map_err(usage)? {
            eprintln!("wrote {}", path.display());
        }
    }
    Ok(Outcome::Success)
}

fn dist_csv<S: Scalar + Display>(pop: &Population<S>, k: usize) -> Result<Vec<u8>, CliError> {
    let dist = exact_distribution(pop, k).map_err(|e| match e {
        Error::TooLarge { n, k } => over_budget(n, k),
        other => usage(other),
    })?;
    let mut out = Vec::new();
    write_distribution_csv(&mut out, &dist).map_err(usage)?;
    Ok(out)
}

fn cmd_dist(args: &DistArgs) -> Result<Outcome, CliError> {
    let csv = match args.population.load()? {
        AnyPopulation::Float(pop) => dist_csv(&pop, args.k)?,
        AnyPopulation::Exact(pop) => dist_csv(&pop, args.k)?,
    };
    emit(args.out.as_deref(), &csv)?;
    Ok(Outcome::Success)
}

fn sample_report<S: Scalar + Display>(pop: &Population<S>, args: &SampleArgs, t: S) -> Result<String, CliError> {
    let est = par_mc_tail(pop, args.k, &t, args.strict, args.reps, args.seed).map_err(usage)?;
    let op = if args.strict { ">" } else { ">=" };
    let mut out = String::new();
    let _ = writeln!(out, "n={} k={} t={t} tail=P(X {op} t)", pop.len(), args.k);
    let _ = writeln!(out, "estimate={}", est.estimate);
    let _ = writeln!(out, "std_error={}", est.std_error);
    let _ = writeln!(out, "reps={} seed={} shards={}", est.reps, est.seed, est.shards);
    Ok(out)
}

fn cmd_sample(args: &SampleArgs) -> Result<Outcome, CliError> {
    let report = match args.population.load()? {
        AnyPopulation::Float(pop) => sample_report(&pop, args, parse_f64(&args.t).map_err(usage)?)?,
        AnyPopulation::Exact(pop) => sample_report(&pop, args, parse_rational(&args.t).map_err(usage)?)?,
    };
    emit(args.out.as_deref(), report.as_bytes())?;
    Ok(Outcome::Success)
}

fn cmd_verify(args: &VerifyArgs) -> Result<Outcome, CliError> {
    let mut config = VerifyConfig { seed: args.seed, ..VerifyConfig::default() };
    if let Some(n) = args.n {
        config.hypergeom_max_n = n;
        config.mad_max_n = config.mad_max_n.min(n);
    }
    if let Some(reps) = args.reps {
        config.mc_reps = reps;
    }
    let report = run_suite(args.suite, &config);
    emit(args.out.as_deref(), report.render(20).as_bytes())?;
    Ok(if report.passed() { Outcome::Success } else { Outcome::PropertyFailure })
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Eval(args) => cmd_eval(args),
        Command::Compare(args) => cmd_compare(args),
        Command::Dist(args) => cmd_dist(args),
        Command::Sample(args) => cmd_sample(args),
        Command::Verify(args) => cmd_verify(args),
    }
}

/// Parses the process arguments, runs the command and maps the outcome to
/// an exit code.
pub fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(Outcome::Success) => ExitCode::SUCCESS,
        Ok(Outcome::PropertyFailure) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn cli_definition_is_consistent() {
        Cli::command().debug_assert();
    }
}
