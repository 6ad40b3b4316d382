//! Population files and numeric literals.
//!
//! Two layouts are accepted: plain text with one entry per line (blank
//! lines and `#` comments are skipped), or a JSON array of numbers and
//! strings. Entries are decimals or `p/q` fractions. A single fraction
//! anywhere, or an explicit request, makes the whole population exact;
//! decimals are then read as the exact rationals they spell.

use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::Zero;
use swor_core::{Population, Rational};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum FormatError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("invalid JSON population: {0}")]
    Json(#[from] serde_json::Error),
    #[error("JSON population must be an array of numbers or strings")]
    JsonShape,
    #[error("entry {index}: cannot parse {text:?} as a number")]
    Entry { index: usize, text: String },
    #[error("invalid number {0:?}")]
    Number(String),
    #[error(transparent)]
    Population(#[from] swor_core::Error),
}

/// A population in whichever numeric mode its source called for.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyPopulation {
    Float(Population<f64>),
    Exact(Population<Rational>),
}

impl AnyPopulation {
    pub fn len(&self) -> usize {
        match self {
            AnyPopulation::Float(p) => p.len(),
            AnyPopulation::Exact(p) => p.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, AnyPopulation::Exact(_))
    }

    pub fn to_f64_values(&self) -> Vec<f64> {
        match self {
            AnyPopulation::Float(p) => p.to_f64_values(),
            AnyPopulation::Exact(p) => p.to_f64_values(),
        }
    }
}

/// How to turn entries into a population.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ReadOptions {
    /// Read every entry exactly even without fractions.
    pub rational: bool,
    /// Subtract the mean instead of requiring a zero sum.
    pub center: bool,
}

fn is_fraction(text: &str) -> bool {
    text.contains('/')
}

/// Parses a decimal (`-1.25`, `3e-2`, `.5`) or a fraction (`-7/3`) exactly.
pub fn parse_rational(text: &str) -> Result<Rational, FormatError> {
    let text = text.trim();
    let bad = || FormatError::Number(text.to_string());
    if let Some((num, den)) = text.split_once('/') {
        let num = parse_rational(num)?;
        let den = parse_rational(den)?;
        if den.is_zero() {
            return Err(bad());
        }
        return Ok(num / den);
    }
    let (body, exponent) = match text.find(['e', 'E']) {
        Some(pos) => (&text[..pos], text[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (text, 0),
    };
    let (negative, body) = match body.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, body.strip_prefix('+').unwrap_or(body)),
    };
    let (int_part, frac_part) = body.split_once('.').unwrap_or((body, ""));
    let digits_ok = |s: &str| s.bytes().all(|b| b.is_ascii_digit());
    if int_part.is_empty() && frac_part.is_empty() || !digits_ok(int_part) || !digits_ok(frac_part) {
        return Err(bad());
    }
    let digits = format!("{int_part}{frac_part}");
    let mantissa = BigInt::from_str(&digits).map_err(|_| bad())?;
    let shift = exponent - frac_part.len() as i32;
    let ten = BigInt::from(10u8);
    let mut value = if shift >= 0 {
        Rational::from_integer(mantissa * num_traits::pow(ten, shift as usize))
    } else {
        Rational::new(mantissa, num_traits::pow(ten, shift.unsigned_abs() as usize))
    };
    if negative {
        value = -value;
    }
    Ok(value)
}

/// Parses a decimal or a fraction as `f64`.
pub fn parse_f64(text: &str) -> Result<f64, FormatError> {
    let text = text.trim();
    if is_fraction(text) {
        return Ok(swor_core::Scalar::as_f64(&parse_rational(text)?));
    }
    match text.parse::<f64>() {
        Ok(v) if v.is_finite() => Ok(v),
        _ => Err(FormatError::Number(text.to_string())),
    }
}

fn entries_from_json(text: &str) -> Result<Vec<String>, FormatError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let items = value.as_array().ok_or(FormatError::JsonShape)?;
    items
        .iter()
        .map(|item| match item {
            serde_json::Value::Number(n) => Ok(n.to_string()),
            serde_json::Value::String(s) => Ok(s.clone()),
            _ => Err(FormatError::JsonShape),
        })
        .collect()
}

fn entries_from_lines(text: &str) -> Vec<String> {
    text.lines()
        .map(|line| line.split('#').next().unwrap_or("").trim())
        .filter(|line| !line.is_empty())
        .map(str::to_string)
        .collect()
}

/// Builds a population from the raw entries.
pub fn population_from_entries(entries: &[String], options: ReadOptions) -> Result<AnyPopulation, FormatError> {
    let entry_error = |index: usize, text: &str| FormatError::Entry { index: index + 1, text: text.to_string() };
    if options.rational || entries.iter().any(|e| is_fraction(e)) {
        let values = entries
            .iter()
            .enumerate()
            .map(|(i, e)| parse_rational(e).map_err(|_| entry_error(i, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let pop = if options.center { Population::centered(values)? } else { Population::new(values)? };
        Ok(AnyPopulation::Exact(pop))
    } else {
        let values = entries
            .iter()
            .enumerate()
            .map(|(i, e)| parse_f64(e).map_err(|_| entry_error(i, e)))
            .collect::<Result<Vec<_>, _>>()?;
        let pop = if options.center { Population::centered(values)? } else { Population::new(values)? };
        Ok(AnyPopulation::Float(pop))
    }
}

/// Parses file contents; JSON is recognized by a leading `[` or `{`.
pub fn parse_population(text: &str, options: ReadOptions) -> Result<AnyPopulation, FormatError> {
    let is_json = text.trim_start().starts_with(['[', '{']);
    let entries = if is_json { entries_from_json(text)? } else { entries_from_lines(text) };
    population_from_entries(&entries, options)
}

pub fn read_population(path: &Path, options: ReadOptions) -> Result<AnyPopulation, FormatError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| FormatError::Io { path: path.display().to_string(), source })?;
    parse_population(&text, options)
}
