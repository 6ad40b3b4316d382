//! CSV dump of an exact subset-sum distribution.

use std::fmt::Display;
use std::io::Write;

use swor_core::{DiscreteDistribution, Scalar};

/// Writes `# denominator=C(n,k)=…`, then `value,count,probability` rows in
/// increasing order of value. Exact distributions print fractions.
pub fn write_distribution_csv<S, W>(mut out: W, dist: &DiscreteDistribution<S>) -> Result<(), csv::Error>
where
    S: Scalar + Display,
    W: Write,
{
    writeln!(out, "# denominator=C({},{})={}", dist.n(), dist.k(), dist.denominator())?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(["value", "count", "probability"])?;
    for ((value, probability), count) in dist.atoms().zip(dist.counts()) {
        writer.write_record([value.to_string(), count.to_string(), probability.to_string()])?;
    }
    writer.flush()?;
    Ok(())
}
