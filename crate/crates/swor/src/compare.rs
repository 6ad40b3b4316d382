//! Side-by-side comparison of the absolute-deviation upper bound with the
//! two Bardenet–Maillard bounds on the sample average, in the worst case
//! `b - a = 2α`, `σ² = 2α²`, for every sample size `k = 1, …, n-1`.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use swor_core::bounds::{abs_dev_upper_average, bm_bernstein_upper, bm_serfling_upper};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CompareError {
    #[error("{0}")]
    Parameter(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub const HEADER: [&str; 7] =
    ["k", "eps", "bm_serfling", "bm_serfling_raw", "bm_bernstein", "bm_bernstein_raw", "abs_dev_upper"];

#[derive(Debug, Clone, PartialEq)]
pub struct CompareConfig {
    pub n: u64,
    pub alpha: f64,
    pub eps: Vec<f64>,
    pub delta: f64,
}

impl Default for CompareConfig {
    fn default() -> Self {
        Self { n: 100, alpha: 1.0, eps: vec![0.001, 0.005, 0.01], delta: 0.05 }
    }
}

impl CompareConfig {
    pub fn validate(&self) -> Result<(), CompareError> {
        let fail = |msg: String| Err(CompareError::Parameter(msg));
        if self.n < 3 {
            return fail(format!("--n must be at least 3, got {}", self.n));
        }
        if !(self.alpha > 0.0 && self.alpha.is_finite()) {
            return fail(format!("--alpha must be positive, got {}", self.alpha));
        }
        if self.eps.is_empty() {
            return fail("--eps needs at least one value".into());
        }
        if let Some(bad) = self.eps.iter().find(|e| !(**e > 0.0 && e.is_finite())) {
            return fail(format!("--eps values must be positive, got {bad}"));
        }
        if !(self.delta > 0.0 && self.delta <= 1.0) {
            return fail(format!("--delta must lie in (0, 1], got {}", self.delta));
        }
        Ok(())
    }
}

/// One sample size at one threshold. `bm_bernstein_raw` is absent where
/// the Bernstein bound does not apply (`k = n-1`), in which case
/// `bm_bernstein` holds the trivial bound 1. `abs_dev_upper` is absent
/// when `εk ≥ α`.
#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub k: u64,
    pub eps: f64,
    pub bm_serfling: f64,
    pub bm_serfling_raw: f64,
    pub bm_bernstein: f64,
    pub bm_bernstein_raw: Option<f64>,
    pub abs_dev_upper: Option<f64>,
}

pub fn compare_rows(config: &CompareConfig) -> Result<Vec<CompareRow>, CompareError> {
    config.validate()?;
    let (n, alpha) = (config.n, config.alpha);
    let (a, b, sigma2) = (-alpha, alpha, 2.0 * alpha * alpha);
    let mut rows = Vec::with_capacity(config.eps.len() * (n as usize - 1));
    for &eps in &config.eps {
        for k in 1..n {
            let serfling = bm_serfling_upper(n, k, a, b, eps);
            let bernstein = bm_bernstein_upper(n, k, a, b, sigma2, eps, config.delta);
            let ours = abs_dev_upper_average(n, k, alpha, eps);
            rows.push(CompareRow {
                k,
                eps,
                bm_serfling: serfling.value,
                bm_serfling_raw: serfling.raw,
                bm_bernstein: bernstein.applicable_value().unwrap_or(1.0),
                bm_bernstein_raw: bernstein.applicable.then_some(bernstein.raw),
                abs_dev_upper: ours.applicable_value(),
            });
        }
    }
    Ok(rows)
}

fn cell(value: Option<f64>) -> String {
    value.map(|v| v.to_string()).unwrap_or_default()
}

/// Writes the `# delta=…` comment, the fixed header, and one line per row.
pub fn write_csv<W: Write>(mut out: W, config: &CompareConfig, rows: &[CompareRow]) -> Result<(), CompareError> {
    writeln!(out, "# delta={} n={} alpha={} b-a=2alpha sigma2=2alpha^2", config.delta, config.n, config.alpha)?;
    let mut writer = csv::Writer::from_writer(out);
    writer.write_record(HEADER)?;
    for row in rows {
        writer.write_record([
            row.k.to_string(),
            row.eps.to_string(),
            row.bm_serfling.to_string(),
            row.bm_serfling_raw.to_string(),
            row.bm_bernstein.to_string(),
            cell(row.bm_bernstein_raw),
            cell(row.abs_dev_upper),
        ])?;
    }
    writer.flush()?;
    Ok(())
}

const WIDTH: f64 = 720.0;
const HEIGHT: f64 = 440.0;
const LEFT: f64 = 64.0;
const RIGHT: f64 = 176.0;
const TOP: f64 = 40.0;
const BOTTOM: f64 = 56.0;

type Series = Box<dyn Fn(&CompareRow) -> Option<f64>>;

/// A self-contained line chart of the three bounds against `k` for one
/// threshold, with linear axes and `y ∈ [0, 1]`.
pub fn render_svg(config: &CompareConfig, eps: f64, rows: &[CompareRow]) -> String {
    let rows: Vec<&CompareRow> = rows.iter().filter(|r| r.eps == eps).collect();
    let (plot_w, plot_h) = (WIDTH - LEFT - RIGHT, HEIGHT - TOP - BOTTOM);
    let k_max = (config.n - 1).max(2) as f64;
    let x = |k: u64| LEFT + (k as f64 - 1.0) / (k_max - 1.0) * plot_w;
    let y = |p: f64| TOP + (1.0 - p.clamp(0.0, 1.0)) * plot_h;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>"#);
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="22" text-anchor="middle" font-size="14">Upper bounds on P(A ≥ ε), n = {}, α = {}, ε = {eps}</text>"#,
        LEFT + plot_w / 2.0,
        config.n,
        config.alpha
    );
    for step in 0..=4 {
        let p = step as f64 / 4.0;
        let _ = writeln!(
            svg,
            r##"<line x1="{LEFT}" y1="{yy}" x2="{x2}" y2="{yy}" stroke="#dddddd"/><text x="{tx}" y="{ty}" text-anchor="end">{p}</text>"##,
            yy = y(p),
            x2 = LEFT + plot_w,
            tx = LEFT - 6.0,
            ty = y(p) + 4.0
        );
    }
    let tick = ((config.n as f64 / 10.0).ceil() as u64).max(1);
    let mut k = tick;
    while k < config.n {
        let _ = writeln!(
            svg,
            r#"<line x1="{xx}" y1="{y0}" x2="{xx}" y2="{y1}" stroke="black"/><text x="{xx}" y="{ty}" text-anchor="middle">{k}</text>"#,
            xx = x(k),
            y0 = TOP + plot_h,
            y1 = TOP + plot_h + 5.0,
            ty = TOP + plot_h + 18.0
        );
        k += tick;
    }
    let _ = writeln!(
        svg,
        r#"<rect x="{LEFT}" y="{TOP}" width="{plot_w}" height="{plot_h}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">k</text>"#,
        LEFT + plot_w / 2.0,
        HEIGHT - 16.0
    );

    let series: [(&str, &str, Series); 3] = [
        ("bm_serfling", "#1f77b4", Box::new(|r| Some(r.bm_serfling))),
        ("bm_bernstein", "#2ca02c", Box::new(|r| Some(r.bm_bernstein))),
        ("abs_dev_upper", "#d62728", Box::new(|r| r.abs_dev_upper)),
    ];
    for (index, (name, color, value)) in series.iter().enumerate() {
        let mut segment: Vec<String> = Vec::new();
        let flush = |segment: &mut Vec<String>, svg: &mut String| {
            if !segment.is_empty() {
                let _ = writeln!(
                    svg,
                    r#"<polyline fill="none" stroke="{color}" stroke-width="2" points="{}"/>"#,
                    segment.join(" ")
                );
                segment.clear();
            }
        };
        for row in &rows {
            match value(row) {
                Some(p) => segment.push(format!("{:.2},{:.2}", x(row.k), y(p))),
                None => flush(&mut segment, &mut svg),
            }
        }
        flush(&mut segment, &mut svg);
        let ly = TOP + 16.0 + 20.0 * index as f64;
        let lx = LEFT + plot_w + 12.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{lx}" y1="{ly}" x2="{}" y2="{ly}" stroke="{color}" stroke-width="2"/><text x="{}" y="{}">{name}</text>"#,
            lx + 24.0,
            lx + 30.0,
            ly + 4.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn svg_file_name(eps: f64) -> String {
    format!("compare_eps_{eps}.svg")
}

/// Writes one chart per threshold into `dir` and returns their paths.
pub fn write_svgs(dir: &Path, config: &CompareConfig, rows: &[CompareRow]) -> Result<Vec<PathBuf>, CompareError> {
    std::fs::create_dir_all(dir)?;
    config
        .eps
        .iter()
        .map(|&eps| {
            let path = dir.join(svg_file_name(eps));
            std::fs::write(&path, render_svg(config, eps, rows))?;
            Ok(path)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn row(rows: &[CompareRow], k: u64, eps: f64) -> &CompareRow {
        rows.iter().find(|r| r.k == k && r.eps == eps).unwrap()
    }

    #[test]
    fn default_grid() {
        let config = CompareConfig::default();
        let rows = compare_rows(&config).unwrap();
        assert_eq!(rows.len(), 3 * 99);
        let r = row(&rows, 50, 0.005);
        assert_abs_diff_eq!(r.bm_serfling, 0.998775, epsilon = 1e-6);
        assert_abs_diff_eq!(r.abs_dev_upper.unwrap(), 0.835017, epsilon = 1e-6);
        let r = row(&rows, 1, 0.005);
        assert_abs_diff_eq!(r.abs_dev_upper.unwrap(), 0.995075, epsilon = 1e-6);
        assert_abs_diff_eq!(r.bm_serfling, 0.9999937, epsilon = 1e-7);
        assert!(row(&rows, 99, 0.01).abs_dev_upper.is_some());
        let last = row(&rows, 99, 0.001);
        assert_eq!(last.bm_bernstein, 1.0);
        assert_eq!(last.bm_bernstein_raw, None);
        for r in &rows {
            for p in [r.bm_serfling, r.bm_bernstein].into_iter().chain(r.abs_dev_upper) {
                assert!((0.0..=1.0).contains(&p));
            }
        }
    }

    #[test]
    fn abs_dev_upper_blank_beyond_alpha() {
        let config = CompareConfig { n: 10, alpha: 1.0, eps: vec![0.25], delta: 0.05 };
        let rows = compare_rows(&config).unwrap();
        assert!(row(&rows, 3, 0.25).abs_dev_upper.is_some());
        assert!(row(&rows, 4, 0.25).abs_dev_upper.is_none());
        assert!(row(&rows, 9, 0.25).abs_dev_upper.is_none());
    }

    #[test]
    fn bernstein_raw_exceeds_one_and_is_clamped() {
        let rows = compare_rows(&CompareConfig::default()).unwrap();
        let r = row(&rows, 1, 0.001);
        assert!(r.bm_bernstein_raw.unwrap() > 1.0);
        assert_eq!(r.bm_bernstein, 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let base = CompareConfig::default();
        for config in [
            CompareConfig { n: 2, ..base.clone() },
            CompareConfig { alpha: 0.0, ..base.clone() },
            CompareConfig { eps: vec![], ..base.clone() },
            CompareConfig { eps: vec![-0.1], ..base.clone() },
            CompareConfig { delta: 0.0, ..base.clone() },
            CompareConfig { delta: 1.5, ..base.clone() },
        ] {
            assert!(matches!(compare_rows(&config), Err(CompareError::Parameter(_))), "{config:?}");
        }
    }

    #[test]
    fn csv_layout() {
        let config = CompareConfig { n: 4, alpha: 1.0, eps: vec![0.1], delta: 0.05 };
        let rows = compare_rows(&config).unwrap();
        let mut out = Vec::new();
        write_csv(&mut out, &config, &rows).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert!(lines[0].starts_with("# delta=0.05"));
        assert_eq!(lines[1], "k,eps,bm_serfling,bm_serfling_raw,bm_bernstein,bm_bernstein_raw,abs_dev_upper");
        assert_eq!(lines.len(), 2 + 3);
        assert!(lines[4].starts_with("3,0.1,"));
        assert!(lines[4].contains(",1,,"), "{}", lines[4]);
    }

    #[test]
    fn svg_is_self_contained() {
        let config = CompareConfig { n: 10, alpha: 1.0, eps: vec![0.25], delta: 0.05 };
        let rows = compare_rows(&config).unwrap();
        let svg = render_svg(&config, 0.25, &rows);
        assert!(svg.starts_with("<svg"));
        assert!(svg.trim_end().ends_with("</svg>"));
        assert_eq!(svg.matches("<polyline").count(), 3);
        assert!(!svg.contains("href"));
        assert_eq!(svg_file_name(0.005), "compare_eps_0.005.svg");
    }
}
