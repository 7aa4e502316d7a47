//! One-dimensional parameter sweeps, the reference figure presets, and CSV
//! output.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::montecarlo::{estimate_with, Metric, Workers};
use crate::params::SystemParams;
use crate::schemes::Scheme;

pub const CSV_HEADER: &str = "axis,axis_value,scheme,metric,mean,std_error,n_trials";

pub const DEFAULT_TRIALS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 42;

/// Swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    /// Transmit SNR in dB.
    RhoDb,
    /// BS to near-user distance; the relay link shrinks as `1 - d_s1`.
    DS1,
    /// Power-splitting factor.
    Delta,
}

impl Axis {
    pub fn as_str(self) -> &'static str {
        match self {
            Axis::RhoDb => "rho_db",
            Axis::DS1 => "d_s1",
            Axis::Delta => "delta",
        }
    }

    /// Grid used when a config names the axis without listing values.
    pub fn default_grid(self) -> Vec<f64> {
        match self {
            Axis::RhoDb => rho_db_grid(),
            Axis::DS1 => d_s1_grid(),
            Axis::Delta => delta_grid(false),
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Axis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rho_db" => Ok(Axis::RhoDb),
            "d_s1" => Ok(Axis::DS1),
            "delta" => Ok(Axis::Delta),
            _ => Err(Error::param(
                "axis",
                format!("unknown axis `{s}` (rho_db, d_s1, delta)"),
            )),
        }
    }
}

/// 0, 5, ..., 30 dB.
pub fn rho_db_grid() -> Vec<f64> {
    (0..=6).map(|i| 5.0 * i as f64).collect()
}

/// 0.1, 0.2, ..., 0.9.
pub fn d_s1_grid() -> Vec<f64> {
    (1..=9).map(|i| i as f64 / 10.0).collect()
}

/// Steps of 0.05 over [0.05, 0.95], or over [0, 1] when `inclusive`.
pub fn delta_grid(inclusive: bool) -> Vec<f64> {
    let (lo, hi) = if inclusive { (0, 20) } else { (1, 19) };
    (lo..=hi).map(|i| i as f64 / 20.0).collect()
}

/// A single-axis sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSpec {
    pub axis: Axis,
    pub axis_values: Vec<f64>,
    pub base_params: SystemParams,
    pub schemes: Vec<Scheme>,
    pub metrics: Vec<Metric>,
    pub n_trials: u64,
    pub seed: u64,
    /// Destination CSV; `None` means standard output.
    pub output_path: Option<String>,
}

impl Default for SweepSpec {
    fn default() -> Self {
        Self {
            axis: Axis::RhoDb,
            axis_values: rho_db_grid(),
            base_params: SystemParams::default(),
            schemes: Scheme::ALL.to_vec(),
            metrics: vec![Metric::CSum],
            n_trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
            output_path: None,
        }
    }
}

fn check_unique<T: PartialEq + Copy + fmt::Display>(name: &'static str, xs: &[T]) -> Result<()> {
    if xs.is_empty() {
        return Err(Error::param(name, "list must not be empty"));
    }
    for (i, x) in xs.iter().enumerate() {
        if xs[..i].contains(x) {
            return Err(Error::param(name, format!("`{x}` listed twice")));
        }
    }
    Ok(())
}

impl SweepSpec {
    /// Parameters at one axis point.
    pub fn params_at(&self, value: f64) -> Result<SystemParams> {
        let mut p = self.base_params.clone();
        match self.axis {
            Axis::RhoDb => {
                if !value.is_finite() {
                    return Err(Error::param(
                        "rho_db",
                        format!("must be finite, got {value}"),
                    ));
                }
                p.set_rho_db(value);
            }
            Axis::DS1 => {
                if !(value > 0.0 && value < 1.0) {
                    return Err(Error::param(
                        "d_s1",
                        format!("sweep values must lie in (0, 1), got {value}"),
                    ));
                }
                p.set_distance_s1(value);
                p.link_12.distance = 1.0 - value;
            }
            Axis::Delta => {
                if !(0.0..=1.0).contains(&value) {
                    return Err(Error::param(
                        "delta",
                        format!("must lie in [0, 1], got {value}"),
                    ));
                }
                p.delta = value;
            }
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.axis_values.is_empty() {
            return Err(Error::param("axis_values", "must not be empty"));
        }
        if self
            .axis_values
            .windows(2)
            .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(Error::param("axis_values", "must be strictly increasing"));
        }
        check_unique("schemes", &self.schemes)?;
        check_unique("metrics", &self.metrics)?;
        if self.n_trials == 0 {
            return Err(Error::param("n_trials", "must be >= 1"));
        }
        self.base_params.validate()?;
        for &v in &self.axis_values {
            self.params_at(v)?;
        }
        Ok(())
    }

    /// Number of rows a run will emit.
    pub fn row_count(&self) -> usize {
        self.axis_values.len() * self.schemes.len() * self.metrics.len()
    }
}

/// The reference experiments: three SNR sweeps of the user and sum
/// capacities, distance and power-splitting sweeps of the sum capacity, and
/// the same three sweeps for energy efficiency.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Figure {
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
}

impl Figure {
    pub const ALL: [Figure; 8] = [
        Figure::Fig3,
        Figure::Fig4,
        Figure::Fig5,
        Figure::Fig6,
        Figure::Fig7,
        Figure::Fig8,
        Figure::Fig9,
        Figure::Fig10,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Figure::Fig3 => "fig3",
            Figure::Fig4 => "fig4",
            Figure::Fig5 => "fig5",
            Figure::Fig6 => "fig6",
            Figure::Fig7 => "fig7",
            Figure::Fig8 => "fig8",
            Figure::Fig9 => "fig9",
            Figure::Fig10 => "fig10",
        }
    }
}

impl fmt::Display for Figure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Figure::ALL
            .into_iter()
            .find(|f| f.as_str() == s)
            .ok_or_else(|| Error::UnknownFigure(s.to_string()))
    }
}

/// Sweep specification of a reference figure.
pub fn figure_preset(fig: Figure) -> SweepSpec {
    figure_preset_with(fig, false)
}

/// Like [`figure_preset`]; `inclusive_delta` extends δ sweeps to the
/// endpoints 0 and 1.
pub fn figure_preset_with(fig: Figure, inclusive_delta: bool) -> SweepSpec {
    use Figure::*;
    let (axis, metric) = match fig {
        Fig3 => (Axis::RhoDb, Metric::CUe1),
        Fig4 => (Axis::RhoDb, Metric::CUe2),
        Fig5 => (Axis::RhoDb, Metric::CSum),
        Fig6 => (Axis::DS1, Metric::CSum),
        Fig7 => (Axis::Delta, Metric::CSum),
        Fig8 => (Axis::RhoDb, Metric::Ee),
        Fig9 => (Axis::DS1, Metric::Ee),
        Fig10 => (Axis::Delta, Metric::Ee),
    };
    let mut base = SystemParams::default();
    // The distance-sweep captions list the OAM modes swapped.
    if axis == Axis::DS1 {
        base.oam1.mode = 1;
        base.oam2.mode = 2;
    }
    let axis_values = match axis {
        Axis::Delta => delta_grid(inclusive_delta),
        other => other.default_grid(),
    };
    SweepSpec {
        axis,
        axis_values,
        base_params: base,
        metrics: vec![metric],
        ..SweepSpec::default()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub axis: Axis,
    pub axis_value: f64,
    pub scheme: Scheme,
    pub metric: Metric,
    pub mean: f64,
    pub std_error: f64,
    pub n_trials: u64,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<Vec<ResultRow>> {
    run_sweep_with(spec, Workers::Auto)
}

/// Runs every axis point with the sweep seed, so all points share the same
/// per-trial random streams.
pub fn run_sweep_with(spec: &SweepSpec, workers: Workers) -> Result<Vec<ResultRow>> {
    spec.validate()?;
    let mut schemes = spec.schemes.clone();
    schemes.sort();
    let mut metrics = spec.metrics.clone();
    metrics.sort();

    let run = |workers: Workers| -> Result<Vec<ResultRow>> {
        let mut rows = Vec::with_capacity(spec.row_count());
        for &value in &spec.axis_values {
            let params = spec.params_at(value)?;
            for &scheme in &schemes {
                let estimates = estimate_with(&params, scheme, spec.n_trials, spec.seed, workers)?;
                for &metric in &metrics {
                    let e = estimates
                        .iter()
                        .find(|e| e.metric == metric)
                        .expect("estimate covers every metric");
                    rows.push(ResultRow {
                        axis: spec.axis,
                        axis_value: value,
                        scheme,
                        metric,
                        mean: e.mean,
                        std_error: e.std_error,
                        n_trials: e.n_trials,
                    });
                }
            }
        }
        Ok(rows)
    };

    match workers {
        Workers::Fixed(n) if n > 1 => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| Error::param("workers", e.to_string()))?;
            pool.install(|| run(Workers::Auto))
        }
        w => run(w),
    }
}

/// Formats `x` with 9 significant digits, like C's `%.9g`.
pub fn format_sig9(x: f64) -> String {
    const DIGITS: i32 = 9;
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", (DIGITS - 1) as usize, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..DIGITS).contains(&exp) {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (DIGITS - 1 - exp) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

pub fn write_csv<W: Write>(rows: &[ResultRow], mut w: W) -> io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}",
            r.axis,
            format_sig9(r.axis_value),
            r.scheme,
            r.metric,
            format_sig9(r.mean),
            format_sig9(r.std_error),
            r.n_trials
        )?;
    }
    Ok(())
}

pub fn to_csv_string(rows: &[ResultRow]) -> String {
    let mut buf = Vec::new();
    write_csv(rows, &mut buf).expect("writing to a Vec cannot fail");
    String::from_utf8(buf).expect("CSV is ASCII")
}

pub fn write_csv_file(rows: &[ResultRow], path: &Path) -> Result<()> {
    let io_err = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io_err)?;
    }
    fs::write(path, to_csv_string(rows)).map_err(io_err)
}
