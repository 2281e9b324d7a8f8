//! Command-line surface and the validated run configuration it produces.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;

use qnd_core::{GridPolicy, OutcomeGrid, Resolution};

use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "qnd", version, about = "Finite-resolution QND measurement simulator", long_about = None)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outcome density and post-measurement coherence of a photon-number
    /// measurement on a coherent state.
    PhotonNumber(PhotonNumberArgs),
    /// Outcome density and one-photon jump density of a quadrature
    /// measurement on the vacuum.
    Quadrature(QuadratureArgs),
    /// Quantization–coherence correlation over a range of resolutions.
    SweepCorrelation(SweepArgs),
    /// Two-mode meter simulation checked against the measurement operator.
    MeterCheck(MeterArgs),
    /// Completeness and closed-form agreement of the measurement operators.
    PovmCheck(PovmArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    /// Output file; standard output when omitted.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct PhotonNumberArgs {
    /// Coherent amplitude, `re` or `re+imj`.
    #[arg(long, default_value = "3", value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub delta_n: f64,
    /// Fock-space truncation.
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    /// Outcome axis `lo:hi:step`; covers the distribution when omitted.
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub grid: Option<Range>,
    /// Integration tolerance setting grid margins and steps.
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct QuadratureArgs {
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub delta_x: f64,
    #[arg(long, default_value_t = 128)]
    pub dim: usize,
    #[arg(long, value_parser = parse_range, allow_hyphen_values = true)]
    pub grid: Option<Range>,
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "3", value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    /// Resolutions `lo:hi:step`, or a single value.
    #[arg(long, default_value = "0.05:1.0:0.01", value_parser = parse_range, allow_hyphen_values = true)]
    pub delta_n: Range,
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct MeterArgs {
    #[arg(long, default_value = "3", value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub delta_n: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub delta_x: f64,
    /// Signal truncation for the photon-number coupling.
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    /// Initial meter truncation; raised when the pointer shift needs more levels.
    #[arg(long, default_value_t = qnd_core::meter::DEFAULT_METER_DIM)]
    pub meter_dim: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct PovmArgs {
    #[arg(long, default_value = "3", value_parser = parse_complex, allow_hyphen_values = true)]
    pub alpha: Complex64,
    #[arg(long, default_value_t = 0.3, allow_negative_numbers = true)]
    pub delta_n: f64,
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub delta_x: f64,
    /// Truncation of the photon-number checks.
    #[arg(long, default_value_t = 64)]
    pub dim: usize,
    #[arg(long, allow_negative_numbers = true)]
    pub tolerance: Option<f64>,
    #[command(flatten)]
    pub output: OutputArgs,
}

/// `lo:hi:step`, inclusive of `hi` up to rounding. A bare number is a
/// one-point range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Range {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

impl Range {
    pub fn values(&self) -> Vec<f64> {
        if self.hi == self.lo {
            return vec![self.lo];
        }
        let n = ((self.hi - self.lo) / self.step * (1.0 + 1e-9)).floor() as usize + 1;
        (0..n).map(|k| self.lo + k as f64 * self.step).collect()
    }

    pub fn to_grid(self) -> Result<OutcomeGrid<f64>, CliError> {
        OutcomeGrid::new(self.lo, self.hi, self.step).map_err(|e| CliError::InvalidParameter(format!("--grid: {e}")))
    }
}

pub fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| format!("`{t}` is not a number"));
    let range = match parts.as_slice() {
        [v] => {
            let v = num(v)?;
            Range { lo: v, hi: v, step: 1.0 }
        }
        [lo, hi, step] => Range { lo: num(lo)?, hi: num(hi)?, step: num(step)? },
        _ => return Err(format!("expected lo:hi:step, got `{s}`")),
    };
    if !(range.lo.is_finite() && range.hi.is_finite() && range.step.is_finite()) {
        return Err("range bounds must be finite".into());
    }
    if range.hi < range.lo || range.step <= 0.0 {
        return Err(format!("range {s} needs lo <= hi and step > 0"));
    }
    if (range.hi - range.lo) / range.step > 1e7 {
        return Err(format!("range {s} has more than 10^7 points"));
    }
    Ok(range)
}

/// `re`, `re+imj`, `re-imj`, `imj` or `+imj`; `i` is accepted for `j`.
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let bad = || format!("`{s}` is not a complex number of the form re[+imj]");
    if t.is_empty() {
        return Err(bad());
    }
    let value = if let Some(body) = t.strip_suffix('j').or_else(|| t.strip_suffix('i')) {
        // split at the last sign that is not part of an exponent
        let split = body
            .char_indices()
            .skip(1)
            .filter(|&(k, c)| (c == '+' || c == '-') && !matches!(body.as_bytes()[k - 1], b'e' | b'E'))
            .map(|(k, _)| k)
            .last();
        let imag = |u: &str| match u {
            "" | "+" => Ok(1.0),
            "-" => Ok(-1.0),
            u => u.parse::<f64>().map_err(|_| bad()),
        };
        match split {
            Some(k) => Complex64::new(body[..k].parse().map_err(|_| bad())?, imag(&body[k..])?),
            None => Complex64::new(0.0, imag(body)?),
        }
    } else {
        Complex64::new(t.parse().map_err(|_| bad())?, 0.0)
    };
    if !(value.re.is_finite() && value.im.is_finite()) {
        return Err(bad());
    }
    Ok(value)
}

pub fn resolution(name: &str, value: f64) -> Result<Resolution<f64>, CliError> {
    Resolution::new(value)
        .map_err(|_| CliError::InvalidParameter(format!("{name} must be positive and finite, got {value}")))
}

pub fn policy(tolerance: Option<f64>) -> Result<GridPolicy, CliError> {
    match tolerance {
        None => Ok(GridPolicy::Standard),
        Some(t) => GridPolicy::tolerance(t).map_err(|e| CliError::InvalidParameter(format!("--tolerance: {e}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_forms() {
        assert_eq!(parse_complex("3").unwrap(), Complex64::new(3.0, 0.0));
        assert_eq!(parse_complex("-1.5").unwrap(), Complex64::new(-1.5, 0.0));
        assert_eq!(parse_complex("1+2j").unwrap(), Complex64::new(1.0, 2.0));
        assert_eq!(parse_complex("1-2j").unwrap(), Complex64::new(1.0, -2.0));
        assert_eq!(parse_complex("-1-2.5i").unwrap(), Complex64::new(-1.0, -2.5));
        assert_eq!(parse_complex("2j").unwrap(), Complex64::new(0.0, 2.0));
        assert_eq!(parse_complex("-j").unwrap(), Complex64::new(0.0, -1.0));
        assert_eq!(parse_complex("1e-3+2e+1j").unwrap(), Complex64::new(1e-3, 20.0));
        for bad in ["", "j3", "1+", "abc", "1+2k", "nan", "inf"] {
            assert!(parse_complex(bad).is_err(), "{bad}");
        }
    }

    #[test]
    fn range_forms() {
        let r = parse_range("0.05:1.0:0.01").unwrap();
        let v = r.values();
        assert_eq!(v.len(), 96);
        assert!((v[95] - 1.0).abs() < 1e-12);
        assert_eq!(parse_range("0.3").unwrap().values(), vec![0.3]);
        assert_eq!(parse_range("-2:2:1").unwrap().values(), vec![-2.0, -1.0, 0.0, 1.0, 2.0]);
        for bad in ["1:0:0.1", "0:1:0", "0:1", "a:b:c", "0:1:-1"] {
            assert!(parse_range(bad).is_err(), "{bad}");
        }
    }
}
