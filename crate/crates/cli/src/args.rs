use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use mml_core::protocols::Transmission;

use crate::output::{round_sig, Format};

#[derive(Debug, Parser)]
#[command(name = "mml", version, about = "Micro-macro entanglement sweeps")]
pub struct Cli {
    /// Starting Fock truncation (overrides the policy default).
    #[arg(long, global = true)]
    pub trunc: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// All measures at a single parameter point.
    Summary(SummaryArgs),
    /// Quadrature densities of |Psi+> and |Psi->.
    Fig2(Fig2Args),
    /// Distance D against squeezing.
    Fig3(CurveArgs),
    /// Discrimination probability P against squeezing.
    Fig4(CurveArgs),
    /// P over the (squeezing, transmission) plane.
    Fig5(Fig5Args),
    /// Heralded remote entanglement under loss.
    Remote(RemoteArgs),
    /// Every measure over a squeezing range.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// Output file, or directory for commands writing several tables.
    /// Single tables go to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,

    /// Worker threads (defaults to one per core).
    #[arg(long)]
    pub workers: Option<usize>,
}

impl Default for CommonArgs {
    fn default() -> Self {
        Self {
            out: None,
            format: Format::Csv,
            workers: None,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct SummaryArgs {
    #[arg(long, default_value_t = 1)]
    pub m: usize,

    /// Squeezing in dB.
    #[arg(long, default_value_t = 5.0, allow_negative_numbers = true)]
    pub db: f64,

    /// `bal`, `half` or a number in [0, 1].
    #[arg(long, default_value = "bal")]
    pub transmission: TransmissionArg,

    /// Use an even cat of this amplitude as input instead of squeezed light.
    #[arg(long)]
    pub alpha: Option<f64>,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig2Args {
    #[arg(long, value_delimiter = ',', default_value = "3,5,8,10")]
    pub db: Vec<f64>,

    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub m: Vec<usize>,

    /// Transmission policies; both `bal` and `half` when omitted.
    #[arg(long, value_delimiter = ',')]
    pub transmission: Vec<TransmissionArg>,

    /// Number of x points.
    #[arg(long, default_value_t = 1001)]
    pub grid: usize,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct CurveArgs {
    /// Squeezing range `start:stop:step` in dB, inclusive.
    #[arg(long, default_value = "0:12:0.25")]
    pub db_range: DbRange,

    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub m: Vec<usize>,

    /// Transmission policies; both `bal` and `half` when omitted.
    #[arg(long, value_delimiter = ',')]
    pub transmission: Vec<TransmissionArg>,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct Fig5Args {
    #[arg(long, default_value = "0:12:0.2")]
    pub db_range: DbRange,

    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub m: Vec<usize>,

    /// Number of transmissions, evenly spaced in [0.01, 0.99].
    #[arg(long, default_value_t = 61)]
    pub t_points: usize,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct RemoteArgs {
    /// TMSV parameters, applied to both sources.
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.1,0.2")]
    pub lambda: Vec<f64>,

    /// Channel transmissions, applied to both arms.
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.4,0.6,0.8,1")]
    pub eta: Vec<f64>,

    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long, default_value = "0:12:0.25")]
    pub db_range: DbRange,

    #[arg(long, value_delimiter = ',', default_value = "0,1,2,3")]
    pub m: Vec<usize>,

    #[arg(long, value_delimiter = ',', default_value = "bal")]
    pub transmission: Vec<TransmissionArg>,

    #[command(flatten)]
    pub common: CommonArgs,
}

/// Inclusive arithmetic progression of squeezing values, each rounded to
/// the output precision.
#[derive(Debug, Clone, PartialEq)]
pub struct DbRange(pub Vec<f64>);

impl FromStr for DbRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [start, stop, step] = parts.as_slice() else {
            return Err(format!("expected start:stop:step, got {s:?}"));
        };
        let num = |t: &str| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("not a finite number: {t:?}"))
        };
        let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
        if start < 0.0 || stop < start || step <= 0.0 {
            return Err("need 0 <= start <= stop and step > 0".to_string());
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize;
        Ok(DbRange(
            (0..=n)
                .map(|i| round_sig(start + i as f64 * step))
                .collect(),
        ))
    }
}

/// Command-line form of [`Transmission`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissionArg(pub Transmission);

impl TransmissionArg {
    pub const BALANCED: Self = TransmissionArg(Transmission::Balanced);
    pub const HALF: Self = TransmissionArg(Transmission::Half);
}

impl FromStr for TransmissionArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.trim() {
            "bal" | "balanced" => Ok(Self::BALANCED),
            "half" => Ok(Self::HALF),
            other => other
                .parse::<f64>()
                .ok()
                .filter(|t| (0.0..=1.0).contains(t))
                .map(|t| TransmissionArg(Transmission::Value(t)))
                .ok_or_else(|| format!("expected bal, half or a number in [0, 1], got {other:?}")),
        }
    }
}

impl fmt::Display for TransmissionArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Transmission::Balanced => f.write_str("bal"),
            Transmission::Half => f.write_str("half"),
            Transmission::Value(t) => f.write_str(&crate::output::format_sig(t)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_are_inclusive_and_rounded() {
        let r: DbRange = "0:1:0.1".parse().unwrap();
        assert_eq!(r.0.len(), 11);
        assert_eq!(r.0[3], 0.3);
        assert_eq!(r.0[10], 1.0);
        assert_eq!("0:12:0.2".parse::<DbRange>().unwrap().0.len(), 61);
        assert!("1:0:0.1".parse::<DbRange>().is_err());
        assert!("0:1:0".parse::<DbRange>().is_err());
        assert!("0:1".parse::<DbRange>().is_err());
    }

    #[test]
    fn transmission_forms() {
        assert_eq!(
            "bal".parse::<TransmissionArg>().unwrap(),
            TransmissionArg::BALANCED
        );
        assert_eq!(
            "half".parse::<TransmissionArg>().unwrap().to_string(),
            "half"
        );
        assert_eq!(
            "0.25".parse::<TransmissionArg>().unwrap().to_string(),
            "0.25"
        );
        assert!("1.5".parse::<TransmissionArg>().is_err());
    }
}
