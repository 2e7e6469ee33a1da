use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use cp_phase::numerics::c;
use cp_phase::Complex64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Total, dynamical and geometric phase at time t.
    Phase,
    /// Detector intensity over a uniform sweep of the phase shift chi.
    Interfere,
    /// Numerical phases of the damped oscillator next to the closed forms.
    Oscillator,
    /// Distance between repeated measurements and the master equation versus dt.
    Converge,
    /// Area enclosed by the oscillator amplitude spiral and its ratio to the geometric phase.
    Area,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(
    name = "cp-phase",
    version,
    about = "Phases of open quantum systems under continuous measurement",
    allow_negative_numbers = true
)]
pub struct Args {
    pub command: Command,

    /// Model file (JSON); the damped-oscillator preset is used when absent.
    #[arg(long, value_name = "PATH")]
    pub model: Option<PathBuf>,

    /// Initial density matrix as a flat row-major JSON list of [re, im];
    /// defaults to |0><0| for model files and to |alpha> for the preset.
    #[arg(long, value_name = "PATH")]
    pub state: Option<PathBuf>,

    /// Coherent amplitude of the preset.
    #[arg(long, value_name = "RE,IM", value_parser = parse_complex, default_value = "1,0", allow_hyphen_values = true)]
    pub alpha: Complex64,

    /// Oscillator frequency of the preset.
    #[arg(long, value_name = "W", default_value_t = 1.0)]
    pub omega: f64,

    /// Damping rate of the preset.
    #[arg(long, value_name = "K", default_value_t = 0.1)]
    pub k: f64,

    /// Fock cutoff of the preset; chosen from alpha when absent.
    #[arg(long, value_name = "N")]
    pub cutoff: Option<usize>,

    /// Final time [default: pi/2, or 1 for converge].
    #[arg(long, value_name = "T")]
    pub t: Option<f64>,

    /// Integration step; converge takes a comma-separated list
    /// [default: 1e-3, or 1e-2,5e-3,2.5e-3 for converge].
    #[arg(long, value_name = "DT", value_parser = parse_list)]
    pub dt: Option<StepList>,

    /// Number of chi values in [0, 2pi) for interfere.
    #[arg(long, value_name = "N", default_value_t = 64)]
    pub chi_points: usize,

    /// Spiral samples for area.
    #[arg(long, value_name = "N", default_value_t = 10_000)]
    pub samples: usize,

    /// Output file; standard output when absent.
    #[arg(long, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Output encoding [default: csv for interfere and converge, json otherwise].
    #[arg(long, value_enum)]
    pub format: Option<Format>,
}

impl Args {
    pub fn time(&self) -> f64 {
        self.t.unwrap_or(match self.command {
            Command::Converge => 1.0,
            _ => std::f64::consts::FRAC_PI_2,
        })
    }

    pub fn steps(&self) -> Vec<f64> {
        self.dt.clone().map(|l| l.0).unwrap_or_else(|| match self.command {
            Command::Converge => vec![1e-2, 5e-3, 2.5e-3],
            _ => vec![1e-3],
        })
    }

    pub fn output_format(&self) -> Format {
        self.format.unwrap_or(match self.command {
            Command::Interfere | Command::Converge => Format::Csv,
            _ => Format::Json,
        })
    }
}

fn parse_f64(s: &str) -> Result<f64, String> {
    let x: f64 = s.trim().parse().map_err(|_| format!("`{s}` is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("`{s}` is not finite"))
    }
}

fn parse_complex(s: &str) -> Result<Complex64, String> {
    match s.split_once(',') {
        Some((re, im)) => Ok(c(parse_f64(re)?, parse_f64(im)?)),
        None => Ok(c(parse_f64(s)?, 0.0)),
    }
}

/// Comma-separated step sizes.
#[derive(Debug, Clone, PartialEq)]
pub struct StepList(pub Vec<f64>);

fn parse_list(s: &str) -> Result<StepList, String> {
    s.split(',').map(parse_f64).collect::<Result<_, _>>().map(StepList)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_values() {
        assert_eq!(parse_complex("1,-0.5").unwrap(), c(1.0, -0.5));
        assert_eq!(parse_complex("2").unwrap(), c(2.0, 0.0));
        assert!(parse_complex("1,x").is_err());
        assert!(parse_complex("nan").is_err());
    }

    #[test]
    fn step_lists() {
        assert_eq!(parse_list("1e-2, 5e-3").unwrap().0, vec![1e-2, 5e-3]);
        assert!(parse_list("").is_err());
    }

    #[test]
    fn per_command_defaults() {
        let a = Args::try_parse_from(["cp-phase", "converge"]).unwrap();
        assert_eq!(a.time(), 1.0);
        assert_eq!(a.steps().len(), 3);
        assert_eq!(a.output_format(), Format::Csv);
        let a = Args::try_parse_from(["cp-phase", "phase", "--alpha", "0.5,1"]).unwrap();
        assert_eq!(a.alpha, c(0.5, 1.0));
        assert_eq!(a.output_format(), Format::Json);
    }
}
