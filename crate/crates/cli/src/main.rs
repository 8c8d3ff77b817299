//! `lfmspec`: classify linear fractional self-maps of the ball and report the
//! spectra of their composition operators.
//!
//! Exit codes: 0 success, 1 error, 2 the map fails self-map validation,
//! 3 the map's class has no supported spectrum.

mod commands;
mod json;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use lfm_spectra::linalg::C64;

#[derive(Debug, Parser)]
#[command(name = "lfmspec", version, about = "Spectra of linear fractional composition operators on H^2(B_N)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Truncation degree for oracle commands (default depends on command).
    #[arg(long, global = true)]
    pub degree: Option<usize>,

    /// Iterates used by the essential-radius estimator.
    #[arg(long, global = true, default_value_t = 20)]
    pub nmax: usize,

    /// Allowed excess of the boundary modulus over 1 in self-map validation.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,

    /// Points per circle when discretizing a spectral set.
    #[arg(long, global = true, default_value_t = 64)]
    pub resolution: usize,

    /// Write the main artifact here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that the map sends the closed ball into itself.
    Validate { map: PathBuf },
    /// Fixed points, Denjoy-Wolff data and normal forms.
    Classify { map: PathBuf },
    /// Exact spectral set (`--format csv` gives a point cloud).
    Spectrum { map: PathBuf },
    /// Closed-form spectral radius next to the numerical essential-radius estimate.
    Radius { map: PathBuf },
    /// Eigenvalues of the compression to polynomials of degree <= D.
    Compress {
        map: PathBuf,
        /// Also write the compression matrix as CSV.
        #[arg(long)]
        matrix: Option<PathBuf>,
        /// Also write the JSON header describing the basis order.
        #[arg(long)]
        header: Option<PathBuf>,
    },
    /// Residuals of the closed-form eigenfunctions.
    VerifyEigen {
        map: PathBuf,
        /// Exponent `s` of `(1 - z1)^s` as `re` or `re,im`; repeatable.
        #[arg(long = "s", value_parser = parse_complex, allow_hyphen_values = true)]
        exponents: Vec<C64>,
        /// Largest monomial degree for diagonal maps.
        #[arg(long, default_value_t = 6)]
        max_degree: usize,
    },
    /// Weighted versus Sobolev norm ratios on random polynomials.
    Norms {
        map: PathBuf,
        /// Repeatable; defaults to -1, -0.5 and 0.
        #[arg(long, allow_hyphen_values = true)]
        nu: Vec<f64>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Discretized spectral set as CSV `re,im,component_index`.
    Export { map: PathBuf },
}

fn parse_complex(s: &str) -> Result<C64, String> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |p: &str| p.parse::<f64>().map_err(|e| format!("{p:?}: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected re or re,im, got {s:?}")),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::EXIT_ERROR)
        }
    }
}
