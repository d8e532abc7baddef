//! `opspec`: spectra, variational bounds and certificates for self-adjoint
//! operator families from the command line.
//!
//! Exit codes: 0 success, 1 a verified check did not pass, 2 bad input.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::CliError;

#[derive(Debug, Parser)]
#[command(name = "opspec", version, about = "Spectral analysis of self-adjoint operator functions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by every report-producing command.
#[derive(Debug, Clone, Args)]
pub struct Common {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Seed for every random draw; OPSPEC_SEED takes precedence.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Eigenvalues of a family on an interval.
    Spectrum {
        /// Family file, or demo:NAME.
        family: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Vec<f64>,
        /// Relative bisection width.
        #[arg(long, default_value_t = opspec_core::spectra::BISECT_REL)]
        tol: f64,
        #[command(flatten)]
        common: Common,
    },
    /// n-th eigenvalue above gamma: witness value and sampled lower bound.
    Bounds {
        family: String,
        #[arg(long, allow_negative_numbers = true)]
        gamma: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Resolvent certificate for mu2 from a subspace at mu1.
    Certify {
        family: String,
        #[arg(long, allow_negative_numbers = true)]
        mu1: f64,
        #[arg(long, allow_negative_numbers = true)]
        mu2: f64,
        /// Fix eps instead of searching; requires --delta.
        #[arg(long, requires = "delta")]
        eps: Option<f64>,
        #[arg(long, requires = "eps")]
        delta: Option<f64>,
        #[arg(long, default_value_t = opspec_core::spectra::VM_GRID)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Spectral gap of A that survives the non-negative perturbation B.
    Perturb {
        /// Matrix file for A, or demo:perturb-a.
        a: String,
        /// Matrix file for B, or demo:perturb-b.
        b: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        /// Relative-bound parameters b to try.
        #[arg(long, value_delimiter = ',', default_values_t = opspec_core::perturb::DEFAULT_B_GRID)]
        b_grid: Vec<f64>,
        /// Skip the golden-section refinement over b.
        #[arg(long)]
        no_refine: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Three-way decomposition attached to [alpha, beta].
    Decompose {
        family: String,
        #[arg(long, allow_negative_numbers = true)]
        alpha: f64,
        #[arg(long, allow_negative_numbers = true)]
        beta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Uniform slope condition on an interval.
    Vm {
        family: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Vec<f64>,
        #[arg(long)]
        eps: f64,
        #[arg(long)]
        delta: f64,
        #[arg(long, default_value_t = opspec_core::spectra::VM_GRID)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sorted eigenvalues of T(lambda) on a grid, as CSV and/or SVG.
    Curves {
        family: String,
        #[arg(long, num_args = 2, value_names = ["A", "B"], allow_negative_numbers = true)]
        interval: Vec<f64>,
        #[arg(long, default_value_t = 201)]
        grid: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[command(flatten)]
        common: Common,
    },
    /// Sample-based check that every form crosses zero at most once, downward.
    Validate {
        family: String,
        #[arg(long, default_value_t = 256)]
        samples: usize,
        #[arg(long, default_value_t = 1024)]
        grid: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Built-in demo families.
    Demo {
        #[command(subcommand)]
        action: DemoAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum DemoAction {
    /// Print the demo names.
    List,
    /// Write a demo family file.
    Export {
        name: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("opspec: {e}");
            ExitCode::from(match e {
                CliError::Input(_) => 2,
                CliError::Output(_) => 1,
            })
        }
    }
}
