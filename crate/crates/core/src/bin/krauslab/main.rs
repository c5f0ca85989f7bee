//! `krauslab`: build and check Kraus representations from JSON inputs.
//!
//! Exit codes are shared by every subcommand: 0 when all checks pass, 1 when
//! a numeric check fails, 2 when an input is missing, malformed or not a
//! valid state.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use krauslab::DEFAULT_TOL;

#[derive(Debug, Parser)]
#[command(name = "krauslab", version, about = "Kraus representations between density matrices")]
pub struct Cli {
    /// Absolute tolerance for every pass/fail check.
    #[arg(long, global = true, env = "KRAUSLAB_TOL", default_value_t = DEFAULT_TOL)]
    pub tol: f64,

    /// Output format (defaults: csv for `sweep`, json otherwise).
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,

    /// Seed for commands that draw random operators.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,

    /// Write the primary output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Diagonalise both states and conjugate the diagonal pair.
    General,
    /// Evaluate the closed-form operators from Bloch coordinates.
    ClosedForm,
    /// Replacement channel `M_jk = √q_j |v_j⟩⟨w_k|`, any dimension.
    MeasurePrepare,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check that a state file holds a valid density matrix.
    Validate { state: PathBuf },
    /// Build a Kraus set taking RHO0 to RHOT and report its residuals.
    Kraus {
        rho0: PathBuf,
        rhot: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::General)]
        method: Method,
    },
    /// Evolve a scenario to time T: reduced state, correlation operator, δρ.
    Evolve {
        scenario: PathBuf,
        #[arg(allow_negative_numbers = true)]
        t: f64,
    },
    /// Check a Kraus set against a state pair.
    Verify {
        kraus: PathBuf,
        rho0: PathBuf,
        rhot: PathBuf,
    },
    /// Tabulate reduced dynamics and Kraus residuals over a time grid.
    Sweep {
        scenario: PathBuf,
        #[arg(allow_negative_numbers = true)]
        t_start: f64,
        #[arg(allow_negative_numbers = true)]
        t_end: f64,
        steps: usize,
    },
    /// Mix a Kraus set with a unitary (Haar-random from --seed if omitted).
    Remix {
        kraus: PathBuf,
        unitary: Option<PathBuf>,
    },
    /// Test whether a joint unitary is a local product U_i ⊗ U_e.
    Factor {
        unitary: PathBuf,
        /// Subsystem dimensions as `d_i,d_e`.
        #[arg(long, value_delimiter = ',', num_args = 2, default_values_t = [2, 2])]
        dims: Vec<usize>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("krauslab: {failure}");
            ExitCode::from(failure.code())
        }
    }
}
