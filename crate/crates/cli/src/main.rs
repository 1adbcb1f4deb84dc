use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;

use commands::CliError;

/// Sparse symmetric indefinite LDLᵀ factorization.
#[derive(Parser, Debug)]
#[command(name = "sldlt", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct FactorFlags {
    /// Stability threshold α in (0, 0.5]; |L_ij| ≤ 1/α.
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    /// Off-diagonal density of the remaining matrix at which the dense phase starts.
    #[arg(long, default_value_t = 1.0)]
    dense_density: f64,
    /// Start the dense phase once at most this many columns remain.
    #[arg(long, default_value_t = 0)]
    dense_min_dim: usize,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Write a random sparse symmetric matrix in Matrix Market format.
    Generate {
        #[arg(long)]
        n: usize,
        /// Fraction of nonzeros in the full matrix, diagonal included.
        #[arg(long)]
        density: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, short)]
        out: PathBuf,
    },
    /// Factorize a Matrix Market file and write P, L and B.
    Factor {
        input: PathBuf,
        #[command(flatten)]
        flags: FactorFlags,
        /// Prefix for output files (default: input path without extension).
        #[arg(long)]
        prefix: Option<PathBuf>,
        /// Output path for L (default: <prefix>.L.mtx).
        #[arg(long = "l-out")]
        l_out: Option<PathBuf>,
        /// Output path for the block diagonal (default: <prefix>.B.txt).
        #[arg(long = "b-out")]
        b_out: Option<PathBuf>,
        /// Output path for the permutation (default: <prefix>.P.txt).
        #[arg(long = "p-out")]
        p_out: Option<PathBuf>,
        /// Output path for the statistics summary (default: <prefix>.stats.txt).
        #[arg(long = "stats-out")]
        stats_out: Option<PathBuf>,
        /// Print the fill percentage and the residual ‖PᵀAP − LBLᵀ‖_F.
        #[arg(long)]
        check: bool,
    },
    /// Solve A x = b.
    Solve {
        matrix: PathBuf,
        /// Right-hand side, one value per line.
        rhs: PathBuf,
        #[command(flatten)]
        flags: FactorFlags,
        /// Output path for x (default: stdout).
        #[arg(long, short)]
        out: Option<PathBuf>,
        /// Print ‖Ax − b‖₂ / ‖b‖₂.
        #[arg(long)]
        verify: bool,
    },
    /// Run the fill-in and residual sweep over random instances.
    Bench {
        /// Comma-separated dimensions.
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<usize>,
        /// Comma-separated densities.
        #[arg(long, value_delimiter = ',', required = true)]
        density: Vec<f64>,
        #[arg(long, default_value_t = 20)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        flags: FactorFlags,
        /// Write the per-instance CSV report here.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Include wall-clock times (makes the CSV run-dependent).
        #[arg(long)]
        timing: bool,
        /// Redraws allowed for an instance that turns out singular.
        #[arg(long, default_value_t = sparse_ldlt::bench::DEFAULT_MAX_ATTEMPTS)]
        max_attempts: usize,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError { code, message }) => {
            eprintln!("error: {message}");
            ExitCode::from(code)
        }
    }
}
