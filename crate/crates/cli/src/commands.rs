use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use sparse_ldlt::bench::{run_bench, BenchConfig};
use sparse_ldlt::io::{
    read_matrix_market_file, read_vector_file, write_blocks, write_lower_factor,
    write_matrix_market_file, write_permutation, write_vector,
};
use sparse_ldlt::{
    factorize, fill_percentage, generate, residual, solve, Error, FactorizeOptions, FactorizeStats,
    GenSpec, StabilityConfig,
};

use crate::{Command, FactorFlags};

pub const EXIT_USAGE: u8 = 1;
pub const EXIT_IO: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::SingularMatrix { .. } => EXIT_NUMERICAL,
            Error::InvalidParameter(_) => EXIT_USAGE,
            Error::IndexOutOfRange { .. }
            | Error::Asymmetric { .. }
            | Error::DimensionMismatch { .. }
            | Error::Parse { .. }
            | Error::Io(_)
            | Error::Csv(_) => EXIT_IO,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

fn io_error(path: &Path, e: io::Error) -> CliError {
    CliError {
        code: EXIT_IO,
        message: format!("{}: {e}", path.display()),
    }
}

type CliResult = Result<(), CliError>;

pub fn run(command: Command) -> CliResult {
    match command {
        Command::Generate {
            n,
            density,
            seed,
            out,
        } => {
            let m = generate(&GenSpec::new(n, density, seed))?;
            write_matrix_market_file(&out, &m)?;
            println!("wrote {} ({}x{}, nnz {})", out.display(), n, n, m.nnz());
            Ok(())
        }
        Command::Factor {
            input,
            flags,
            prefix,
            l_out,
            b_out,
            p_out,
            stats_out,
            check,
        } => {
            let options = options(&flags)?;
            let a = read_matrix(&input)?;
            let (f, stats) = factorize(&a, &options)?;

            let prefix = prefix.unwrap_or_else(|| input.with_extension(""));
            let with_suffix = |suffix: &str| {
                let mut s = prefix.clone().into_os_string();
                s.push(suffix);
                PathBuf::from(s)
            };
            let l_path = l_out.unwrap_or_else(|| with_suffix(".L.mtx"));
            let b_path = b_out.unwrap_or_else(|| with_suffix(".B.txt"));
            let p_path = p_out.unwrap_or_else(|| with_suffix(".P.txt"));
            let stats_path = stats_out.unwrap_or_else(|| with_suffix(".stats.txt"));

            write_file(&l_path, |w| write_lower_factor(w, f.l()))?;
            write_file(&b_path, |w| write_blocks(w, f.b()))?;
            write_file(&p_path, |w| write_permutation(w, f.perm()))?;
            let summary = stats_summary(&stats, options.stability.alpha());
            write_file(&stats_path, |w| Ok(w.write_all(summary.as_bytes())?))?;

            print!("{summary}");
            if check {
                println!("fill_pct_l = {}", fill_percentage(&f));
                println!("residual_fro = {:e}", residual(&a, &f)?);
            }
            Ok(())
        }
        Command::Solve {
            matrix,
            rhs,
            flags,
            out,
            verify,
        } => {
            let options = options(&flags)?;
            let a = read_matrix(&matrix)?;
            let b = read_vector_file(&rhs).map_err(|e| with_path(&rhs, e))?;
            if b.len() != a.n() {
                return Err(Error::DimensionMismatch {
                    expected: a.n(),
                    found: b.len(),
                }
                .into());
            }
            let (f, _) = factorize(&a, &options)?;
            let x = solve(&f, &b)?;
            match out {
                Some(path) => write_file(&path, |w| write_vector(w, &x))?,
                None => write_vector(io::stdout().lock(), &x)?,
            }
            if verify {
                let ax = a.mul_vec(&x)?;
                let num: f64 = ax
                    .iter()
                    .zip(&b)
                    .map(|(p, q)| (p - q).powi(2))
                    .sum::<f64>()
                    .sqrt();
                let den: f64 = b.iter().map(|v| v * v).sum::<f64>().sqrt();
                let rel = if den == 0.0 { num } else { num / den };
                eprintln!("relative_residual = {rel:e}");
            }
            Ok(())
        }
        Command::Bench {
            n,
            density,
            instances,
            seed,
            flags,
            csv,
            timing,
            max_attempts,
        } => {
            let config = BenchConfig {
                sizes: n,
                densities: density,
                instances,
                seed,
                options: options(&flags)?,
                max_attempts,
            };
            let report = run_bench(&config)?;
            if let Some(path) = csv {
                write_file(&path, |w| report.write_csv(w, timing))?;
            }
            print!("{}", report.render_table(timing));
            Ok(())
        }
    }
}

fn options(flags: &FactorFlags) -> Result<FactorizeOptions, CliError> {
    let opts = FactorizeOptions {
        stability: StabilityConfig::new(flags.alpha)?,
        dense_switch_density: flags.dense_density,
        dense_switch_min_dim: flags.dense_min_dim,
        ..FactorizeOptions::default()
    };
    opts.validate()?;
    Ok(opts)
}

fn with_path(path: &Path, e: Error) -> CliError {
    let mut err = CliError::from(e);
    err.message = format!("{}: {}", path.display(), err.message);
    err
}

fn read_matrix(path: &Path) -> Result<sparse_ldlt::SymmetricSparseMatrix, CliError> {
    read_matrix_market_file(path).map_err(|e| with_path(path, e))
}

fn write_file<F>(path: &Path, body: F) -> CliResult
where
    F: FnOnce(&mut BufWriter<File>) -> sparse_ldlt::Result<()>,
{
    let file = File::create(path).map_err(|e| io_error(path, e))?;
    let mut w = BufWriter::new(file);
    body(&mut w).map_err(|e| with_path(path, e))?;
    w.flush().map_err(|e| io_error(path, e))
}

fn stats_summary(stats: &FactorizeStats, alpha: f64) -> String {
    let switch = stats
        .dense_switch_at
        .map(|d| d.to_string())
        .unwrap_or_else(|| "none".into());
    format!(
        "n = {}\nalpha = {}\nnnz_l = {}\npivots_1x1 = {}\npivots_2x2 = {}\nsparse_1x1 = {}\nsparse_2x2 = {}\ndense_1x1 = {}\ndense_2x2 = {}\ndense_switch_at = {}\nmax_abs_l = {}\n",
        stats.n,
        alpha,
        stats.nnz_l,
        stats.total_1x1(),
        stats.total_2x2(),
        stats.num_1x1,
        stats.num_2x2,
        stats.dense_1x1,
        stats.dense_2x2,
        switch,
        stats.max_abs_l,
    )
}
