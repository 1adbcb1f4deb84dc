//! Fill-in and residual sweep over random instances.
//!
//! Instances are generated, factorized and measured independently (in parallel); the
//! report order is fixed by `(n, density, instance)`. Seeds are derived from the base
//! seed and the instance coordinates, so every instance can be regenerated on its own.
//! An instance whose draw turns out singular is redrawn with the next attempt number;
//! the attempt count is reported.

use std::io::Write;
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::factorize::{factorize, FactorizeOptions};
use crate::generate::{generate, GenSpec};
use crate::metrics::{fill_percentage, residual};

pub const DEFAULT_MAX_ATTEMPTS: usize = 64;

#[derive(Clone, Debug, PartialEq)]
pub struct BenchConfig {
    pub sizes: Vec<usize>,
    pub densities: Vec<f64>,
    pub instances: usize,
    pub seed: u64,
    pub options: FactorizeOptions,
    pub max_attempts: usize,
}

impl BenchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.sizes.is_empty() || self.densities.is_empty() {
            return Err(Error::InvalidParameter(
                "at least one size and one density are required".into(),
            ));
        }
        if self.instances == 0 || self.max_attempts == 0 {
            return Err(Error::InvalidParameter(
                "instances and attempts must be positive".into(),
            ));
        }
        for &n in &self.sizes {
            for &density in &self.densities {
                GenSpec::new(n, density, 0).validate()?;
            }
        }
        self.options.validate()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InstanceResult {
    pub n: usize,
    pub density: f64,
    pub instance: usize,
    /// Seed of the accepted draw.
    pub seed: u64,
    pub attempts: usize,
    pub nnz_a: usize,
    pub nnz_l: usize,
    pub fill_pct_l: f64,
    pub residual: f64,
    pub num_1x1: usize,
    pub num_2x2: usize,
    pub dense_1x1: usize,
    pub dense_2x2: usize,
    pub dense_switch_at: Option<usize>,
    pub max_abs_l: f64,
    pub wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Aggregate {
    pub n: usize,
    pub density: f64,
    pub instances: usize,
    pub mean_fill_pct_l: f64,
    pub mean_residual: f64,
    pub max_abs_l: f64,
    pub mean_wall_time_s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub instances: Vec<InstanceResult>,
    pub aggregates: Vec<Aggregate>,
}

/// Seed for attempt `attempt` of instance `instance` at `(n, density)`.
pub fn instance_seed(base: u64, n: usize, density: f64, instance: usize, attempt: usize) -> u64 {
    [n as u64, density.to_bits(), instance as u64, attempt as u64]
        .into_iter()
        .fold(splitmix64(base), |acc, x| splitmix64(acc ^ x))
}

fn splitmix64(x: u64) -> u64 {
    let mut z = x.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Generates, factorizes and measures one instance, redrawing singular matrices.
pub fn run_instance(
    config: &BenchConfig,
    n: usize,
    density: f64,
    instance: usize,
) -> Result<InstanceResult> {
    let mut last_err = None;
    for attempt in 0..config.max_attempts {
        let seed = instance_seed(config.seed, n, density, instance, attempt);
        let a = generate(&GenSpec::new(n, density, seed))?;
        let start = Instant::now();
        let outcome = factorize(&a, &config.options);
        let wall_time_s = start.elapsed().as_secs_f64();
        match outcome {
            Ok((f, stats)) => {
                return Ok(InstanceResult {
                    n,
                    density,
                    instance,
                    seed,
                    attempts: attempt + 1,
                    nnz_a: a.nnz(),
                    nnz_l: stats.nnz_l,
                    fill_pct_l: fill_percentage(&f),
                    residual: residual(&a, &f)?,
                    num_1x1: stats.num_1x1,
                    num_2x2: stats.num_2x2,
                    dense_1x1: stats.dense_1x1,
                    dense_2x2: stats.dense_2x2,
                    dense_switch_at: stats.dense_switch_at,
                    max_abs_l: stats.max_abs_l,
                    wall_time_s,
                });
            }
            Err(e @ Error::SingularMatrix { .. }) => last_err = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last_err.expect("max_attempts is positive"))
}

pub fn run_bench(config: &BenchConfig) -> Result<BenchReport> {
    config.validate()?;
    let jobs: Vec<(usize, f64, usize)> = config
        .sizes
        .iter()
        .flat_map(|&n| {
            config
                .densities
                .iter()
                .flat_map(move |&d| (0..config.instances).map(move |k| (n, d, k)))
        })
        .collect();
    let instances = jobs
        .par_iter()
        .map(|&(n, d, k)| run_instance(config, n, d, k))
        .collect::<Result<Vec<_>>>()?;

    let aggregates = instances
        .chunks(config.instances)
        .map(|group| {
            let count = group.len() as f64;
            Aggregate {
                n: group[0].n,
                density: group[0].density,
                instances: group.len(),
                mean_fill_pct_l: group.iter().map(|r| r.fill_pct_l).sum::<f64>() / count,
                mean_residual: group.iter().map(|r| r.residual).sum::<f64>() / count,
                max_abs_l: group.iter().fold(0.0, |m, r| m.max(r.max_abs_l)),
                mean_wall_time_s: group.iter().map(|r| r.wall_time_s).sum::<f64>() / count,
            }
        })
        .collect();

    Ok(BenchReport {
        config: config.clone(),
        instances,
        aggregates,
    })
}

const CSV_HEADER: [&str; 17] = [
    "kind",
    "n",
    "density",
    "instance",
    "seed",
    "attempts",
    "alpha",
    "nnz_a",
    "nnz_l",
    "fill_pct_l",
    "residual_fro",
    "num_1x1",
    "num_2x2",
    "dense_1x1",
    "dense_2x2",
    "dense_switch_at",
    "max_abs_l",
];

impl BenchReport {
    /// One row per instance followed by one `aggregate` row per `(n, density)`; the
    /// aggregate rows carry the instance count in `instance` and means in `fill_pct_l`
    /// and `residual_fro`. Wall-clock times are only written when `timing` is set,
    /// since they differ from run to run.
    pub fn write_csv<W: Write>(&self, w: W, timing: bool) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let mut header: Vec<&str> = CSV_HEADER.to_vec();
        if timing {
            header.push("wall_time_s");
        }
        out.write_record(&header)?;
        let alpha = self.config.options.stability.alpha().to_string();
        for r in &self.instances {
            let mut row = vec![
                "instance".to_string(),
                r.n.to_string(),
                r.density.to_string(),
                r.instance.to_string(),
                r.seed.to_string(),
                r.attempts.to_string(),
                alpha.clone(),
                r.nnz_a.to_string(),
                r.nnz_l.to_string(),
                r.fill_pct_l.to_string(),
                format!("{:e}", r.residual),
                r.num_1x1.to_string(),
                r.num_2x2.to_string(),
                r.dense_1x1.to_string(),
                r.dense_2x2.to_string(),
                r.dense_switch_at.map(|d| d.to_string()).unwrap_or_default(),
                r.max_abs_l.to_string(),
            ];
            if timing {
                row.push(r.wall_time_s.to_string());
            }
            out.write_record(&row)?;
        }
        for g in &self.aggregates {
            let mut row = vec![
                "aggregate".to_string(),
                g.n.to_string(),
                g.density.to_string(),
                g.instances.to_string(),
                String::new(),
                String::new(),
                alpha.clone(),
                String::new(),
                String::new(),
                g.mean_fill_pct_l.to_string(),
                format!("{:e}", g.mean_residual),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                String::new(),
                g.max_abs_l.to_string(),
            ];
            if timing {
                row.push(g.mean_wall_time_s.to_string());
            }
            out.write_record(&row)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Aligned summary table, one line per `(n, density)`.
    pub fn render_table(&self, timing: bool) -> String {
        let mut s = String::new();
        s.push_str(&format!(
            "# alpha = {}; residual = Frobenius norm of P^T A P - L B L^T; fill = 100 nnz(L) / n^2 (unit diagonal counted)\n",
            self.config.options.stability.alpha()
        ));
        s.push_str("# instances: uniform symmetric pattern (diagonal included in density), values uniform in [-1, 1]\n");
        s.push_str(&format!(
            "{:>6} {:>8} {:>6} {:>12} {:>14} {:>10}",
            "n", "density", "inst", "fill_pct_L", "residual", "max|L|"
        ));
        if timing {
            s.push_str(&format!(" {:>10}", "time_s"));
        }
        s.push('\n');
        for g in &self.aggregates {
            s.push_str(&format!(
                "{:>6} {:>8.3} {:>6} {:>12.2} {:>14.3e} {:>10.3}",
                g.n, g.density, g.instances, g.mean_fill_pct_l, g.mean_residual, g.max_abs_l
            ));
            if timing {
                s.push_str(&format!(" {:>10.4}", g.mean_wall_time_s));
            }
            s.push('\n');
        }
        s
    }
}
