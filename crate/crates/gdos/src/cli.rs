//! Argument parsing.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::commands::{Command, Estimator, RunConfig};
use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "gdos", version, about = "Spectral density and spectrum slicing for symmetric definite pencils")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
    #[command(flatten)]
    pub opts: Opts,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Estimate bounds of the pencil spectrum.
    Bounds,
    /// Estimate the smoothed density of states.
    Dos,
    /// Split an interval into slices of about equal eigenvalue count.
    Slice {
        /// Slice a curve saved by `dos` instead of computing one.
        #[arg(long)]
        curve: Option<PathBuf>,
    },
    /// Compare KPM and Lanczos errors against the dense oracle.
    Compare {
        /// Step counts to compare, comma separated.
        #[arg(long, value_delimiter = ',', default_value = "20,30,40,50,60")]
        ladder: Vec<usize>,
    },
    /// Tabulate Chebyshev approximation errors of 1/x and 1/sqrt(x).
    Chebtest {
        #[arg(long, value_delimiter = ',', default_value = "6,8,10,12")]
        degrees: Vec<usize>,
        /// Fit the constant function instead (errors should vanish).
        #[arg(long)]
        constant: bool,
    },
}

#[derive(Debug, Args)]
pub struct Opts {
    #[arg(long, global = true)]
    pub matrix_a: Option<PathBuf>,
    /// Omit for the standard problem B = I.
    #[arg(long, global = true)]
    pub matrix_b: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "lanczos")]
    pub method: Estimator,
    /// Lanczos steps or KPM degree.
    #[arg(short, global = true, default_value_t = 30)]
    pub m: usize,
    /// Number of random probe vectors.
    #[arg(long, global = true, default_value_t = 50)]
    pub nvec: usize,
    /// Relative tolerance for the polynomial surrogates of B^-1 and B^-1/2.
    #[arg(long, global = true, default_value_t = 1e-3)]
    pub tau: f64,
    /// Gaussian smoothing width (default from the spectrum bounds).
    #[arg(long, global = true)]
    pub sigma: Option<f64>,
    /// Number of output grid points.
    #[arg(long, global = true, default_value_t = 1000)]
    pub grid: usize,
    #[arg(long, global = true, value_name = "LO,HI", value_parser = parse_interval, allow_hyphen_values = true)]
    pub interval: Option<(f64, f64)>,
    #[arg(long, global = true, default_value_t = 5)]
    pub slices: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads (default: all cores). Output does not depend on it.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Skip the diagonal scaling of the pencil.
    #[arg(long, global = true)]
    pub no_scale: bool,
    /// Also compute dense reference eigenvalues (n <= 2000).
    #[arg(long, global = true)]
    pub oracle: bool,
    /// Output file (default: stdout).
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub format: Format,
}

fn parse_interval(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or("expected LO,HI")?;
    let p = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("'{x}': {e}"));
    Ok((p(lo)?, p(hi)?))
}

impl Cli {
    /// The run configuration and the output path.
    pub fn into_config(self) -> (RunConfig, Option<PathBuf>) {
        let o = self.opts;
        let mut cfg = RunConfig::new(Command::Bounds);
        match self.command {
            Sub::Bounds => {}
            Sub::Dos => cfg.command = Command::Dos,
            Sub::Slice { curve } => {
                cfg.command = Command::Slice;
                cfg.curve = curve;
            }
            Sub::Compare { ladder } => {
                cfg.command = Command::Compare;
                cfg.ladder = ladder;
            }
            Sub::Chebtest { degrees, constant } => {
                cfg.command = Command::Chebtest;
                cfg.degrees = degrees;
                cfg.constant = constant;
            }
        }
        cfg.matrix_a = o.matrix_a;
        cfg.matrix_b = o.matrix_b;
        cfg.method = o.method;
        cfg.m = o.m;
        cfg.n_vec = o.nvec;
        cfg.tau = o.tau;
        cfg.sigma = o.sigma;
        cfg.grid = o.grid;
        cfg.interval = o.interval;
        cfg.slices = o.slices;
        cfg.seed = o.seed;
        cfg.threads = o.threads;
        cfg.scale = !o.no_scale;
        cfg.oracle = o.oracle;
        cfg.format = o.format;
        (cfg, o.out)
    }
}
