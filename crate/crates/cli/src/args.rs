use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "wright-poisson",
    version,
    about = "Wright-type Poisson distribution: pmf tables, moments, MGF, sampling, fitting and self-checks"
)]
pub struct Cli {
    /// Relative tolerance for series truncation
    #[arg(long, global = true, env = "WRIGHT_POISSON_REL_TOL", default_value_t = 1e-15)]
    pub rel_tol: f64,

    /// Hard cap on series terms
    #[arg(long, global = true, default_value_t = 10_000)]
    pub max_terms: usize,

    #[arg(long, global = true, value_enum, default_value_t = Format::Table)]
    pub format: Format,

    /// Write output to this file instead of standard output
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, Args)]
pub struct Params {
    #[arg(long, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, allow_negative_numbers = true)]
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitMode {
    MOnly,
    Full,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Tabulate pmf and cdf for r = 0..=r_max
    Pmf {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 10)]
        r_max: u64,
    },
    /// Mean and second raw moment by every method, with their spread
    Moments {
        #[command(flatten)]
        params: Params,
    },
    /// Moment generating function at the given points
    Mgf {
        #[command(flatten)]
        params: Params,
        /// Points t, comma separated or repeated
        #[arg(long = "t", allow_hyphen_values = true, value_delimiter = ',', default_value = "0")]
        t: Vec<f64>,
    },
    /// Draw a seeded random sample
    Sample {
        #[command(flatten)]
        params: Params,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Maximum-likelihood fit to a file of counts
    Fit {
        /// Plain text with one count per line, or CSV/TSV with a header
        path: PathBuf,
        /// Column name, or 0-based column index
        #[arg(long)]
        column: Option<String>,
        #[arg(long, value_enum, default_value_t = FitMode::Full)]
        mode: FitMode,
        /// Fixed alpha for m-only fits
        #[arg(long)]
        alpha: Option<f64>,
        /// Fixed beta for m-only fits
        #[arg(long)]
        beta: Option<f64>,
        /// Lower edge of the (alpha, beta) search box for full fits
        #[arg(long, default_value_t = 0.1)]
        shape_min: f64,
        /// Upper edge of the (alpha, beta) search box for full fits
        #[arg(long, default_value_t = 10.0)]
        shape_max: f64,
    },
    /// Run the invariant suite over a parameter grid
    Check {
        /// alpha and beta range over 0.5, 1.0, ..., 0.5 * grid_size
        #[arg(long, default_value_t = 6)]
        grid_size: usize,
        /// Override every check's own tolerance
        #[arg(long)]
        tolerance: Option<f64>,
    },
}
