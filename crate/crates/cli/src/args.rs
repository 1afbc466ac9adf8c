use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use funscan_core::{Method, OverlapPolicy};

#[derive(Debug, Parser)]
#[command(name = "funscan", version, about = "Spatial scan statistics for functional data")]
pub struct Cli {
    /// Worker threads; results do not depend on this value.
    #[arg(long, global = true, env = "FUNSCAN_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Scan a dataset for clusters and write a JSON report.
    Scan(ScanArgs),
    /// Run a power study on simulated data and write a CSV of metrics.
    Simulate(SimulateArgs),
    /// Time the naive and sign-matrix NPFSS routes.
    Bench(BenchArgs),
    /// Write a simulated dataset as sites and curves CSV files.
    Generate(GenerateArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodChoice {
    Pfss,
    Dffss,
    Npfss,
    All,
}

impl MethodChoice {
    pub fn methods(self) -> Vec<Method> {
        match self {
            MethodChoice::Pfss => vec![Method::Pfss],
            MethodChoice::Dffss => vec![Method::Dffss],
            MethodChoice::Npfss => vec![Method::Npfss],
            MethodChoice::All => Method::ALL.to_vec(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum OverlapChoice {
    #[default]
    None,
    Partial,
}

impl From<OverlapChoice> for OverlapPolicy {
    fn from(c: OverlapChoice) -> Self {
        match c {
            OverlapChoice::None => OverlapPolicy::None,
            OverlapChoice::Partial => OverlapPolicy::Partial,
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct ScanArgs {
    /// Sites CSV with header `id,x,y`.
    #[arg(long, env = "FUNSCAN_SITES")]
    pub sites: PathBuf,

    /// Curves CSV with header `id,t_1,...,t_T`.
    #[arg(long, env = "FUNSCAN_CURVES")]
    pub curves: PathBuf,

    #[arg(long, value_enum, default_value_t = MethodChoice::All, env = "FUNSCAN_METHOD")]
    pub method: MethodChoice,

    /// Monte Carlo relabellings.
    #[arg(long, default_value_t = 999, env = "FUNSCAN_PERMS")]
    pub perms: usize,

    #[arg(long, default_value_t = 1, env = "FUNSCAN_SEED")]
    pub seed: u64,

    /// Significance level for reporting secondary clusters.
    #[arg(long, default_value_t = 0.05, env = "FUNSCAN_LEVEL")]
    pub level: f64,

    /// Largest window as a fraction of the sites.
    #[arg(long, default_value_t = 0.5, env = "FUNSCAN_MAX_FRACTION")]
    pub max_fraction: f64,

    #[arg(long, value_enum, default_value_t = OverlapChoice::None, env = "FUNSCAN_OVERLAP")]
    pub overlap: OverlapChoice,

    /// Output file; standard output when absent.
    #[arg(long, env = "FUNSCAN_OUT")]
    pub out: Option<PathBuf>,

    /// Include per-phase wall-clock timings in the report.
    #[arg(long, env = "FUNSCAN_TIMINGS")]
    pub timings: bool,
}

/// Unset values fall back to the config file, then to the built-in defaults.
#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Flat TOML file with any of the keys below.
    #[arg(long, env = "FUNSCAN_CONFIG")]
    pub config: Option<PathBuf>,

    #[arg(long, value_enum, env = "FUNSCAN_METHOD")]
    pub method: Option<MethodChoice>,

    /// Noise distributions (gaussian, student4, chisq4).
    #[arg(long, value_delimiter = ',', env = "FUNSCAN_DISTRIBUTION")]
    pub distribution: Option<Vec<String>>,

    /// Shift shapes (delta1, delta2, delta3).
    #[arg(long, value_delimiter = ',', env = "FUNSCAN_SHIFT")]
    pub shift: Option<Vec<String>>,

    /// Shift intensities; each shape's study grid when absent.
    #[arg(long, value_delimiter = ',', env = "FUNSCAN_ALPHA")]
    pub alpha: Option<Vec<f64>>,

    #[arg(long, env = "FUNSCAN_REPLICATES")]
    pub replicates: Option<usize>,

    #[arg(long, env = "FUNSCAN_PERMS")]
    pub perms: Option<usize>,

    #[arg(long, env = "FUNSCAN_SEED")]
    pub seed: Option<u64>,

    #[arg(long, env = "FUNSCAN_LEVEL")]
    pub level: Option<f64>,

    #[arg(long, env = "FUNSCAN_MAX_FRACTION")]
    pub max_fraction: Option<f64>,

    /// Points of the equally spaced time grid on [0, 1].
    #[arg(long, env = "FUNSCAN_GRID_POINTS")]
    pub grid_points: Option<usize>,

    /// 1000 replicates and 999 relabellings per cell, unless set explicitly.
    #[arg(long, env = "FUNSCAN_FULL_SCALE")]
    pub full_scale: bool,

    #[arg(long, env = "FUNSCAN_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Time grid points of the simulated dataset.
    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,

    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,

    #[arg(long, default_value_t = 1, env = "FUNSCAN_SEED")]
    pub seed: u64,

    #[arg(long, default_value_t = 0.5, env = "FUNSCAN_MAX_FRACTION")]
    pub max_fraction: f64,

    /// Bench on this sites file instead of the simulated dataset.
    #[arg(long, requires = "curves")]
    pub sites: Option<PathBuf>,

    #[arg(long, requires = "sites")]
    pub curves: Option<PathBuf>,

    /// JSON report path; standard output when absent.
    #[arg(long, env = "FUNSCAN_OUT")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Args)]
pub struct GenerateArgs {
    #[arg(long, default_value = "gaussian")]
    pub distribution: String,

    #[arg(long, default_value = "delta1")]
    pub shift: String,

    #[arg(long, default_value_t = 0.0)]
    pub alpha: f64,

    #[arg(long, default_value_t = 1, env = "FUNSCAN_SEED")]
    pub seed: u64,

    #[arg(long, default_value_t = 0)]
    pub replicate: usize,

    #[arg(long, default_value_t = 101)]
    pub grid_points: usize,

    #[arg(long)]
    pub sites_out: PathBuf,

    #[arg(long)]
    pub curves_out: PathBuf,
}
