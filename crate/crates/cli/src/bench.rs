use anyhow::{ensure, Context, Result};
use funscan_core::simulate::{generate_dataset, unit_grid};
use funscan_core::timing::{compare_npfss, route_difference, SpeedReport, TimingStats, ROUTE_TOLERANCE};
use funscan_core::{
    enumerate_candidates, io, presets, FunctionalDataset, NoiseDistribution, ShiftFamily, SimulationConfig,
    SiteGrid,
};
use serde::Serialize;

use crate::args::BenchArgs;
use crate::output;
use crate::SCHEMA_VERSION;

pub const MIN_REPETITIONS: usize = 5;
const PRECHECK_SITES: usize = 10;

#[derive(Debug, Clone, Serialize)]
pub struct BenchManifest {
    pub command: &'static str,
    pub dataset: String,
    pub grid_points: usize,
    pub repetitions: usize,
    pub seed: u64,
    pub max_fraction: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Precheck {
    pub n: usize,
    pub windows: usize,
    pub max_abs_diff: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchOutput {
    pub schema_version: u32,
    pub manifest: BenchManifest,
    pub precheck: Precheck,
    pub report: SpeedReport,
}

/// Null dataset (no shift) on `grid`.
fn null_dataset(grid: &SiteGrid, points: usize, seed: u64) -> Result<FunctionalDataset> {
    let mut cfg = SimulationConfig::new(NoiseDistribution::Gaussian, ShiftFamily::Delta1, 0.0, vec![0]);
    cfg.time_grid = unit_grid(points);
    cfg.master_seed = seed;
    Ok(generate_dataset(&cfg, grid, 0)?)
}

/// Both routes must agree on a small dataset before anything is timed.
pub fn precheck(points: usize, seed: u64, max_fraction: f64) -> Result<Precheck> {
    let small = SiteGrid::new(presets::surrogate_sites().into_iter().take(PRECHECK_SITES).collect())?;
    let ds = null_dataset(&small, points, seed)?;
    let cands = enumerate_candidates(&small, max_fraction)?;
    let max_abs_diff = route_difference(&ds, &cands)?;
    ensure!(
        max_abs_diff <= ROUTE_TOLERANCE,
        "NPFSS routes disagree by {max_abs_diff:e} on the {PRECHECK_SITES}-site check"
    );
    Ok(Precheck {
        n: small.n(),
        windows: cands.len(),
        max_abs_diff,
    })
}

pub fn bench(a: &BenchArgs) -> Result<BenchOutput> {
    ensure!(
        a.repetitions >= MIN_REPETITIONS,
        "--repetitions must be at least {MIN_REPETITIONS}"
    );
    ensure!(a.grid_points >= 2, "--grid-points must be >= 2");
    let check = precheck(a.grid_points, a.seed, a.max_fraction)?;
    eprintln!(
        "precheck: n = {}, {} windows, max |fast - naive| = {:e}",
        check.n, check.windows, check.max_abs_diff
    );

    let (grid, ds, dataset) = match (&a.sites, &a.curves) {
        (Some(s), Some(c)) => {
            let (grid, ds) = io::load(s, c).context("cannot load the dataset")?;
            (grid, ds, format!("{},{}", s.display(), c.display()))
        }
        _ => {
            let grid = presets::surrogate_grid();
            let ds = null_dataset(&grid, a.grid_points, a.seed)?;
            (grid, ds, "surrogate94".to_string())
        }
    };
    let cands = enumerate_candidates(&grid, a.max_fraction)?;
    eprintln!(
        "timing n = {}, T = {}, {} windows, {} repetitions",
        ds.n(),
        ds.t(),
        cands.len(),
        a.repetitions
    );
    let report = compare_npfss(&ds, &cands, a.repetitions)?;
    print_summary(&report);
    Ok(BenchOutput {
        schema_version: SCHEMA_VERSION,
        manifest: BenchManifest {
            command: "bench",
            dataset,
            grid_points: ds.t(),
            repetitions: a.repetitions,
            seed: a.seed,
            max_fraction: a.max_fraction,
        },
        precheck: check,
        report,
    })
}

fn print_summary(r: &SpeedReport) {
    let row = |name: &str, s: &TimingStats| {
        eprintln!(
            "{name:<22} mean {:>10.4} s  sd {:>9.4} s  range [{:.4}, {:.4}] s",
            s.mean_s, s.sd_s, s.min_s, s.max_s
        )
    };
    row("naive", &r.naive);
    row("sign matrix", &r.sign_matrix);
    row("  matrix build", &r.sign_matrix_build);
    row("  window sums", &r.sign_matrix_windows);
    eprintln!("speedup {:.1}x", r.speedup);
}

pub fn run(a: &BenchArgs) -> Result<()> {
    let out = bench(a)?;
    output::emit(a.out.as_deref(), &output::to_json(&out)?)
}
