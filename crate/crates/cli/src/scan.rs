use anyhow::{ensure, Context, Result};
use funscan_core::report::MethodReport;
use funscan_core::{enumerate_candidates, io, Method, OverlapPolicy, Scanner};
use serde::Serialize;

use crate::args::ScanArgs;
use crate::output;
use crate::SCHEMA_VERSION;

/// Everything that determines the result. The thread count is left out on
/// purpose: it does not change the output.
#[derive(Debug, Clone, Serialize)]
pub struct ScanManifest {
    pub command: &'static str,
    pub sites: String,
    pub curves: String,
    pub methods: Vec<Method>,
    pub perms: usize,
    pub seed: u64,
    pub level: f64,
    pub max_fraction: f64,
    pub overlap: &'static str,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanOutput {
    pub schema_version: u32,
    pub manifest: ScanManifest,
    pub n_sites: usize,
    pub n_times: usize,
    pub n_windows: usize,
    pub results: Vec<MethodReport>,
}

impl ScanManifest {
    pub fn from_args(a: &ScanArgs) -> Result<Self> {
        ensure!(a.level > 0.0 && a.level < 1.0, "--level must lie in (0, 1), got {}", a.level);
        Ok(Self {
            command: "scan",
            sites: a.sites.display().to_string(),
            curves: a.curves.display().to_string(),
            methods: a.method.methods(),
            perms: a.perms,
            seed: a.seed,
            level: a.level,
            max_fraction: a.max_fraction,
            overlap: OverlapPolicy::from(a.overlap).as_str(),
        })
    }
}

/// Runs the scan and builds the report without writing it.
pub fn scan(a: &ScanArgs) -> Result<ScanOutput> {
    let manifest = ScanManifest::from_args(a)?;
    let (grid, ds) = io::load(&a.sites, &a.curves).context("cannot load the dataset")?;
    let cands = enumerate_candidates(&grid, a.max_fraction)?;
    eprintln!(
        "loaded {} sites x {} times, {} candidate windows",
        grid.n(),
        ds.t(),
        cands.len()
    );

    let mut results = Vec::with_capacity(manifest.methods.len());
    for &method in &manifest.methods {
        let result = Scanner::new(&ds, &cands, method)
            .and_then(|s| s.run(a.perms, a.seed, a.overlap.into()))
            .with_context(|| format!("{method} scan failed"))?;
        let t = &result.timings;
        eprintln!(
            "{method}: lambda = {:.6}, p = {:.4}, MLC size {}",
            result.lambda(),
            result.p_value,
            result.mlc.cluster.len()
        );
        if a.timings {
            eprintln!(
                "{method}: setup {:.1} ms, observed {:.1} ms, permutations {:.1} ms",
                t.setup.as_secs_f64() * 1e3,
                t.observed.as_secs_f64() * 1e3,
                t.permutations.as_secs_f64() * 1e3
            );
        }
        results.push(MethodReport::new(&result, &grid, Some(a.level), a.timings));
    }
    Ok(ScanOutput {
        schema_version: SCHEMA_VERSION,
        manifest,
        n_sites: grid.n(),
        n_times: ds.t(),
        n_windows: cands.len(),
        results,
    })
}

pub fn run(a: &ScanArgs) -> Result<()> {
    let report = scan(a)?;
    output::emit(a.out.as_deref(), &output::to_json(&report)?)
}
