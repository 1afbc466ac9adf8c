use anyhow::Result;
use funscan_core::simulate::{generate_dataset, unit_grid};
use funscan_core::{io, presets, NoiseDistribution, ShiftFamily, SimulationConfig};

use crate::args::GenerateArgs;
use crate::output;

/// Writes one simulated replicate on the surrogate layout, with the shift on
/// the capital cluster.
pub fn run(a: &GenerateArgs) -> Result<()> {
    let distribution: NoiseDistribution = a.distribution.parse()?;
    let shift: ShiftFamily = a.shift.parse()?;
    let grid = presets::surrogate_grid();
    let mut cfg = SimulationConfig::new(distribution, shift, a.alpha, presets::capital_cluster(&grid));
    cfg.time_grid = unit_grid(a.grid_points);
    cfg.master_seed = a.seed;
    let ds = generate_dataset(&cfg, &grid, a.replicate)?;

    let mut sites = Vec::new();
    io::write_sites(&mut sites, &grid)?;
    let mut curves = Vec::new();
    io::write_curves(&mut curves, &ds)?;
    output::write_atomic(&a.sites_out, &sites)?;
    output::write_atomic(&a.curves_out, &curves)?;
    eprintln!(
        "wrote {} sites and {} x {} curves",
        grid.n(),
        ds.n(),
        ds.t()
    );
    Ok(())
}
