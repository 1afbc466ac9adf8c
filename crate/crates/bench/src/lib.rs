//! Shared fixtures for the criterion benches.

use funscan_core::simulate::{generate_dataset, unit_grid};
use funscan_core::{
    enumerate_candidates, presets, CandidateSet, FunctionalDataset, NoiseDistribution, ShiftFamily,
    SimulationConfig, SiteGrid,
};

pub struct Fixture {
    pub grid: SiteGrid,
    pub dataset: FunctionalDataset,
    pub candidates: CandidateSet,
}

/// Surrogate layout with `points` time points and a Δ3 shift of size `alpha`
/// on the capital cluster.
pub fn surrogate(points: usize, alpha: f64) -> Fixture {
    let grid = presets::surrogate_grid();
    let mut cfg = SimulationConfig::new(
        NoiseDistribution::Gaussian,
        ShiftFamily::Delta3,
        alpha,
        presets::capital_cluster(&grid),
    );
    cfg.time_grid = unit_grid(points);
    let dataset = generate_dataset(&cfg, &grid, 0).expect("valid config");
    let candidates = enumerate_candidates(&grid, 0.5).expect("valid fraction");
    Fixture {
        grid,
        dataset,
        candidates,
    }
}
