//! Spatial scan statistics for functional data.
//!
//! Each site carries one curve observed on a common time grid. The library
//! searches circular windows of sites for a group whose curves differ from the
//! rest, using one of three concentration indices:
//!
//! * [`Method::Pfss`]: functional ANOVA F statistic,
//! * [`Method::Dffss`]: maximum over time of a studentised mean difference,
//! * [`Method::Npfss`]: functional Wilcoxon–Mann–Whitney sign statistic,
//!
//! and assesses the most likely cluster by random-labelling Monte Carlo.
//!
//! ```
//! use funscan_core::{enumerate_candidates, monte_carlo, presets, simulate, Method};
//!
//! let grid = presets::surrogate_grid();
//! let cands = enumerate_candidates(&grid, 0.5).unwrap();
//! let mut cfg = simulate::SimulationConfig::new(
//!     simulate::NoiseDistribution::Gaussian,
//!     simulate::ShiftFamily::Delta1,
//!     3.0,
//!     presets::capital_cluster(&grid),
//! );
//! cfg.time_grid = simulate::unit_grid(21);
//! let ds = simulate::generate_dataset(&cfg, &grid, 0).unwrap();
//! let result = monte_carlo(&ds, &cands, Method::Dffss, 19, 7).unwrap();
//! assert!(result.p_value >= 1.0 / 20.0);
//! ```

pub mod error;
pub mod fdata;
pub mod geometry;
pub mod indices;
pub mod io;
pub mod presets;
pub mod report;
pub mod rng;
pub mod scan;
pub mod simulate;
pub mod timing;

pub use error::{Result, ScanError};
pub use fdata::{group_mean, l2_inner, l2_norm_sq, pooled_variance_at_t, FunctionalDataset, GroupSummary};
pub use geometry::{enumerate_candidates, CandidateCluster, CandidateSet, SiteGrid, SiteRecord};
pub use indices::{
    dffss_index, npfss_index, npfss_index_naive, pfss_index, IndexValue, Method, SignMatrix,
};
pub use scan::{
    detect_mlc, monte_carlo, secondary_clusters, Detection, NullDistribution, OverlapPolicy,
    ScanResult, Scanner, SecondaryCluster,
};
pub use simulate::{NoiseDistribution, ShiftFamily, SimulationConfig, StudyMetrics};
