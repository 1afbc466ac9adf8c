//! Serializable views of scan results, with site ids in place of indices.

use serde::Serialize;

use crate::geometry::{CandidateCluster, SiteGrid};
use crate::indices::Method;
use crate::scan::ScanResult;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClusterReport {
    pub site_ids: Vec<String>,
    pub size: usize,
    pub center_id: String,
    pub radius: f64,
    pub index_value: f64,
    pub p_value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub argmax_time: Option<f64>,
}

impl ClusterReport {
    fn new(grid: &SiteGrid, cluster: &CandidateCluster, value: f64, p_value: f64, argmax_time: Option<f64>) -> Self {
        Self {
            site_ids: cluster.members().iter().map(|&i| grid.site(i).id.clone()).collect(),
            size: cluster.len(),
            center_id: grid.site(cluster.center()).id.clone(),
            radius: cluster.radius(),
            index_value: value,
            p_value,
            argmax_time,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TimingsReport {
    pub setup_ms: f64,
    pub observed_ms: f64,
    pub permutations_ms: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MethodReport {
    pub method: Method,
    pub lambda: f64,
    pub p_value: f64,
    pub perms: usize,
    pub master_seed: u64,
    pub mlc: ClusterReport,
    pub secondaries: Vec<ClusterReport>,
    pub degenerate_permutations: usize,
    pub flagged_windows: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings: Option<TimingsReport>,
}

impl MethodReport {
    /// Secondaries are kept only when `p < level`, unless `level` is `None`.
    pub fn new(result: &ScanResult, grid: &SiteGrid, level: Option<f64>, with_timings: bool) -> Self {
        let secondaries = result
            .secondaries
            .iter()
            .filter(|s| level.is_none_or(|a| s.p_value < a))
            .map(|s| ClusterReport::new(grid, &s.cluster, s.value, s.p_value, None))
            .collect();
        let ms = |d: std::time::Duration| d.as_secs_f64() * 1e3;
        Self {
            method: result.method,
            lambda: result.lambda(),
            p_value: result.p_value,
            perms: result.perms(),
            master_seed: result.master_seed(),
            mlc: ClusterReport::new(
                grid,
                &result.mlc.cluster,
                result.mlc.lambda,
                result.p_value,
                result.mlc.argmax_time,
            ),
            secondaries,
            degenerate_permutations: result.null.degenerate,
            flagged_windows: result.flagged_windows,
            timings: with_timings.then(|| TimingsReport {
                setup_ms: ms(result.timings.setup),
                observed_ms: ms(result.timings.observed),
                permutations_ms: ms(result.timings.permutations),
            }),
        }
    }
}
