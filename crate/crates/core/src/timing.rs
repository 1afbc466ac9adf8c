//! Wall-clock comparison of the two NPFSS evaluation routes over a full
//! candidate family: the explicit pairwise double sum per window, and one
//! sign-matrix build followed by row sums per window.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::error::{Result, ScanError};
use crate::fdata::FunctionalDataset;
use crate::geometry::CandidateSet;
use crate::indices::{npfss_index, npfss_index_naive, SignMatrix};

/// Largest tolerated disagreement between the two routes.
pub const ROUTE_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TimingStats {
    pub mean_s: f64,
    pub sd_s: f64,
    pub min_s: f64,
    pub max_s: f64,
}

impl TimingStats {
    pub fn from_samples(samples: &[Duration]) -> Self {
        let xs: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        let n = xs.len() as f64;
        let mean = xs.iter().sum::<f64>() / n;
        let sd = if xs.len() > 1 {
            (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self {
            mean_s: mean,
            sd_s: sd,
            min_s: xs.iter().cloned().fold(f64::INFINITY, f64::min),
            max_s: xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpeedReport {
    pub n: usize,
    pub t: usize,
    pub windows: usize,
    pub repetitions: usize,
    pub naive: TimingStats,
    /// Sign-matrix route, build plus window sums.
    pub sign_matrix: TimingStats,
    pub sign_matrix_build: TimingStats,
    pub sign_matrix_windows: TimingStats,
    /// naive mean / sign-matrix mean
    pub speedup: f64,
    pub max_abs_diff: f64,
}

fn naive_pass(ds: &FunctionalDataset, cands: &CandidateSet) -> Result<Vec<f64>> {
    cands
        .iter()
        .map(|w| npfss_index_naive(ds, w.members()).map(|v| v.value))
        .collect()
}

fn windows_pass(sm: &SignMatrix, cands: &CandidateSet) -> Result<Vec<f64>> {
    cands
        .iter()
        .map(|w| npfss_index(sm, w.members()).map(|v| v.value))
        .collect()
}

/// Largest |fast − naive| over all windows.
pub fn route_difference(ds: &FunctionalDataset, cands: &CandidateSet) -> Result<f64> {
    let naive = naive_pass(ds, cands)?;
    let fast = windows_pass(&SignMatrix::build(ds), cands)?;
    Ok(naive
        .iter()
        .zip(&fast)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max))
}

/// Times both routes `repetitions` times after one warm-up pass, failing if
/// they disagree beyond [`ROUTE_TOLERANCE`].
pub fn compare_npfss(ds: &FunctionalDataset, cands: &CandidateSet, repetitions: usize) -> Result<SpeedReport> {
    if repetitions < 1 {
        return Err(ScanError::invalid("at least one repetition is required"));
    }
    let max_abs_diff = route_difference(ds, cands)?;
    if max_abs_diff > ROUTE_TOLERANCE {
        return Err(ScanError::invalid(format!(
            "NPFSS routes disagree by {max_abs_diff:e}"
        )));
    }

    let mut naive = Vec::with_capacity(repetitions);
    let mut build = Vec::with_capacity(repetitions);
    let mut sums = Vec::with_capacity(repetitions);
    let mut total = Vec::with_capacity(repetitions);
    for _ in 0..repetitions {
        let start = Instant::now();
        std::hint::black_box(naive_pass(ds, cands)?);
        naive.push(start.elapsed());

        let start = Instant::now();
        let sm = std::hint::black_box(SignMatrix::build(ds));
        let built = start.elapsed();
        let start = Instant::now();
        std::hint::black_box(windows_pass(&sm, cands)?);
        let summed = start.elapsed();
        build.push(built);
        sums.push(summed);
        total.push(built + summed);
    }
    let naive = TimingStats::from_samples(&naive);
    let sign_matrix = TimingStats::from_samples(&total);
    Ok(SpeedReport {
        n: ds.n(),
        t: ds.t(),
        windows: cands.len(),
        repetitions,
        speedup: naive.mean_s / sign_matrix.mean_s,
        naive,
        sign_matrix,
        sign_matrix_build: TimingStats::from_samples(&build),
        sign_matrix_windows: TimingStats::from_samples(&sums),
        max_abs_diff,
    })
}
