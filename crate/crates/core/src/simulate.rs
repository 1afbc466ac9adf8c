//! Artificial functional datasets and the power study harness.
//!
//! Curves follow
//!
//! ```text
//! X_i(t) = sin(2πt²)⁵ + Δ(t)·1{i ∈ cluster} + ε_i(t)
//! ε_i(t) = Σ_{k=1..7} sqrt(1.5 · 0.2^k) (v_{i,1,k} − v_{i,2,k}) Ψ_k(t)
//! ```
//!
//! with unit-variance coefficients `v` drawn from a Gaussian, a scaled
//! Student t(4) or a centred and scaled χ²(4).

use std::f64::consts::{PI, SQRT_2};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal, StudentT};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScanError};
use crate::fdata::FunctionalDataset;
use crate::geometry::{CandidateSet, SiteGrid};
use crate::indices::Method;
use crate::rng::{child_rng, derive_seed, DOMAIN_NOISE, DOMAIN_REPLICATE};
use crate::scan::Scanner;

/// Number of basis functions in the noise expansion.
pub const BASIS_SIZE: usize = 7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseDistribution {
    Gaussian,
    Student4,
    Chisq4,
}

impl NoiseDistribution {
    pub const ALL: [NoiseDistribution; 3] = [
        NoiseDistribution::Gaussian,
        NoiseDistribution::Student4,
        NoiseDistribution::Chisq4,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            NoiseDistribution::Gaussian => "gaussian",
            NoiseDistribution::Student4 => "student4",
            NoiseDistribution::Chisq4 => "chisq4",
        }
    }

    /// One unit-variance coefficient.
    pub fn sample<R: Rng + ?Sized>(self, rng: &mut R) -> f64 {
        match self {
            NoiseDistribution::Gaussian => StandardNormal.sample(rng),
            NoiseDistribution::Student4 => {
                StudentT::new(4.0).expect("valid dof").sample(rng) / SQRT_2
            }
            NoiseDistribution::Chisq4 => {
                (ChiSquared::new(4.0).expect("valid dof").sample(rng) - 4.0) / (2.0 * SQRT_2)
            }
        }
    }
}

impl fmt::Display for NoiseDistribution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for NoiseDistribution {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "gaussian" | "normal" => Ok(NoiseDistribution::Gaussian),
            "student4" | "t4" => Ok(NoiseDistribution::Student4),
            "chisq4" | "chi2" => Ok(NoiseDistribution::Chisq4),
            other => Err(ScanError::invalid(format!("unknown distribution `{other}`"))),
        }
    }
}

/// Cluster shift shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShiftFamily {
    /// `α t`
    Delta1,
    /// `α t (1 − t)`
    Delta2,
    /// `α exp(−100 (t − 0.5)²) / 3`
    Delta3,
}

impl ShiftFamily {
    pub const ALL: [ShiftFamily; 3] = [ShiftFamily::Delta1, ShiftFamily::Delta2, ShiftFamily::Delta3];

    pub fn as_str(self) -> &'static str {
        match self {
            ShiftFamily::Delta1 => "delta1",
            ShiftFamily::Delta2 => "delta2",
            ShiftFamily::Delta3 => "delta3",
        }
    }

    /// Intensities used for this shape in the reference study.
    pub fn study_alphas(self) -> &'static [f64] {
        match self {
            ShiftFamily::Delta1 => &[0.0, 0.75, 1.5, 2.25, 3.0],
            ShiftFamily::Delta2 => &[0.0, 2.0, 4.0, 6.0, 8.0],
            ShiftFamily::Delta3 => &[0.0, 2.5, 5.0, 7.5, 10.0],
        }
    }
}

impl fmt::Display for ShiftFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ShiftFamily {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "delta1" | "d1" => Ok(ShiftFamily::Delta1),
            "delta2" | "d2" => Ok(ShiftFamily::Delta2),
            "delta3" | "d3" => Ok(ShiftFamily::Delta3),
            other => Err(ScanError::invalid(format!("unknown shift family `{other}`"))),
        }
    }
}

/// Noise basis: `Ψ_1 = 1`, `√2 sin(kπt)` for even k, `√2 cos((k−1)πt)` for odd k > 1.
pub fn basis_psi(k: usize, t: f64) -> Result<f64> {
    match k {
        1 => Ok(1.0),
        2..=BASIS_SIZE if k % 2 == 0 => Ok(SQRT_2 * (k as f64 * PI * t).sin()),
        3..=BASIS_SIZE => Ok(SQRT_2 * ((k - 1) as f64 * PI * t).cos()),
        _ => Err(ScanError::invalid(format!(
            "basis index must lie in 1..={BASIS_SIZE}, got {k}"
        ))),
    }
}

/// Standard deviation weight `sqrt(1.5 · 0.2^k)` of basis function `k`.
pub fn basis_weight(k: usize) -> f64 {
    (1.5 * 0.2f64.powi(k as i32)).sqrt()
}

pub fn shift_value(family: ShiftFamily, alpha: f64, t: f64) -> f64 {
    match family {
        ShiftFamily::Delta1 => alpha * t,
        ShiftFamily::Delta2 => alpha * t * (1.0 - t),
        ShiftFamily::Delta3 => alpha * (-100.0 * (t - 0.5).powi(2)).exp() / 3.0,
    }
}

/// Deterministic mean component `sin(2πt²)⁵`.
pub fn mean_curve(t: f64) -> f64 {
    (2.0 * PI * t * t).sin().powi(5)
}

/// Pointwise variance of ε: `2 Σ_k 1.5 · 0.2^k Ψ_k(t)²`.
pub fn noise_variance(t: f64) -> f64 {
    (1..=BASIS_SIZE)
        .map(|k| {
            let psi = basis_psi(k, t).expect("k in range");
            2.0 * 1.5 * 0.2f64.powi(k as i32) * psi * psi
        })
        .sum()
}

/// `n` equally spaced points on [0, 1].
pub fn unit_grid(points: usize) -> Vec<f64> {
    (0..points).map(|k| k as f64 / (points - 1) as f64).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimulationConfig {
    pub distribution: NoiseDistribution,
    pub shift: ShiftFamily,
    pub alpha: f64,
    /// Sorted site indices carrying the shift.
    pub true_cluster: Vec<usize>,
    pub time_grid: Vec<f64>,
    pub replicates: usize,
    pub perms: usize,
    pub master_seed: u64,
    pub level: f64,
}

impl SimulationConfig {
    /// Desk-scale defaults: 101-point grid, 100 replicates, 199 permutations.
    pub fn new(distribution: NoiseDistribution, shift: ShiftFamily, alpha: f64, true_cluster: Vec<usize>) -> Self {
        Self {
            distribution,
            shift,
            alpha,
            true_cluster,
            time_grid: unit_grid(101),
            replicates: 100,
            perms: 199,
            master_seed: 1,
            level: 0.05,
        }
    }

    pub fn validate(&self, n_sites: usize) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
            return Err(ScanError::invalid(format!("alpha must be >= 0, got {}", self.alpha)));
        }
        if self.true_cluster.is_empty() {
            return Err(ScanError::invalid("true cluster is empty"));
        }
        if let Some(&bad) = self.true_cluster.iter().find(|&&i| i >= n_sites) {
            return Err(ScanError::invalid(format!(
                "true cluster site {bad} out of range for {n_sites} sites"
            )));
        }
        if self.replicates < 1 {
            return Err(ScanError::invalid("replicates must be >= 1"));
        }
        if self.perms < 1 {
            return Err(ScanError::invalid("perms must be >= 1"));
        }
        if !(self.level > 0.0 && self.level < 1.0) {
            return Err(ScanError::invalid(format!("level must lie in (0, 1), got {}", self.level)));
        }
        if self.time_grid.iter().any(|t| !(0.0..=1.0).contains(t)) {
            return Err(ScanError::invalid("simulation time grid must lie in [0, 1]"));
        }
        Ok(())
    }

    fn replicate_seed(&self, replicate: usize) -> u64 {
        derive_seed(self.master_seed, DOMAIN_REPLICATE, replicate as u64)
    }
}

/// Noise curve of one site; its stream depends only on `(seed, site)`.
pub fn noise_curve(distribution: NoiseDistribution, seed: u64, site: usize, grid: &[f64]) -> Vec<f64> {
    let mut rng = child_rng(seed, DOMAIN_NOISE, site as u64);
    let mut coef = [0.0; BASIS_SIZE];
    for c in coef.iter_mut() {
        let v1 = distribution.sample(&mut rng);
        let v2 = distribution.sample(&mut rng);
        *c = v1 - v2;
    }
    grid.iter()
        .map(|&t| {
            (1..=BASIS_SIZE)
                .map(|k| basis_weight(k) * coef[k - 1] * basis_psi(k, t).expect("k in range"))
                .sum()
        })
        .collect()
}

/// Dataset `replicate` of the study described by `cfg`, over `grid`'s sites.
pub fn generate_dataset(cfg: &SimulationConfig, grid: &SiteGrid, replicate: usize) -> Result<FunctionalDataset> {
    cfg.validate(grid.n())?;
    let seed = cfg.replicate_seed(replicate);
    let base: Vec<f64> = cfg.time_grid.iter().map(|&t| mean_curve(t)).collect();
    let shift: Vec<f64> = cfg
        .time_grid
        .iter()
        .map(|&t| shift_value(cfg.shift, cfg.alpha, t))
        .collect();
    let rows = (0..grid.n())
        .map(|i| {
            let inside = cfg.true_cluster.contains(&i);
            noise_curve(cfg.distribution, seed, i, &cfg.time_grid)
                .into_iter()
                .enumerate()
                .map(|(k, e)| base[k] + if inside { shift[k] } else { 0.0 } + e)
                .collect()
        })
        .collect();
    FunctionalDataset::new(grid.ids().map(String::from).collect(), cfg.time_grid.clone(), rows)
}

/// Agreement between a detected cluster and the true one.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionMetrics {
    pub tpr: f64,
    pub fpr: f64,
    pub ppv: f64,
    pub f_measure: f64,
}

pub fn detection_metrics(detected: &[usize], truth: &[usize], n_sites: usize) -> DetectionMetrics {
    let hits = detected.iter().filter(|i| truth.contains(i)).count() as f64;
    let false_hits = detected.len() as f64 - hits;
    let tpr = hits / truth.len() as f64;
    let outside = (n_sites - truth.len()) as f64;
    let fpr = if outside > 0.0 { false_hits / outside } else { 0.0 };
    let ppv = if detected.is_empty() { 0.0 } else { hits / detected.len() as f64 };
    let f_measure = if ppv + tpr > 0.0 { 2.0 * ppv * tpr / (ppv + tpr) } else { 0.0 };
    DetectionMetrics { tpr, fpr, ppv, f_measure }
}

/// Power and detection accuracy of one method over the study replicates.
/// TPR, FPR and F-measure average over rejecting replicates only, and are
/// `None` when no replicate rejected.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyMetrics {
    pub method: Method,
    pub power: f64,
    pub tpr: Option<f64>,
    pub fpr: Option<f64>,
    pub f_measure: Option<f64>,
    pub rejected_count: usize,
    pub replicates: usize,
}

/// Outcome of one method on one replicate.
#[derive(Debug, Clone, PartialEq)]
pub struct ReplicateOutcome {
    pub p_value: f64,
    pub lambda: f64,
    pub detected: Vec<usize>,
}

/// Scans replicate `replicate` with every method in `methods`.
pub fn run_replicate(
    cfg: &SimulationConfig,
    grid: &SiteGrid,
    cands: &CandidateSet,
    methods: &[Method],
    replicate: usize,
) -> Result<Vec<ReplicateOutcome>> {
    let ds = generate_dataset(cfg, grid, replicate)?;
    let seed = cfg.replicate_seed(replicate);
    methods
        .iter()
        .map(|&method| {
            let mut scanner = Scanner::new(&ds, cands, method)?;
            let null = scanner.null_distribution(cfg.perms, seed)?;
            let mlc = scanner.detection();
            Ok(ReplicateOutcome {
                p_value: null.p_value(mlc.lambda),
                lambda: mlc.lambda,
                detected: mlc.cluster.members().to_vec(),
            })
        })
        .collect()
}

/// Runs the study for each method on shared replicate datasets.
pub fn run_power_study(
    cfg: &SimulationConfig,
    grid: &SiteGrid,
    cands: &CandidateSet,
    methods: &[Method],
) -> Result<Vec<StudyMetrics>> {
    cfg.validate(grid.n())?;
    let outcomes: Vec<Vec<ReplicateOutcome>> = (0..cfg.replicates)
        .into_par_iter()
        .map(|r| run_replicate(cfg, grid, cands, methods, r))
        .collect::<Result<_>>()?;
    Ok(methods
        .iter()
        .enumerate()
        .map(|(mi, &method)| {
            summarise(
                method,
                outcomes.iter().map(|o| &o[mi]),
                &cfg.true_cluster,
                grid.n(),
                cfg.level,
            )
        })
        .collect())
}

/// Aggregates per-replicate outcomes; a replicate rejects when `p < level`.
pub fn summarise<'o>(
    method: Method,
    outcomes: impl Iterator<Item = &'o ReplicateOutcome>,
    truth: &[usize],
    n_sites: usize,
    level: f64,
) -> StudyMetrics {
    let mut replicates = 0;
    let mut rejected = 0;
    let (mut tpr, mut fpr, mut f) = (0.0, 0.0, 0.0);
    for o in outcomes {
        replicates += 1;
        if o.p_value < level {
            rejected += 1;
            let m = detection_metrics(&o.detected, truth, n_sites);
            tpr += m.tpr;
            fpr += m.fpr;
            f += m.f_measure;
        }
    }
    let avg = |s: f64| (rejected > 0).then(|| s / rejected as f64);
    StudyMetrics {
        method,
        power: rejected as f64 / replicates.max(1) as f64,
        tpr: avg(tpr),
        fpr: avg(fpr),
        f_measure: avg(f),
        rejected_count: rejected,
        replicates,
    }
}
