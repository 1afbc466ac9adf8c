//! Scan over the candidate family, random-labelling inference and secondary
//! clusters.
//!
//! Windows sharing a centre are nested prefixes of that centre's neighbour
//! order, so the engine keeps one running sum per centre and scores each
//! window in O(T):
//!
//! * PFSS and DFFSS need only the window sum of the (centred) curves plus the
//!   precomputed pointwise total sum of squares, through
//!   `within = total − between`.
//! * NPFSS needs the window sum of sign-matrix rows.
//!
//! A relabelling only changes which curve sits at which site, so the same
//! precomputation (including the sign matrix) serves every permutation.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, ScanError};
use crate::fdata::{check_permutation, FunctionalDataset};
use crate::geometry::{CandidateCluster, CandidateSet};
use crate::indices::{npfss_normaliser, studentised, Floors, Method, SignMatrix};
use crate::rng::{child_rng, DOMAIN_PERMUTATION};

/// Score of one window under one labelling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowScore {
    pub value: f64,
    /// Grid index of the DFFSS supremum (0 for the other methods).
    pub argmax: usize,
    /// DFFSS perfect separation at some grid time.
    pub flagged: bool,
    /// PFSS zero denominator; `value` is 0 in that case.
    pub degenerate: bool,
}

/// Precomputed state for scoring every candidate under any labelling.
pub struct ScanEngine<'a> {
    cands: &'a CandidateSet,
    method: Method,
    n: usize,
    t: usize,
    weights: Vec<f64>,
    /// Centred curves for PFSS/DFFSS, sign-matrix rows for NPFSS.
    rows: Vec<f64>,
    total: Vec<f64>,
    tss: Vec<f64>,
    tss_int: f64,
    floors: Floors,
}

impl<'a> ScanEngine<'a> {
    pub fn new(ds: &FunctionalDataset, cands: &'a CandidateSet, method: Method) -> Result<Self> {
        let (n, t) = (ds.n(), ds.t());
        if cands.n_sites() != n {
            return Err(ScanError::LengthMismatch {
                expected: cands.n_sites(),
                got: n,
            });
        }
        if n < 3 {
            return Err(ScanError::invalid(format!(
                "scanning needs at least 3 sites, got {n}"
            )));
        }
        if cands.is_empty() {
            return Err(ScanError::invalid("empty candidate set"));
        }
        let weights = ds.weights().to_vec();
        let floors = Floors::of(ds);

        let mut grand = vec![0.0; t];
        for row in ds.rows() {
            for (g, v) in grand.iter_mut().zip(row) {
                *g += v;
            }
        }
        grand.iter_mut().for_each(|g| *g /= n as f64);

        let mut tss = vec![0.0; t];
        let rows = match method {
            Method::Npfss => {
                let sm = SignMatrix::build(ds);
                (0..n).flat_map(|i| sm.row(i).to_vec()).collect::<Vec<f64>>()
            }
            Method::Pfss | Method::Dffss => {
                let mut centred = Vec::with_capacity(n * t);
                for row in ds.rows() {
                    for k in 0..t {
                        let d = row[k] - grand[k];
                        tss[k] += d * d;
                        centred.push(d);
                    }
                }
                centred
            }
        };
        let mut total = vec![0.0; t];
        for row in rows.chunks_exact(t) {
            for (s, v) in total.iter_mut().zip(row) {
                *s += v;
            }
        }
        let tss_int = tss.iter().zip(&weights).map(|(s, w)| s * w).sum();

        Ok(Self {
            cands,
            method,
            n,
            t,
            weights,
            rows,
            total,
            tss,
            tss_int,
            floors,
        })
    }

    pub fn method(&self) -> Method {
        self.method
    }

    /// Visits `(window_index, score)` for every candidate under labelling
    /// `perm` (site `s` carries curve `perm[s]`; `None` is the identity).
    pub fn sweep(&self, perm: Option<&[usize]>, mut visit: impl FnMut(usize, WindowScore)) {
        let t = self.t;
        let mut acc = vec![0.0; t];
        for plan in &self.cands.plans {
            acc.iter_mut().for_each(|a| *a = 0.0);
            let mut added = 0;
            for &(len, wi) in &plan.prefixes {
                for &site in &plan.order[added..len] {
                    let r = perm.map_or(site, |p| p[site]);
                    let row = &self.rows[r * t..(r + 1) * t];
                    for (a, v) in acc.iter_mut().zip(row) {
                        *a += v;
                    }
                }
                added = len;
                visit(wi, self.score(&acc, len));
            }
        }
    }

    #[allow(clippy::needless_range_loop)]
    fn score(&self, acc: &[f64], inside: usize) -> WindowScore {
        let n = self.n;
        let outside = n - inside;
        let (m, mc, nf) = (inside as f64, outside as f64, n as f64);
        match self.method {
            Method::Npfss => {
                let sq: f64 = self.weights.iter().zip(acc).map(|(w, a)| w * a * a).sum();
                WindowScore {
                    value: sq.sqrt() * npfss_normaliser(inside, n),
                    argmax: 0,
                    flagged: false,
                    degenerate: false,
                }
            }
            Method::Pfss => {
                let mut between = 0.0;
                for k in 0..self.t {
                    let g = self.total[k] / nf;
                    let a = acc[k] / m - g;
                    let b = (self.total[k] - acc[k]) / mc - g;
                    between += self.weights[k] * (m * a * a + mc * b * b);
                }
                let denom = (self.tss_int - between) / (nf - 2.0);
                if denom <= self.floors.var * self.floors.interval {
                    WindowScore {
                        value: 0.0,
                        argmax: 0,
                        flagged: false,
                        degenerate: true,
                    }
                } else {
                    WindowScore {
                        value: between / denom,
                        argmax: 0,
                        flagged: false,
                        degenerate: false,
                    }
                }
            }
            Method::Dffss => {
                let size_factor = 1.0 / m + 1.0 / mc;
                let mut best = f64::NEG_INFINITY;
                let mut argmax = 0;
                let mut flagged = false;
                for k in 0..self.t {
                    let g = self.total[k] / nf;
                    let a = acc[k] / m;
                    let b = (self.total[k] - acc[k]) / mc;
                    let between = m * (a - g) * (a - g) + mc * (b - g) * (b - g);
                    let pooled = (self.tss[k] - between) / (nf - 2.0);
                    let (v, flag) = studentised(a - b, pooled, size_factor, &self.floors);
                    flagged |= flag;
                    if v > best {
                        best = v;
                        argmax = k;
                    }
                }
                WindowScore {
                    value: best,
                    argmax,
                    flagged,
                    degenerate: false,
                }
            }
        }
    }

    /// Scores of all windows, in candidate order.
    pub fn scores(&self, perm: Option<&[usize]>) -> Vec<WindowScore> {
        let mut out = vec![
            WindowScore {
                value: 0.0,
                argmax: 0,
                flagged: false,
                degenerate: false,
            };
            self.cands.len()
        ];
        self.sweep(perm, |wi, s| out[wi] = s);
        out
    }

    /// Maximum index under `perm`, or `None` when PFSS hits a zero denominator.
    pub fn max_index(&self, perm: Option<&[usize]>) -> Option<f64> {
        let mut best = f64::NEG_INFINITY;
        let mut degenerate = false;
        self.sweep(perm, |_, s| {
            degenerate |= s.degenerate;
            if s.value > best {
                best = s.value;
            }
        });
        (!degenerate).then_some(best)
    }
}

/// Index of the first maximal score (candidate order is the tie-break).
fn argmax(scores: &[WindowScore]) -> usize {
    let mut best = 0;
    for (i, s) in scores.iter().enumerate() {
        if s.value > scores[best].value {
            best = i;
        }
    }
    best
}

/// The most likely cluster under the observed labelling.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub window: usize,
    pub cluster: CandidateCluster,
    pub lambda: f64,
    pub argmax_time: Option<f64>,
    pub flagged: bool,
}

/// How secondary clusters may relate to earlier reported clusters.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OverlapPolicy {
    /// No shared site with any earlier cluster.
    #[default]
    None,
    /// Overlap allowed as long as neither window contains the other's centre.
    Partial,
}

impl std::str::FromStr for OverlapPolicy {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(OverlapPolicy::None),
            "partial" => Ok(OverlapPolicy::Partial),
            other => Err(ScanError::invalid(format!("unknown overlap policy `{other}`"))),
        }
    }
}

impl OverlapPolicy {
    pub fn as_str(self) -> &'static str {
        match self {
            OverlapPolicy::None => "none",
            OverlapPolicy::Partial => "partial",
        }
    }

    fn compatible(self, a: &CandidateCluster, b: &CandidateCluster) -> bool {
        match self {
            OverlapPolicy::None => a.is_disjoint(b),
            OverlapPolicy::Partial => !a.contains(b.center()) && !b.contains(a.center()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondaryCluster {
    pub window: usize,
    pub cluster: CandidateCluster,
    pub value: f64,
    pub p_value: f64,
}

/// Maxima of the index over random relabellings of the data.
#[derive(Debug, Clone, PartialEq)]
pub struct NullDistribution {
    pub maxima: Vec<f64>,
    /// Permutations whose PFSS maximum hit a zero denominator (recorded as 0).
    pub degenerate: usize,
    pub master_seed: u64,
}

impl NullDistribution {
    /// `(1 + #{Λ⁽ᵐ⁾ ≥ value}) / (M + 1)`.
    pub fn p_value(&self, value: f64) -> f64 {
        let exceed = self.maxima.iter().filter(|&&m| m >= value).count();
        (1 + exceed) as f64 / (self.maxima.len() + 1) as f64
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct PhaseTimings {
    pub setup: Duration,
    pub observed: Duration,
    pub permutations: Duration,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub method: Method,
    pub mlc: Detection,
    pub p_value: f64,
    pub secondaries: Vec<SecondaryCluster>,
    pub null: NullDistribution,
    /// Observed windows with a DFFSS perfect separation.
    pub flagged_windows: usize,
    pub timings: PhaseTimings,
}

impl ScanResult {
    pub fn lambda(&self) -> f64 {
        self.mlc.lambda
    }

    pub fn perms(&self) -> usize {
        self.null.maxima.len()
    }

    pub fn master_seed(&self) -> u64 {
        self.null.master_seed
    }
}

/// Random relabelling `m` (1-based) drawn from its own stream.
pub fn permutation(n: usize, master_seed: u64, m: u64) -> Vec<usize> {
    let mut rng = child_rng(master_seed, DOMAIN_PERMUTATION, m);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    perm
}

/// Observed-data scan state reused across the detection, inference and
/// secondary-cluster phases.
pub struct Scanner<'a> {
    ds: &'a FunctionalDataset,
    cands: &'a CandidateSet,
    engine: ScanEngine<'a>,
    observed: Vec<WindowScore>,
    timings: PhaseTimings,
}

impl<'a> Scanner<'a> {
    pub fn new(ds: &'a FunctionalDataset, cands: &'a CandidateSet, method: Method) -> Result<Self> {
        let start = Instant::now();
        let engine = ScanEngine::new(ds, cands, method)?;
        let setup = start.elapsed();
        let start = Instant::now();
        let observed = engine.scores(None);
        if method == Method::Pfss && observed.iter().any(|s| s.degenerate) {
            return Err(ScanError::Degenerate(
                "PFSS denominator is zero for some window: curves are identical within both groups"
                    .into(),
            ));
        }
        let timings = PhaseTimings {
            setup,
            observed: start.elapsed(),
            permutations: Duration::ZERO,
        };
        Ok(Self {
            ds,
            cands,
            engine,
            observed,
            timings,
        })
    }

    pub fn method(&self) -> Method {
        self.engine.method()
    }

    pub fn observed(&self) -> &[WindowScore] {
        &self.observed
    }

    pub fn detection(&self) -> Detection {
        let window = argmax(&self.observed);
        let score = self.observed[window];
        Detection {
            window,
            cluster: self.cands.get(window).clone(),
            lambda: score.value,
            argmax_time: (self.method() == Method::Dffss)
                .then(|| self.ds.time_grid()[score.argmax]),
            flagged: score.flagged,
        }
    }

    /// Runs `perms` random relabellings. Permutation `m` uses stream `m` of
    /// `master_seed`, so the output is independent of the thread count.
    pub fn null_distribution(&mut self, perms: usize, master_seed: u64) -> Result<NullDistribution> {
        if perms < 1 {
            return Err(ScanError::invalid("at least one permutation is required"));
        }
        let start = Instant::now();
        let n = self.ds.n();
        let engine = &self.engine;
        let maxima: Vec<Option<f64>> = (1..=perms as u64)
            .into_par_iter()
            .map(|m| engine.max_index(Some(&permutation(n, master_seed, m))))
            .collect();
        self.timings.permutations = start.elapsed();
        let degenerate = maxima.iter().filter(|m| m.is_none()).count();
        Ok(NullDistribution {
            maxima: maxima.into_iter().map(|m| m.unwrap_or(0.0)).collect(),
            degenerate,
            master_seed,
        })
    }

    /// Greedy ranking of windows compatible with the MLC and with each other,
    /// each tested against the null distribution of the maximum.
    pub fn secondary_clusters(&self, null: &NullDistribution, overlap: OverlapPolicy) -> Vec<SecondaryCluster> {
        let mlc = argmax(&self.observed);
        let mut order: Vec<usize> = (0..self.observed.len()).collect();
        order.sort_by(|&a, &b| {
            self.observed[b]
                .value
                .total_cmp(&self.observed[a].value)
                .then(a.cmp(&b))
        });
        let mut accepted: Vec<&CandidateCluster> = vec![self.cands.get(mlc)];
        let mut out = Vec::new();
        for wi in order {
            if wi == mlc {
                continue;
            }
            let w = self.cands.get(wi);
            if accepted.iter().all(|a| overlap.compatible(a, w)) {
                accepted.push(w);
                let value = self.observed[wi].value;
                out.push(SecondaryCluster {
                    window: wi,
                    cluster: w.clone(),
                    value,
                    p_value: null.p_value(value),
                });
            }
        }
        out
    }

    pub fn run(mut self, perms: usize, master_seed: u64, overlap: OverlapPolicy) -> Result<ScanResult> {
        let null = self.null_distribution(perms, master_seed)?;
        let mlc = self.detection();
        let secondaries = self.secondary_clusters(&null, overlap);
        Ok(ScanResult {
            method: self.method(),
            p_value: null.p_value(mlc.lambda),
            mlc,
            secondaries,
            flagged_windows: self.observed.iter().filter(|s| s.flagged).count(),
            null,
            timings: self.timings,
        })
    }
}

/// Most likely cluster and its index value.
pub fn detect_mlc(ds: &FunctionalDataset, cands: &CandidateSet, method: Method) -> Result<Detection> {
    Ok(Scanner::new(ds, cands, method)?.detection())
}

/// Detection plus random-labelling p-value with `perms` permutations;
/// secondaries are disjoint from each other and from the MLC.
pub fn monte_carlo(
    ds: &FunctionalDataset,
    cands: &CandidateSet,
    method: Method,
    perms: usize,
    master_seed: u64,
) -> Result<ScanResult> {
    Scanner::new(ds, cands, method)?.run(perms, master_seed, OverlapPolicy::None)
}

/// Secondary clusters for a finished scan, re-ranked under `overlap`.
pub fn secondary_clusters(
    ds: &FunctionalDataset,
    cands: &CandidateSet,
    result: &ScanResult,
    overlap: OverlapPolicy,
) -> Result<Vec<SecondaryCluster>> {
    Ok(Scanner::new(ds, cands, result.method)?.secondary_clusters(&result.null, overlap))
}

/// Scores every candidate of `ds` relabelled by `perm` from scratch, one
/// window at a time. Slow; used to check the engine.
pub fn direct_scores(
    ds: &FunctionalDataset,
    cands: &CandidateSet,
    method: Method,
    perm: &[usize],
) -> Result<Vec<f64>> {
    check_permutation(perm, ds.n())?;
    let relabelled = ds.relabelled(perm)?;
    let sm = (method == Method::Npfss).then(|| SignMatrix::build(&relabelled));
    cands
        .iter()
        .map(|w| match &sm {
            Some(sm) => crate::indices::npfss_index(sm, w.members()).map(|v| v.value),
            None => crate::indices::index_value(&relabelled, method, w.members()).map(|v| v.value),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{enumerate_candidates, SiteGrid, SiteRecord};
    use rand::{Rng, SeedableRng};

    fn lattice(nx: usize, ny: usize) -> SiteGrid {
        let mut recs = Vec::new();
        for i in 0..nx {
            for j in 0..ny {
                // small irregular offsets avoid distance ties
                let x = i as f64 + 0.013 * ((i * 7 + j * 3) % 5) as f64;
                let y = j as f64 + 0.017 * ((i * 2 + j * 5) % 7) as f64;
                recs.push(SiteRecord::new(format!("s{}", recs.len()), x, y));
            }
        }
        SiteGrid::new(recs).unwrap()
    }

    fn noise_dataset(grid: &SiteGrid, t: usize, seed: u64) -> FunctionalDataset {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let times: Vec<f64> = (0..t).map(|k| k as f64 / (t - 1) as f64).collect();
        let rows = (0..grid.n())
            .map(|_| (0..t).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        FunctionalDataset::new(grid.ids().map(String::from).collect(), times, rows).unwrap()
    }

    fn shifted(ds: &FunctionalDataset, members: &[usize], by: f64) -> FunctionalDataset {
        let t = ds.t();
        let rows = (0..ds.n())
            .map(|i| {
                let add = if members.contains(&i) { by } else { 0.0 };
                ds.row(i).iter().map(|v| v + add).collect()
            })
            .collect();
        let _ = t;
        FunctionalDataset::new(ds.site_ids().to_vec(), ds.time_grid().to_vec(), rows).unwrap()
    }

    #[test]
    fn engine_matches_direct_evaluation() {
        let grid = lattice(4, 4);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        let ds = noise_dataset(&grid, 9, 5);
        for method in Method::ALL {
            let engine = ScanEngine::new(&ds, &cands, method).unwrap();
            for m in 0..4u64 {
                let perm = if m == 0 { (0..16).collect() } else { permutation(16, 77, m) };
                let fast = engine.scores(Some(&perm));
                let slow = direct_scores(&ds, &cands, method, &perm).unwrap();
                for (f, s) in fast.iter().zip(&slow) {
                    assert!((f.value - s).abs() <= 1e-9 * s.max(1.0), "{method}: {} vs {s}", f.value);
                }
            }
        }
    }

    #[test]
    fn planted_cluster_found_by_all_methods() {
        let grid = lattice(5, 4);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        let target = cands
            .iter()
            .position(|w| w.len() == 4)
            .unwrap();
        let ds = shifted(&noise_dataset(&grid, 15, 11), cands.get(target).members(), 10.0);
        for method in Method::ALL {
            let d = detect_mlc(&ds, &cands, method).unwrap();
            assert_eq!(d.cluster.members(), cands.get(target).members(), "{method}");
            // brute force over all candidates
            let direct = direct_scores(&ds, &cands, method, &(0..20).collect::<Vec<_>>()).unwrap();
            let best = direct.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            assert!((d.lambda - best).abs() <= 1e-9 * best);
        }
    }

    #[test]
    fn identical_curves() {
        let grid = lattice(3, 3);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        let rows = vec![vec![0.3, 0.1, -0.2]; 9];
        let ds = FunctionalDataset::new(
            grid.ids().map(String::from).collect(),
            vec![0.0, 0.5, 1.0],
            rows,
        )
        .unwrap();
        assert!(detect_mlc(&ds, &cands, Method::Pfss).unwrap_err().is_degenerate());
        for method in [Method::Dffss, Method::Npfss] {
            let d = detect_mlc(&ds, &cands, method).unwrap();
            assert_eq!(d.window, 0);
            assert_eq!(d.lambda, 0.0);
        }
    }

    #[test]
    fn p_value_extremes() {
        let null = NullDistribution {
            maxima: vec![1.0, 2.0, 3.0, 2.5],
            degenerate: 0,
            master_seed: 0,
        };
        assert_eq!(null.p_value(10.0), 1.0 / 5.0);
        assert_eq!(null.p_value(0.5), 1.0);
        assert_eq!(null.p_value(2.5), 3.0 / 5.0);
    }

    #[test]
    fn rejects_zero_permutations() {
        let grid = lattice(3, 3);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        let ds = noise_dataset(&grid, 4, 1);
        assert!(monte_carlo(&ds, &cands, Method::Dffss, 0, 1).is_err());
    }

    #[test]
    fn two_planted_clusters() {
        let grid = lattice(10, 10);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        // 4-site windows in opposite corners
        let a = cands.iter().find(|w| w.len() == 4 && w.center() == 11).unwrap().clone();
        let b = cands.iter().find(|w| w.len() == 4 && w.center() == 88).unwrap().clone();
        assert!(a.is_disjoint(&b));
        let both: Vec<usize> = a.members().iter().chain(b.members()).copied().collect();
        let ds = shifted(&noise_dataset(&grid, 11, 3), &both, 10.0);
        for method in Method::ALL {
            let r = monte_carlo(&ds, &cands, method, 99, 2024).unwrap();
            let found = [r.mlc.cluster.members(), r.secondaries[0].cluster.members()];
            assert!(found.contains(&a.members()) && found.contains(&b.members()), "{method}");
            assert_eq!(r.p_value, 0.01);
            assert_eq!(r.secondaries[0].p_value, 0.01);
            for (i, s) in r.secondaries.iter().enumerate() {
                assert!(s.cluster.is_disjoint(&r.mlc.cluster));
                for t in &r.secondaries[..i] {
                    assert!(s.cluster.is_disjoint(&t.cluster));
                }
            }
        }
    }

    #[test]
    fn partial_overlap_policy_allows_more_clusters() {
        let grid = lattice(5, 5);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        let ds = noise_dataset(&grid, 7, 9);
        let result = monte_carlo(&ds, &cands, Method::Npfss, 19, 5).unwrap();
        let partial = secondary_clusters(&ds, &cands, &result, OverlapPolicy::Partial).unwrap();
        assert!(!partial.is_empty());
        for s in &partial {
            assert!(!s.cluster.contains(result.mlc.cluster.center()));
            assert!(!result.mlc.cluster.contains(s.cluster.center()));
        }
        // disjoint clusters are also partial-compatible, so the top-ranked one agrees
        assert_eq!(partial[0], result.secondaries[0]);
    }

    #[test]
    fn thread_count_does_not_change_result() {
        let grid = lattice(4, 4);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        let ds = noise_dataset(&grid, 6, 8);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| monte_carlo(&ds, &cands, Method::Dffss, 50, 7).unwrap())
        };
        let (a, b) = (run(1), run(4));
        assert_eq!(a.null.maxima, b.null.maxima);
        assert_eq!(a.p_value, b.p_value);
        assert_eq!(a.secondaries, b.secondaries);
    }

    #[test]
    fn relabelling_sites_keeps_lambda() {
        // permute the site grid and the curve rows jointly
        let grid = lattice(4, 3);
        let ds = noise_dataset(&grid, 8, 21);
        let cands = enumerate_candidates(&grid, 0.5).unwrap();
        let perm = permutation(12, 3, 1);
        let grid2 = SiteGrid::new(perm.iter().map(|&p| grid.site(p).clone()).collect()).unwrap();
        let ds2 = FunctionalDataset::new(
            perm.iter().map(|&p| ds.site_ids()[p].clone()).collect(),
            ds.time_grid().to_vec(),
            perm.iter().map(|&p| ds.row(p).to_vec()).collect(),
        )
        .unwrap();
        let cands2 = enumerate_candidates(&grid2, 0.5).unwrap();
        for method in Method::ALL {
            let a = detect_mlc(&ds, &cands, method).unwrap().lambda;
            let b = detect_mlc(&ds2, &cands2, method).unwrap().lambda;
            assert!((a - b).abs() <= 1e-10 * a.max(1.0), "{method}");
        }
    }
}
