//! Concentration indices for one candidate window.
//!
//! * PFSS: functional ANOVA F statistic between the window and its complement.
//! * DFFSS: supremum over grid times of the pooled two-sample studentised
//!   mean difference.
//! * NPFSS: norm of the summed L² sign functions between window and complement,
//!   evaluated through the sign matrix.
//!
//! The functions here evaluate a single window directly from the curves. The
//! [`crate::scan`] engine evaluates whole candidate families incrementally and
//! is checked against these.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Result, ScanError};
use crate::fdata::{group_mean, split, weighted_norm_sq, FunctionalDataset};

/// Relative floor under which a variance counts as zero (scaled by the
/// squared magnitude of the data).
pub const VARIANCE_FLOOR: f64 = 1e-12;

/// Pointwise DFFSS value reported for a perfect separation (non-zero mean
/// difference over zero pooled variance).
pub const SEPARATION_SENTINEL: f64 = 1e100;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Pfss,
    Dffss,
    Npfss,
}

impl Method {
    pub const ALL: [Method; 3] = [Method::Pfss, Method::Dffss, Method::Npfss];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Pfss => "pfss",
            Method::Dffss => "dffss",
            Method::Npfss => "npfss",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "pfss" => Ok(Method::Pfss),
            "dffss" => Ok(Method::Dffss),
            "npfss" => Ok(Method::Npfss),
            other => Err(ScanError::invalid(format!("unknown method `{other}`"))),
        }
    }
}

/// Index value of one window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IndexValue {
    pub method: Method,
    pub value: f64,
    /// Grid time where the DFFSS supremum is attained.
    pub argmax_time: Option<f64>,
    /// Set when a DFFSS grid time had zero pooled variance but distinct means.
    pub degenerate: bool,
}

impl IndexValue {
    fn plain(method: Method, value: f64) -> Self {
        Self {
            method,
            value,
            argmax_time: None,
            degenerate: false,
        }
    }
}

/// Variance and mean-difference thresholds for a dataset.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Floors {
    pub var: f64,
    pub diff: f64,
    pub interval: f64,
}

impl Floors {
    pub fn of(ds: &FunctionalDataset) -> Self {
        let scale = ds.value_scale();
        let interval = ds.time_grid()[ds.t() - 1] - ds.time_grid()[0];
        Self {
            var: VARIANCE_FLOOR * scale * scale,
            diff: VARIANCE_FLOOR.sqrt() * scale,
            interval,
        }
    }
}

fn require_three(ds: &FunctionalDataset) -> Result<()> {
    if ds.n() < 3 {
        return Err(ScanError::invalid(format!(
            "index needs at least 3 curves, got {}",
            ds.n()
        )));
    }
    Ok(())
}

/// Functional ANOVA F statistic of `members` against the other sites.
pub fn pfss_index(ds: &FunctionalDataset, members: &[usize]) -> Result<IndexValue> {
    require_three(ds)?;
    let (w, wc) = split(ds.n(), members)?;
    let all: Vec<usize> = (0..ds.n()).collect();
    let grand = group_mean(ds, &all)?.mean_curve;
    let mw = group_mean(ds, &w)?.mean_curve;
    let mwc = group_mean(ds, &wc)?.mean_curve;
    let weights = ds.weights();

    let diff = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| x - y).collect() };
    let between = w.len() as f64 * weighted_norm_sq(&diff(&mw, &grand), weights)
        + wc.len() as f64 * weighted_norm_sq(&diff(&mwc, &grand), weights);

    let mut within = 0.0;
    for (group, mean) in [(&w, &mw), (&wc, &mwc)] {
        for &i in group.iter() {
            within += weighted_norm_sq(&diff(ds.row(i), mean), weights);
        }
    }
    let denom = within / (ds.n() - 2) as f64;
    let floors = Floors::of(ds);
    if denom <= floors.var * floors.interval {
        return Err(ScanError::Degenerate(
            "PFSS denominator is zero: curves are identical within both groups".into(),
        ));
    }
    Ok(IndexValue::plain(Method::Pfss, between / denom))
}

/// Studentised pointwise statistic, shared by the direct and engine paths.
#[inline]
pub(crate) fn studentised(diff: f64, pooled_var: f64, size_factor: f64, floors: &Floors) -> (f64, bool) {
    let diff = diff.abs();
    if pooled_var <= floors.var {
        if diff <= floors.diff {
            (0.0, false)
        } else {
            (SEPARATION_SENTINEL, true)
        }
    } else {
        (diff / (pooled_var * size_factor).sqrt(), false)
    }
}

/// Supremum over grid times of the studentised mean difference.
pub fn dffss_index(ds: &FunctionalDataset, members: &[usize]) -> Result<IndexValue> {
    require_three(ds)?;
    let (w, wc) = split(ds.n(), members)?;
    let mw = group_mean(ds, &w)?.mean_curve;
    let mwc = group_mean(ds, &wc)?.mean_curve;
    let pooled = crate::fdata::pooled_variance_at_t(ds, &w)?;
    let size_factor = 1.0 / w.len() as f64 + 1.0 / wc.len() as f64;
    let floors = Floors::of(ds);

    let mut best = f64::NEG_INFINITY;
    let mut best_k = 0;
    let mut degenerate = false;
    for k in 0..ds.t() {
        let (v, flag) = studentised(mw[k] - mwc[k], pooled[k], size_factor, &floors);
        degenerate |= flag;
        if v > best {
            best = v;
            best_k = k;
        }
    }
    Ok(IndexValue {
        method: Method::Dffss,
        value: best,
        argmax_time: Some(ds.time_grid()[best_k]),
        degenerate,
    })
}

/// Row sums of L² sign functions: row `i` is `Σ_j sign(X_j − X_i)`.
///
/// The matrix depends on the curves only, not on which site carries which
/// curve, so one build serves every relabelling of the same data.
#[derive(Debug, Clone)]
pub struct SignMatrix {
    n: usize,
    t: usize,
    rows: Vec<f64>,
    norm_cache: Vec<f64>,
    weights: Vec<f64>,
}

impl SignMatrix {
    pub fn build(ds: &FunctionalDataset) -> Self {
        let (n, t) = (ds.n(), ds.t());
        let weights = ds.weights().to_vec();
        let mut rows = vec![0.0; n * t];
        let mut norm_cache = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        let mut d = vec![0.0; t];
        for i in 0..n {
            let xi = ds.row(i);
            for j in (i + 1)..n {
                let xj = ds.row(j);
                for k in 0..t {
                    d[k] = xj[k] - xi[k];
                }
                let norm = weighted_norm_sq(&d, &weights).sqrt();
                norm_cache.push(norm);
                if norm > 0.0 {
                    let inv = 1.0 / norm;
                    let (head, tail) = rows.split_at_mut(j * t);
                    let ri = &mut head[i * t..(i + 1) * t];
                    let rj = &mut tail[..t];
                    for k in 0..t {
                        let s = d[k] * inv;
                        ri[k] += s;
                        rj[k] -= s;
                    }
                }
            }
        }
        Self {
            n,
            t,
            rows,
            norm_cache,
            weights,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn t(&self) -> usize {
        self.t
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i * self.t..(i + 1) * self.t]
    }

    pub(crate) fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// `||X_j − X_i||₂` for `i ≠ j`.
    pub fn pair_norm(&self, i: usize, j: usize) -> f64 {
        assert!(i != j && i < self.n && j < self.n);
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        // offset of row a in the packed upper triangle
        let start = a * (2 * self.n - a - 1) / 2;
        self.norm_cache[start + (b - a - 1)]
    }
}

#[inline]
pub(crate) fn npfss_normaliser(inside: usize, n: usize) -> f64 {
    1.0 / ((inside * (n - inside) * n) as f64).sqrt()
}

/// NPFSS index of `members` from a prebuilt sign matrix.
pub fn npfss_index(sm: &SignMatrix, members: &[usize]) -> Result<IndexValue> {
    let (w, _) = split(sm.n(), members)?;
    let mut acc = vec![0.0; sm.t()];
    for &i in &w {
        for (a, r) in acc.iter_mut().zip(sm.row(i)) {
            *a += r;
        }
    }
    let norm = weighted_norm_sq(&acc, sm.weights()).sqrt();
    Ok(IndexValue::plain(Method::Npfss, norm * npfss_normaliser(w.len(), sm.n())))
}

/// NPFSS index by the explicit double sum over (inside, outside) pairs.
/// Costs O(|w|·|w^c|·T); the sign-matrix path is the fast equivalent.
pub fn npfss_index_naive(ds: &FunctionalDataset, members: &[usize]) -> Result<IndexValue> {
    let (w, wc) = split(ds.n(), members)?;
    let t = ds.t();
    let weights = ds.weights();
    let mut acc = vec![0.0; t];
    let mut d = vec![0.0; t];
    for &i in &w {
        let xi = ds.row(i);
        for &j in &wc {
            let xj = ds.row(j);
            for k in 0..t {
                d[k] = xj[k] - xi[k];
            }
            let norm = weighted_norm_sq(&d, weights).sqrt();
            if norm > 0.0 {
                for k in 0..t {
                    acc[k] += d[k] / norm;
                }
            }
        }
    }
    let norm = weighted_norm_sq(&acc, weights).sqrt();
    Ok(IndexValue::plain(Method::Npfss, norm * npfss_normaliser(w.len(), ds.n())))
}

/// Evaluates `method` on one window directly from the curves.
pub fn index_value(ds: &FunctionalDataset, method: Method, members: &[usize]) -> Result<IndexValue> {
    match method {
        Method::Pfss => pfss_index(ds, members),
        Method::Dffss => dffss_index(ds, members),
        Method::Npfss => npfss_index(&SignMatrix::build(ds), members),
    }
}
