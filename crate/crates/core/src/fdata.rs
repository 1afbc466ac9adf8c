//! Curves sampled on a shared time grid, and the L² machinery on top of them.
//!
//! Integrals use the trapezoid rule on the observed grid. Sums run left to
//! right in a fixed order so results are reproducible bit for bit.

use crate::error::{Result, ScanError};

/// `n` curves observed at the same `T` grid times, one per site.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalDataset {
    site_ids: Vec<String>,
    time_grid: Vec<f64>,
    weights: Vec<f64>,
    /// row-major n × T
    values: Vec<f64>,
}

impl FunctionalDataset {
    pub fn new(site_ids: Vec<String>, time_grid: Vec<f64>, rows: Vec<Vec<f64>>) -> Result<Self> {
        let t = time_grid.len();
        if t < 2 {
            return Err(ScanError::invalid(format!(
                "time grid needs at least 2 points, got {t}"
            )));
        }
        if time_grid.iter().any(|x| !x.is_finite()) {
            return Err(ScanError::invalid("time grid contains a non-finite value"));
        }
        if time_grid.windows(2).any(|p| p[1] <= p[0]) {
            return Err(ScanError::invalid("time grid must be strictly increasing"));
        }
        if site_ids.len() != rows.len() {
            return Err(ScanError::LengthMismatch {
                expected: site_ids.len(),
                got: rows.len(),
            });
        }
        let mut values = Vec::with_capacity(rows.len() * t);
        for (id, row) in site_ids.iter().zip(&rows) {
            if row.len() != t {
                return Err(ScanError::LengthMismatch {
                    expected: t,
                    got: row.len(),
                });
            }
            if let Some(k) = row.iter().position(|v| !v.is_finite()) {
                return Err(ScanError::NonFiniteValue {
                    id: id.clone(),
                    time_index: k,
                });
            }
            values.extend_from_slice(row);
        }
        let weights = trapezoid_weights(&time_grid);
        Ok(Self {
            site_ids,
            time_grid,
            weights,
            values,
        })
    }

    /// Number of curves.
    pub fn n(&self) -> usize {
        self.site_ids.len()
    }

    /// Number of grid times.
    pub fn t(&self) -> usize {
        self.time_grid.len()
    }

    pub fn site_ids(&self) -> &[String] {
        &self.site_ids
    }

    pub fn time_grid(&self) -> &[f64] {
        &self.time_grid
    }

    /// Trapezoid quadrature weights for the grid.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        let t = self.t();
        &self.values[i * t..(i + 1) * t]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.t())
    }

    /// Largest absolute value in the data, used to scale degeneracy thresholds.
    pub fn value_scale(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// Dataset whose site `s` carries the curve currently at row `perm[s]`.
    /// Site ids stay in place.
    pub fn relabelled(&self, perm: &[usize]) -> Result<Self> {
        check_permutation(perm, self.n())?;
        let mut values = Vec::with_capacity(self.values.len());
        for &p in perm {
            values.extend_from_slice(self.row(p));
        }
        Ok(Self {
            site_ids: self.site_ids.clone(),
            time_grid: self.time_grid.clone(),
            weights: self.weights.clone(),
            values,
        })
    }

    /// Applies `f(t_index, value)` to every entry.
    pub fn map_values(&self, mut f: impl FnMut(usize, f64) -> f64) -> Self {
        let t = self.t();
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(k, &v)| f(k % t, v))
            .collect();
        Self {
            values,
            ..self.clone()
        }
    }
}

pub(crate) fn check_permutation(perm: &[usize], n: usize) -> Result<()> {
    if perm.len() != n {
        return Err(ScanError::LengthMismatch {
            expected: n,
            got: perm.len(),
        });
    }
    let mut seen = vec![false; n];
    for &p in perm {
        if p >= n || std::mem::replace(&mut seen[p], true) {
            return Err(ScanError::invalid("not a permutation"));
        }
    }
    Ok(())
}

/// Composite trapezoid weights: `∫ f ≈ Σ w_k f(t_k)`.
pub fn trapezoid_weights(grid: &[f64]) -> Vec<f64> {
    let t = grid.len();
    let mut w = vec![0.0; t];
    for k in 1..t {
        let h = 0.5 * (grid[k] - grid[k - 1]);
        w[k - 1] += h;
        w[k] += h;
    }
    w
}

/// `∫ f g dt` by the trapezoid rule on `grid`.
pub fn l2_inner(f: &[f64], g: &[f64], grid: &[f64]) -> Result<f64> {
    if f.len() != grid.len() {
        return Err(ScanError::LengthMismatch {
            expected: grid.len(),
            got: f.len(),
        });
    }
    if g.len() != grid.len() {
        return Err(ScanError::LengthMismatch {
            expected: grid.len(),
            got: g.len(),
        });
    }
    let w = trapezoid_weights(grid);
    Ok(weighted_inner(f, g, &w))
}

pub fn l2_norm_sq(f: &[f64], grid: &[f64]) -> Result<f64> {
    l2_inner(f, f, grid)
}

#[inline]
pub(crate) fn weighted_inner(f: &[f64], g: &[f64], w: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..w.len() {
        acc += w[k] * f[k] * g[k];
    }
    acc
}

#[inline]
pub(crate) fn weighted_norm_sq(f: &[f64], w: &[f64]) -> f64 {
    let mut acc = 0.0;
    for k in 0..w.len() {
        acc += w[k] * f[k] * f[k];
    }
    acc
}

/// Mean curve of a group of sites.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupSummary {
    pub mean_curve: Vec<f64>,
    pub member_count: usize,
}

pub fn group_mean(ds: &FunctionalDataset, members: &[usize]) -> Result<GroupSummary> {
    if members.is_empty() {
        return Err(ScanError::invalid("group mean of an empty member set"));
    }
    let mut sum = vec![0.0; ds.t()];
    for &i in members {
        if i >= ds.n() {
            return Err(ScanError::invalid(format!(
                "site index {i} out of range for {} curves",
                ds.n()
            )));
        }
        for (s, v) in sum.iter_mut().zip(ds.row(i)) {
            *s += v;
        }
    }
    let m = members.len() as f64;
    sum.iter_mut().for_each(|s| *s /= m);
    Ok(GroupSummary {
        mean_curve: sum,
        member_count: members.len(),
    })
}

/// Splits `0..n` into (inside, outside) after validating `members`.
pub(crate) fn split(n: usize, members: &[usize]) -> Result<(Vec<usize>, Vec<usize>)> {
    let mut inside = vec![false; n];
    for &i in members {
        if i >= n {
            return Err(ScanError::invalid(format!(
                "site index {i} out of range for {n} curves"
            )));
        }
        if std::mem::replace(&mut inside[i], true) {
            return Err(ScanError::invalid(format!("site index {i} repeated")));
        }
    }
    let (w, wc): (Vec<usize>, Vec<usize>) = (0..n).partition(|&i| inside[i]);
    if w.is_empty() || wc.is_empty() {
        return Err(ScanError::invalid(
            "window and its complement must both be non-empty",
        ));
    }
    Ok((w, wc))
}

/// Pooled two-group sample variance at each grid time, divisor `n - 2`.
pub fn pooled_variance_at_t(ds: &FunctionalDataset, members: &[usize]) -> Result<Vec<f64>> {
    if ds.n() < 3 {
        return Err(ScanError::invalid(format!(
            "pooled variance needs at least 3 curves, got {}",
            ds.n()
        )));
    }
    let (w, wc) = split(ds.n(), members)?;
    let mw = group_mean(ds, &w)?.mean_curve;
    let mwc = group_mean(ds, &wc)?.mean_curve;
    let mut ss = vec![0.0; ds.t()];
    for (group, mean) in [(&w, &mw), (&wc, &mwc)] {
        for &i in group.iter() {
            for ((s, x), m) in ss.iter_mut().zip(ds.row(i)).zip(mean) {
                let d = x - m;
                *s += d * d;
            }
        }
    }
    let denom = (ds.n() - 2) as f64;
    ss.iter_mut().for_each(|s| *s /= denom);
    Ok(ss)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn unit_grid(t: usize) -> Vec<f64> {
        (0..t).map(|k| k as f64 / (t - 1) as f64).collect()
    }

    fn dataset(rows: Vec<Vec<f64>>, grid: Vec<f64>) -> FunctionalDataset {
        let ids = (0..rows.len()).map(|i| format!("s{i}")).collect();
        FunctionalDataset::new(ids, grid, rows).unwrap()
    }

    /// Small deterministic generator so oracle tests need no extra state.
    fn lcg_rows(n: usize, t: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut s = seed;
        (0..n)
            .map(|_| {
                (0..t)
                    .map(|_| {
                        s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                        ((s >> 11) as f64 / (1u64 << 53) as f64) * 4.0 - 2.0
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn integral_of_one_is_interval_length() {
        for grid in [unit_grid(2), unit_grid(7), vec![0.0, 0.1, 0.5, 0.55, 1.0]] {
            let one = vec![1.0; grid.len()];
            assert!((l2_inner(&one, &one, &grid).unwrap() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn linear_integrand_is_exact() {
        let grid = unit_grid(101);
        let ones = vec![1.0; 101];
        let v = l2_inner(&grid, &ones, &grid).unwrap();
        assert!((v - 0.5).abs() < 1e-15, "{v}");
    }

    #[test]
    fn zero_function_and_norms() {
        let grid = unit_grid(11);
        let zero = vec![0.0; 11];
        let g: Vec<f64> = grid.iter().map(|t| t.sin()).collect();
        assert_eq!(l2_inner(&zero, &g, &grid).unwrap(), 0.0);
        assert_eq!(l2_norm_sq(&zero, &grid).unwrap(), 0.0);
        assert!((l2_norm_sq(&[2.0; 11], &grid).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn t_squared_within_trapezoid_error() {
        let grid = unit_grid(101);
        let v = l2_norm_sq(&grid, &grid).unwrap();
        // composite trapezoid error for t² is h²/6 = 1/60000
        assert!((v - 1.0 / 3.0).abs() < 1e-4);
        assert!((v - (1.0 / 3.0 + 1.0 / 60000.0)).abs() < 1e-12);
    }

    #[test]
    fn inner_length_mismatch() {
        let grid = unit_grid(3);
        assert!(matches!(
            l2_inner(&[1.0, 2.0], &[1.0, 2.0, 3.0], &grid),
            Err(ScanError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn dataset_validation() {
        let ids = vec!["a".to_string(), "b".to_string()];
        assert!(FunctionalDataset::new(ids.clone(), vec![0.0], vec![vec![1.0], vec![1.0]]).is_err());
        assert!(FunctionalDataset::new(ids.clone(), vec![0.0, 0.0], vec![vec![1.0; 2]; 2]).is_err());
        assert!(FunctionalDataset::new(ids.clone(), vec![0.0, 1.0], vec![vec![1.0; 3]; 2]).is_err());
        let err = FunctionalDataset::new(ids, vec![0.0, 1.0], vec![vec![1.0, 1.0], vec![f64::INFINITY, 0.0]])
            .unwrap_err();
        assert!(matches!(err, ScanError::NonFiniteValue { ref id, time_index: 0 } if id == "b"));
    }

    #[test]
    fn group_mean_cases() {
        let ds = dataset(vec![vec![0.0; 4], vec![2.0; 4], vec![1.0, 2.0, 3.0, 4.0]], unit_grid(4));
        assert_eq!(group_mean(&ds, &[2]).unwrap().mean_curve, vec![1.0, 2.0, 3.0, 4.0]);
        let g = group_mean(&ds, &[0, 1]).unwrap();
        assert_eq!(g.mean_curve, vec![1.0; 4]);
        assert_eq!(g.member_count, 2);
        assert!(group_mean(&ds, &[]).is_err());
        assert!(group_mean(&ds, &[5]).is_err());
    }

    #[test]
    fn group_mean_matches_naive_loop() {
        let rows = lcg_rows(9, 13, 7);
        let ds = dataset(rows.clone(), unit_grid(13));
        let members = [0, 2, 3, 6, 8];
        let got = group_mean(&ds, &members).unwrap().mean_curve;
        for k in 0..13 {
            let mut s = 0.0;
            for &i in &members {
                s += rows[i][k];
            }
            assert!((got[k] - s / 5.0).abs() < 1e-15);
        }
    }

    #[test]
    fn pooled_variance_cases() {
        let same = dataset(vec![vec![3.0, 1.0, 4.0]; 5], unit_grid(3));
        assert_eq!(pooled_variance_at_t(&same, &[1, 2]).unwrap(), vec![0.0; 3]);

        let consts = dataset(
            vec![vec![0.0; 5], vec![1.0; 5], vec![2.0; 5], vec![3.0; 5]],
            unit_grid(5),
        );
        let v = pooled_variance_at_t(&consts, &[1, 3]).unwrap();
        assert!(v.iter().all(|&x| (x - 2.0).abs() < 1e-15), "{v:?}");

        assert!(pooled_variance_at_t(&consts, &[]).is_err());
        assert!(pooled_variance_at_t(&consts, &[0, 1, 2, 3]).is_err());
        let two = dataset(vec![vec![0.0; 2], vec![1.0; 2]], unit_grid(2));
        assert!(pooled_variance_at_t(&two, &[0]).is_err());
    }

    #[test]
    fn pooled_variance_matches_scalar_oracle() {
        let rows = lcg_rows(8, 21, 99);
        let ds = dataset(rows.clone(), unit_grid(21));
        let w = [1usize, 4, 5];
        let v = pooled_variance_at_t(&ds, &w).unwrap();
        for k in 0..21 {
            // textbook: ((n1-1) s1² + (n2-1) s2²) / (n1 + n2 - 2)
            let a: Vec<f64> = w.iter().map(|&i| rows[i][k]).collect();
            let b: Vec<f64> = (0..8).filter(|i| !w.contains(i)).map(|i| rows[i][k]).collect();
            let var = |x: &[f64]| {
                let m = x.iter().sum::<f64>() / x.len() as f64;
                x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() - 1) as f64
            };
            let pooled = ((a.len() - 1) as f64 * var(&a) + (b.len() - 1) as f64 * var(&b)) / 6.0;
            assert!((v[k] - pooled).abs() < 1e-13);
        }
    }

    #[test]
    fn relabel_rejects_non_permutations() {
        let ds = dataset(lcg_rows(3, 2, 1), unit_grid(2));
        assert!(ds.relabelled(&[0, 0, 1]).is_err());
        assert!(ds.relabelled(&[0, 1]).is_err());
        let r = ds.relabelled(&[2, 0, 1]).unwrap();
        assert_eq!(r.row(0), ds.row(2));
    }

    proptest! {
        #[test]
        fn inner_symmetric_bilinear_cauchy_schwarz(
            f in prop::collection::vec(-5.0f64..5.0, 12),
            g in prop::collection::vec(-5.0f64..5.0, 12),
            h in prop::collection::vec(-5.0f64..5.0, 12),
            a in -3.0f64..3.0,
        ) {
            let grid = unit_grid(12);
            let fg = l2_inner(&f, &g, &grid).unwrap();
            prop_assert!((fg - l2_inner(&g, &f, &grid).unwrap()).abs() < 1e-12);
            let af_h: Vec<f64> = f.iter().zip(&h).map(|(x, y)| a * x + y).collect();
            let lhs = l2_inner(&af_h, &g, &grid).unwrap();
            let rhs = a * fg + l2_inner(&h, &g, &grid).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-10);
            let nf = l2_norm_sq(&f, &grid).unwrap();
            let ng = l2_norm_sq(&g, &grid).unwrap();
            prop_assert!(nf >= 0.0);
            prop_assert!(fg * fg <= nf * ng * (1.0 + 1e-12) + 1e-12);
        }

        #[test]
        fn pooled_variance_shift_invariant(seed in 0u64..1000, shift in prop::collection::vec(-50.0f64..50.0, 9)) {
            let rows = lcg_rows(7, 9, seed);
            let ds = dataset(rows.clone(), unit_grid(9));
            let shifted = ds.map_values(|k, v| v + shift[k]);
            let a = pooled_variance_at_t(&ds, &[0, 3]).unwrap();
            let b = pooled_variance_at_t(&shifted, &[0, 3]).unwrap();
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn whole_set_mean_is_grand_mean() {
        let rows = lcg_rows(6, 5, 3);
        let ds = dataset(rows.clone(), unit_grid(5));
        let all: Vec<usize> = (0..6).collect();
        let m = group_mean(&ds, &all).unwrap().mean_curve;
        for k in 0..5 {
            let s: f64 = rows.iter().map(|r| r[k]).sum::<f64>() / 6.0;
            assert!((m[k] - s).abs() < 1e-15);
        }
    }
}
