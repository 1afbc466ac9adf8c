//! Spatial sites and the family of circular candidate windows.
//!
//! A candidate window is the set of sites inside a closed disc centred on one
//! site whose boundary passes through another (possibly the same) site. Windows
//! are capped at `floor(n * max_fraction)` sites.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Result, ScanError};

/// One input row of a sites file.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SiteRecord {
    pub id: String,
    pub x: f64,
    pub y: f64,
}

impl SiteRecord {
    pub fn new(id: impl Into<String>, x: f64, y: f64) -> Self {
        Self { id: id.into(), x, y }
    }
}

/// Planar site coordinates with a precomputed Euclidean distance matrix.
#[derive(Debug, Clone)]
pub struct SiteGrid {
    sites: Vec<SiteRecord>,
    dist: Vec<f64>,
}

impl SiteGrid {
    /// Validates `records` and precomputes pairwise distances.
    pub fn new(records: Vec<SiteRecord>) -> Result<Self> {
        if records.len() < 2 {
            return Err(ScanError::invalid(format!(
                "a site grid needs at least 2 sites, got {}",
                records.len()
            )));
        }
        let mut seen_ids: HashMap<&str, usize> = HashMap::with_capacity(records.len());
        let mut seen_xy: HashMap<(u64, u64), usize> = HashMap::with_capacity(records.len());
        for (i, r) in records.iter().enumerate() {
            if !r.x.is_finite() || !r.y.is_finite() {
                return Err(ScanError::NonFiniteCoordinate(r.id.clone()));
            }
            if seen_ids.insert(r.id.as_str(), i).is_some() {
                return Err(ScanError::DuplicateId(r.id.clone()));
            }
            // -0.0 and 0.0 are the same point
            let key = ((r.x + 0.0).to_bits(), (r.y + 0.0).to_bits());
            if let Some(&j) = seen_xy.get(&key) {
                return Err(ScanError::DuplicateCoordinates {
                    first: records[j].id.clone(),
                    second: r.id.clone(),
                    x: r.x,
                    y: r.y,
                });
            }
            seen_xy.insert(key, i);
        }

        let n = records.len();
        let mut dist = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = (records[i].x - records[j].x).hypot(records[i].y - records[j].y);
                dist[i * n + j] = d;
                dist[j * n + i] = d;
            }
        }
        Ok(Self {
            sites: records,
            dist,
        })
    }

    pub fn n(&self) -> usize {
        self.sites.len()
    }

    pub fn sites(&self) -> &[SiteRecord] {
        &self.sites
    }

    pub fn site(&self, i: usize) -> &SiteRecord {
        &self.sites[i]
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.sites.iter().map(|s| s.id.as_str())
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.sites.iter().position(|s| s.id == id)
    }

    #[inline]
    pub fn distance(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n() + j]
    }

    /// Site indices ordered by distance from `center` (ties by index).
    pub fn neighbour_order(&self, center: usize) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.n()).collect();
        order.sort_by(|&a, &b| {
            self.distance(center, a)
                .total_cmp(&self.distance(center, b))
                .then(a.cmp(&b))
        });
        order
    }
}

/// A circular window: every site within `radius` of `center` (closed disc).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateCluster {
    members: Vec<usize>,
    center: usize,
    radius: f64,
}

impl CandidateCluster {
    /// Builds the window centred on `center` with the given radius.
    pub fn from_disc(grid: &SiteGrid, center: usize, radius: f64) -> Self {
        let members = (0..grid.n())
            .filter(|&j| grid.distance(center, j) <= radius)
            .collect();
        Self {
            members,
            center,
            radius,
        }
    }

    /// Sorted site indices inside the window.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn center(&self) -> usize {
        self.center
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    pub fn contains(&self, site: usize) -> bool {
        self.members.binary_search(&site).is_ok()
    }

    pub fn is_disjoint(&self, other: &CandidateCluster) -> bool {
        let (mut a, mut b) = (0, 0);
        while a < self.members.len() && b < other.members.len() {
            match self.members[a].cmp(&other.members[b]) {
                std::cmp::Ordering::Less => a += 1,
                std::cmp::Ordering::Greater => b += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }
}

/// Windows sharing a centre, expressed as prefixes of that centre's neighbour order.
#[derive(Debug, Clone)]
pub(crate) struct CenterPlan {
    pub order: Vec<usize>,
    /// `(prefix_len, window_index)` in increasing prefix length.
    pub prefixes: Vec<(usize, usize)>,
}

/// The deduplicated candidate family, sorted by `(size, center, radius)`.
///
/// Window position in this list doubles as the argmax tie-break order.
#[derive(Debug, Clone)]
pub struct CandidateSet {
    windows: Vec<CandidateCluster>,
    n_sites: usize,
    pub(crate) plans: Vec<CenterPlan>,
}

impl CandidateSet {
    pub fn windows(&self) -> &[CandidateCluster] {
        &self.windows
    }

    pub fn len(&self) -> usize {
        self.windows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.windows.is_empty()
    }

    pub fn get(&self, i: usize) -> &CandidateCluster {
        &self.windows[i]
    }

    pub fn iter(&self) -> std::slice::Iter<'_, CandidateCluster> {
        self.windows.iter()
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Position of the window with exactly these (sorted) members.
    pub fn position_of(&self, members: &[usize]) -> Option<usize> {
        self.windows.iter().position(|w| w.members() == members)
    }
}

/// Enumerates every distinct circular window holding between 1 and
/// `floor(n * max_fraction)` sites.
pub fn enumerate_candidates(grid: &SiteGrid, max_fraction: f64) -> Result<CandidateSet> {
    if !(max_fraction > 0.0 && max_fraction <= 0.5) {
        return Err(ScanError::invalid(format!(
            "max_fraction must lie in (0, 0.5], got {max_fraction}"
        )));
    }
    let n = grid.n();
    let cap = (n as f64 * max_fraction).floor() as usize;

    let orders: Vec<Vec<usize>> = (0..n).map(|c| grid.neighbour_order(c)).collect();
    let mut by_members: HashMap<Vec<usize>, usize> = HashMap::new();
    // (center, radius, prefix_len, members)
    let mut raw: Vec<(usize, f64, usize, Vec<usize>)> = Vec::new();

    for (center, order) in orders.iter().enumerate() {
        let dists: Vec<f64> = order.iter().map(|&j| grid.distance(center, j)).collect();
        let mut k = 0;
        while k < n {
            let radius = dists[k];
            // closed disc: take every site tied at this radius
            let len = dists.partition_point(|&d| d <= radius);
            k = len;
            if len > cap {
                break;
            }
            let mut members = order[..len].to_vec();
            members.sort_unstable();
            // centers ascend, radii ascend within a center: first hit is the representative
            if !by_members.contains_key(&members) {
                by_members.insert(members.clone(), raw.len());
                raw.push((center, radius, len, members));
            }
        }
    }

    let mut idx: Vec<usize> = (0..raw.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ca, ra, la, _) = &raw[a];
        let (cb, rb, lb, _) = &raw[b];
        la.cmp(lb).then(ca.cmp(cb)).then(ra.total_cmp(rb))
    });

    let mut plans: Vec<CenterPlan> = Vec::new();
    let mut plan_of_center: HashMap<usize, usize> = HashMap::new();
    let mut windows = Vec::with_capacity(raw.len());
    for (window_index, &r) in idx.iter().enumerate() {
        let (center, radius, len, members) = &raw[r];
        let p = *plan_of_center.entry(*center).or_insert_with(|| {
            plans.push(CenterPlan {
                order: orders[*center].clone(),
                prefixes: Vec::new(),
            });
            plans.len() - 1
        });
        plans[p].prefixes.push((*len, window_index));
        windows.push(CandidateCluster {
            members: members.clone(),
            center: *center,
            radius: *radius,
        });
    }
    for plan in &mut plans {
        plan.prefixes.sort_unstable();
    }

    Ok(CandidateSet {
        windows,
        n_sites: n,
        plans,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn grid(points: &[(f64, f64)]) -> SiteGrid {
        SiteGrid::new(
            points
                .iter()
                .enumerate()
                .map(|(i, &(x, y))| SiteRecord::new(format!("s{i}"), x, y))
                .collect(),
        )
        .unwrap()
    }

    /// Exhaustive (i, j) disc enumeration with set-based dedup.
    fn brute_force_sets(g: &SiteGrid, cap: usize) -> BTreeSet<Vec<usize>> {
        let n = g.n();
        let mut out = BTreeSet::new();
        for i in 0..n {
            for j in 0..n {
                let r = g.distance(i, j);
                let m: Vec<usize> = (0..n).filter(|&k| g.distance(i, k) <= r).collect();
                if !m.is_empty() && m.len() <= cap {
                    out.insert(m);
                }
            }
        }
        out
    }

    #[test]
    fn unit_segment_distance() {
        let g = grid(&[(0.0, 0.0), (1.0, 0.0)]);
        assert_eq!(g.distance(0, 1), 1.0);
        assert_eq!(g.distance(1, 0), 1.0);
        assert_eq!(g.distance(0, 0), 0.0);
    }

    #[test]
    fn pythagorean_distance() {
        let g = grid(&[(0.0, 0.0), (3.0, 4.0)]);
        assert_eq!(g.distance(0, 1), 5.0);
    }

    #[test]
    fn rejects_duplicate_id() {
        let err = SiteGrid::new(vec![
            SiteRecord::new("a", 0.0, 0.0),
            SiteRecord::new("a", 1.0, 0.0),
        ])
        .unwrap_err();
        assert!(matches!(err, ScanError::DuplicateId(ref id) if id == "a"));
        assert!(err.to_string().contains("duplicate id"));
    }

    #[test]
    fn rejects_duplicate_coordinates() {
        let err = SiteGrid::new(vec![
            SiteRecord::new("a", 0.0, 0.0),
            SiteRecord::new("b", -0.0, 0.0),
        ])
        .unwrap_err();
        assert!(matches!(err, ScanError::DuplicateCoordinates { ref second, .. } if second == "b"));
    }

    #[test]
    fn rejects_non_finite_and_tiny_grids() {
        let err = SiteGrid::new(vec![
            SiteRecord::new("a", 0.0, 0.0),
            SiteRecord::new("b", f64::NAN, 0.0),
        ])
        .unwrap_err();
        assert!(matches!(err, ScanError::NonFiniteCoordinate(ref id) if id == "b"));
        assert!(SiteGrid::new(vec![SiteRecord::new("a", 0.0, 0.0)]).is_err());
        assert!(SiteGrid::new(vec![]).is_err());
    }

    #[test]
    fn collinear_three_sites_only_singletons() {
        let g = grid(&[(0.0, 0.0), (1.0, 0.0), (3.0, 0.0)]);
        let c = enumerate_candidates(&g, 0.5).unwrap();
        let sets: Vec<Vec<usize>> = c.iter().map(|w| w.members().to_vec()).collect();
        assert_eq!(sets, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn unit_square_closed_discs_give_only_singletons() {
        // each corner has two neighbours tied at distance 1, so every disc
        // reaching a neighbour already holds 3 sites > floor(4/2)
        let g = grid(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
        let c = enumerate_candidates(&g, 0.5).unwrap();
        let got: BTreeSet<Vec<usize>> = c.iter().map(|w| w.members().to_vec()).collect();
        assert_eq!(got, brute_force_sets(&g, 2));
        assert_eq!(c.len(), 4);
        assert!(c.iter().all(|w| w.len() == 1));
    }

    #[test]
    fn rectangle_yields_short_edge_pairs() {
        let g = grid(&[(0.0, 0.0), (1.0, 0.0), (1.0, 1.5), (0.0, 1.5)]);
        let c = enumerate_candidates(&g, 0.5).unwrap();
        let got: BTreeSet<Vec<usize>> = c.iter().map(|w| w.members().to_vec()).collect();
        assert_eq!(got, brute_force_sets(&g, 2));
        let pairs: Vec<_> = c.iter().filter(|w| w.len() == 2).collect();
        assert_eq!(pairs.len(), 2);
        assert_eq!(pairs[0].members(), &[0, 1]);
        assert_eq!(pairs[1].members(), &[2, 3]);
    }

    #[test]
    fn sorted_and_representatives_minimal() {
        let g = grid(&[(0.0, 0.0), (1.0, 0.0), (2.5, 0.0), (2.5, 1.2), (5.0, 3.0), (0.3, 2.0)]);
        let c = enumerate_candidates(&g, 0.5).unwrap();
        for pair in c.windows().windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            assert!(
                (a.len(), a.center()) < (b.len(), b.center())
                    || ((a.len(), a.center()) == (b.len(), b.center()) && a.radius() < b.radius())
            );
        }
        // {0,1} is reachable from centre 0 and centre 1; centre 0 is kept
        let w = c.iter().find(|w| w.members() == [0, 1]).unwrap();
        assert_eq!(w.center(), 0);
    }

    #[test]
    fn rejects_bad_fraction() {
        let g = grid(&[(0.0, 0.0), (1.0, 0.0)]);
        assert!(enumerate_candidates(&g, 0.0).is_err());
        assert!(enumerate_candidates(&g, 0.51).is_err());
    }

    #[test]
    fn prefix_plans_cover_every_window_once() {
        let g = grid(&[(0.0, 0.0), (1.0, 0.1), (2.0, 0.3), (0.4, 1.7), (3.3, 2.2), (1.1, 2.9), (2.2, 1.4)]);
        let c = enumerate_candidates(&g, 0.5).unwrap();
        let mut seen = vec![0usize; c.len()];
        for plan in &c.plans {
            for &(len, wi) in &plan.prefixes {
                let mut m = plan.order[..len].to_vec();
                m.sort_unstable();
                assert_eq!(m, c.get(wi).members());
                seen[wi] += 1;
            }
        }
        assert!(seen.iter().all(|&s| s == 1));
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn points() -> impl Strategy<Value = Vec<(f64, f64)>> {
            // integer lattice points produce plenty of distance ties
            prop::collection::btree_set((0i32..8, 0i32..8), 2..16).prop_map(|s| {
                s.into_iter().map(|(x, y)| (x as f64, y as f64)).collect()
            })
        }

        proptest! {
            #[test]
            fn windows_are_exact_discs(pts in points(), frac in 0.05f64..=0.5) {
                let g = grid(&pts);
                let c = enumerate_candidates(&g, frac).unwrap();
                let cap = (g.n() as f64 * frac).floor() as usize;
                let mut sets = BTreeSet::new();
                for w in c.iter() {
                    let disc = CandidateCluster::from_disc(&g, w.center(), w.radius());
                    prop_assert_eq!(disc.members(), w.members());
                    prop_assert!(w.contains(w.center()));
                    prop_assert!(!w.is_empty() && w.len() <= cap);
                    prop_assert!(sets.insert(w.members().to_vec()));
                }
                prop_assert_eq!(sets, brute_force_sets(&g, cap));
                prop_assert!(c.len() <= g.n() * g.n());
            }

            #[test]
            fn larger_fraction_keeps_candidates(pts in points(), f1 in 0.05f64..=0.5, f2 in 0.05f64..=0.5) {
                let (lo, hi) = if f1 <= f2 { (f1, f2) } else { (f2, f1) };
                let g = grid(&pts);
                let small = enumerate_candidates(&g, lo).unwrap();
                let big = enumerate_candidates(&g, hi).unwrap();
                for w in small.iter() {
                    prop_assert!(big.iter().any(|v| v == w));
                }
            }
        }
    }
}
