//! Built-in site layout for the simulation study.
//!
//! The study design uses 94 administrative areas with an 8-area cluster around
//! the capital. Their coordinates are not distributed with the design, so this
//! module ships a surrogate: a 10 × 10 lattice with six corner cells removed
//! (94 sites) and a fixed pseudo-random jitter that removes distance ties. The
//! default true cluster is the 8 sites nearest to a north-central site, which
//! is always one of the circular candidate windows.

use crate::geometry::{SiteGrid, SiteRecord};
use crate::rng::splitmix64;

pub const SURROGATE_SITES: usize = 94;
pub const CAPITAL_CLUSTER_SIZE: usize = 8;

const REMOVED: [(usize, usize); 6] = [(0, 0), (1, 0), (0, 1), (9, 0), (0, 9), (9, 9)];
// lattice cell of the cluster centre (column, row); rows grow northwards
const CAPITAL_CELL: (usize, usize) = (5, 7);

fn jitter(col: usize, row: usize, axis: u64) -> f64 {
    let h = splitmix64(((col as u64) << 32) ^ ((row as u64) << 8) ^ axis ^ 0x5eed);
    ((h >> 11) as f64 / (1u64 << 53) as f64 - 0.5) * 0.6
}

fn cells() -> impl Iterator<Item = (usize, usize)> {
    (0..10)
        .flat_map(|row| (0..10).map(move |col| (col, row)))
        .filter(|c| !REMOVED.contains(c))
}

/// The 94-site surrogate layout, ids `A01`..`A94`.
pub fn surrogate_sites() -> Vec<SiteRecord> {
    cells()
        .enumerate()
        .map(|(i, (col, row))| {
            SiteRecord::new(
                format!("A{:02}", i + 1),
                col as f64 + jitter(col, row, 1),
                row as f64 + jitter(col, row, 2),
            )
        })
        .collect()
}

pub fn surrogate_grid() -> SiteGrid {
    SiteGrid::new(surrogate_sites()).expect("surrogate layout is valid")
}

/// Index of the cluster centre in [`surrogate_sites`].
pub fn capital_site() -> usize {
    cells()
        .position(|c| c == CAPITAL_CELL)
        .expect("capital cell is on the lattice")
}

/// Sorted indices of the 8-site capital-region cluster.
pub fn capital_cluster(grid: &SiteGrid) -> Vec<usize> {
    let mut members: Vec<usize> = grid.neighbour_order(capital_site())[..CAPITAL_CLUSTER_SIZE].to_vec();
    members.sort_unstable();
    members
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::enumerate_candidates;

    #[test]
    fn layout_has_94_valid_sites() {
        let g = surrogate_grid();
        assert_eq!(g.n(), SURROGATE_SITES);
        assert_eq!(g.site(0).id, "A01");
    }

    #[test]
    fn capital_cluster_is_a_candidate() {
        let g = surrogate_grid();
        let cluster = capital_cluster(&g);
        assert_eq!(cluster.len(), 8);
        assert!(cluster.contains(&capital_site()));
        let order = g.neighbour_order(capital_site());
        let (d8, d9) = (
            g.distance(capital_site(), order[7]),
            g.distance(capital_site(), order[8]),
        );
        assert!(d9 > d8);
        let cands = enumerate_candidates(&g, 0.5).unwrap();
        assert!(cands.position_of(&cluster).is_some());
        assert!(cands.iter().all(|w| w.len() <= 47));
    }
}
