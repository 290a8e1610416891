//! Fixed-radius neighbour search with a uniform cell list.
//!
//! A node `j` is a neighbour of fixed node `i` when `|x_i - x_j| < r_i`,
//! strictly, with `r_i` the support radius of node `i`. Lists are sorted by
//! index, which makes every downstream assembly independent of search order.

use crate::cloud::Point;

/// Compressed per-node neighbour lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborTable {
    offsets: Vec<usize>,
    indices: Vec<usize>,
}

impl NeighborTable {
    pub fn from_lists(lists: Vec<Vec<usize>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut indices = Vec::new();
        offsets.push(0);
        for mut l in lists {
            l.sort_unstable();
            indices.extend(l);
            offsets.push(indices.len());
        }
        NeighborTable { offsets, indices }
    }

    /// Number of fixed nodes.
    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.indices[self.offsets[i]..self.offsets[i + 1]]
    }

    /// Total number of (fixed, neighbour) pairs.
    pub fn total(&self) -> usize {
        self.indices.len()
    }

    pub fn iter(&self) -> impl Iterator<Item = &[usize]> + '_ {
        (0..self.len()).map(move |i| self.neighbors(i))
    }
}

fn within(a: &Point, b: &Point, r: f64) -> bool {
    let d2 = (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2);
    d2 < r * r
}

/// Reference O(N M) search.
pub fn brute_force_neighbors(fixed: &[Point], radii: &[f64], others: &[Point]) -> NeighborTable {
    let lists = fixed
        .iter()
        .zip(radii)
        .map(|(p, &r)| (0..others.len()).filter(|&j| within(p, &others[j], r)).collect())
        .collect();
    NeighborTable::from_lists(lists)
}

/// Cell-list search. Cells are at least as wide as the largest radius, so
/// only the 3^d cells around a fixed node need scanning.
pub fn find_neighbors(fixed: &[Point], radii: &[f64], others: &[Point]) -> NeighborTable {
    assert_eq!(fixed.len(), radii.len(), "one radius per fixed node");
    if others.is_empty() || fixed.is_empty() {
        return NeighborTable::from_lists(vec![Vec::new(); fixed.len()]);
    }
    let rmax = radii.iter().copied().fold(0.0, f64::max);
    let mut lo = [f64::INFINITY; 3];
    let mut hi = [f64::NEG_INFINITY; 3];
    for p in others {
        for a in 0..3 {
            lo[a] = lo[a].min(p[a]);
            hi[a] = hi[a].max(p[a]);
        }
    }
    // Grow the cell until the grid has at most a few cells per node.
    let mut cell = if rmax > 0.0 { rmax } else { 1.0 };
    let dims = loop {
        let d: [usize; 3] = std::array::from_fn(|a| (((hi[a] - lo[a]) / cell).floor() as usize) + 1);
        if d[0].saturating_mul(d[1]).saturating_mul(d[2]) <= 4 * others.len() + 64 {
            break d;
        }
        cell *= 2.0;
    };
    let cell_of = |p: &Point| -> [i64; 3] { std::array::from_fn(|a| ((p[a] - lo[a]) / cell).floor() as i64) };
    let flat = |c: [usize; 3]| c[0] + dims[0] * (c[1] + dims[1] * c[2]);
    let mut start = vec![0usize; dims[0] * dims[1] * dims[2] + 1];
    let cells: Vec<usize> = others
        .iter()
        .map(|p| {
            let c = cell_of(p);
            flat(std::array::from_fn(|a| (c[a].max(0) as usize).min(dims[a] - 1)))
        })
        .collect();
    for &c in &cells {
        start[c + 1] += 1;
    }
    for k in 1..start.len() {
        start[k] += start[k - 1];
    }
    let mut fill = start.clone();
    let mut bucket = vec![0usize; others.len()];
    for (j, &c) in cells.iter().enumerate() {
        bucket[fill[c]] = j;
        fill[c] += 1;
    }

    let lists = fixed
        .iter()
        .zip(radii)
        .map(|(p, &r)| {
            let c = cell_of(p);
            let range = |a: usize| {
                let lo_c = (c[a] - 1).max(0);
                let hi_c = (c[a] + 1).min(dims[a] as i64 - 1);
                lo_c..=hi_c
            };
            let mut out = Vec::new();
            for cz in range(2) {
                for cy in range(1) {
                    for cx in range(0) {
                        let k = flat([cx as usize, cy as usize, cz as usize]);
                        for &j in &bucket[start[k]..start[k + 1]] {
                            if within(p, &others[j], r) {
                                out.push(j);
                            }
                        }
                    }
                }
            }
            out
        })
        .collect();
    NeighborTable::from_lists(lists)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn boundary_distance_is_excluded() {
        let t = find_neighbors(&[[0.0; 3]], &[1.0], &[[1.0, 0.0, 0.0], [0.5, 0.0, 0.0]]);
        assert_eq!(t.neighbors(0), &[1]);
    }

    #[test]
    fn far_fixed_node_has_no_neighbours() {
        let t = find_neighbors(&[[100.0, 0.0, 0.0]], &[1.0], &[[0.0; 3], [0.5, 0.5, 0.0]]);
        assert!(t.neighbors(0).is_empty());
    }
}
