//! Exact k-nearest-neighbour distance tables.
//!
//! The default search is a k-d tree with exact backtracking. Pruning uses
//! the incremental cell-distance bound of Arya and Mount, so each query only
//! descends into cells that can still hold one of the `L` closest points.
//! The brute-force search is kept as an oracle for the tree.

use rayon::prelude::*;

use super::cloud::{squared_distance, PointCloud};
use crate::error::{Error, Result};

/// Distances from every point to its 1st..L-th nearest neighbour (self excluded).
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborTable {
    dist: Vec<f64>,
    n: usize,
    max_rank: usize,
}

impl NeighborTable {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn max_rank(&self) -> usize {
        self.max_rank
    }

    /// Neighbour distances of point `i`, ordered by rank.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.max_rank..(i + 1) * self.max_rank]
    }

    /// Distance from point `i` to its `rank`-th neighbour (1-based rank).
    pub fn get(&self, i: usize, rank: usize) -> f64 {
        assert!(rank >= 1 && rank <= self.max_rank, "rank {rank} outside 1..={}", self.max_rank);
        self.dist[i * self.max_rank + rank - 1]
    }

    /// All distances at one rank, one per point.
    pub fn rank_column(&self, rank: usize) -> impl Iterator<Item = f64> + '_ {
        assert!(rank >= 1 && rank <= self.max_rank, "rank {rank} outside 1..={}", self.max_rank);
        self.dist.iter().skip(rank - 1).step_by(self.max_rank).copied()
    }

    /// Number of zero distances among ranks `1..=rank`.
    pub fn zero_count_up_to(&self, rank: usize) -> usize {
        (0..self.n).map(|i| self.row(i)[..rank].iter().filter(|&&d| d == 0.0).count()).sum()
    }
}

/// Which search backs [`knn_table_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NeighborSearch {
    #[default]
    KdTree,
    BruteForce,
}

/// Exact neighbour table using the k-d tree.
pub fn knn_table(cloud: &PointCloud, max_rank: usize) -> Result<NeighborTable> {
    knn_table_with(cloud, max_rank, NeighborSearch::KdTree)
}

pub fn knn_table_with(cloud: &PointCloud, max_rank: usize, search: NeighborSearch) -> Result<NeighborTable> {
    let n = cloud.len();
    if max_rank == 0 || max_rank >= n {
        return Err(Error::Argument(format!(
            "neighbour rank must lie in 1..={} for {n} points, got {max_rank}",
            n - 1
        )));
    }
    let mut dist = vec![0.0; n * max_rank];
    match search {
        NeighborSearch::BruteForce => {
            dist.par_chunks_mut(max_rank).enumerate().for_each(|(i, row)| {
                let q = cloud.point(i);
                let mut best = KBest::new(max_rank);
                for (j, p) in cloud.points().enumerate() {
                    if j != i {
                        best.offer(squared_distance(q, p), j as u32);
                    }
                }
                best.write_sqrt(row);
            });
        }
        NeighborSearch::KdTree => {
            let tree = KdTree::build(cloud);
            dist.par_chunks_mut(max_rank).enumerate().for_each_init(
                || vec![0.0; cloud.dim()],
                |offsets, (i, row)| {
                    let mut best = KBest::new(max_rank);
                    tree.query(i, offsets, &mut best);
                    best.write_sqrt(row);
                },
            );
        }
    }
    Ok(NeighborTable { dist, n, max_rank })
}

/// Bounded candidate list kept sorted by (squared distance, index).
struct KBest {
    items: Vec<(f64, u32)>,
    cap: usize,
}

impl KBest {
    fn new(cap: usize) -> Self {
        Self { items: Vec::with_capacity(cap + 1), cap }
    }

    #[inline]
    fn worst(&self) -> f64 {
        if self.items.len() < self.cap {
            f64::INFINITY
        } else {
            self.items[self.cap - 1].0
        }
    }

    #[inline]
    fn offer(&mut self, d2: f64, idx: u32) {
        if self.items.len() == self.cap {
            let last = self.items[self.cap - 1];
            if (d2, idx) >= last {
                return;
            }
            self.items.pop();
        }
        let pos = self.items.partition_point(|&(d, j)| (d, j) < (d2, idx));
        self.items.insert(pos, (d2, idx));
    }

    fn write_sqrt(&self, row: &mut [f64]) {
        for (slot, &(d2, _)) in row.iter_mut().zip(&self.items) {
            *slot = d2.sqrt();
        }
    }
}

const LEAF_SIZE: usize = 12;
// Pruning bound slack so rounding in the incremental bound never discards a
// point that the exact distance would keep.
const PRUNE_SLACK: f64 = 1.0 + 1e-12;

enum Node {
    Leaf { start: usize, end: usize },
    Split { axis: usize, value: f64, left: usize, right: usize },
}

struct KdTree<'a> {
    cloud: &'a PointCloud,
    order: Vec<u32>,
    nodes: Vec<Node>,
}

impl<'a> KdTree<'a> {
    fn build(cloud: &'a PointCloud) -> Self {
        let mut tree = KdTree { cloud, order: (0..cloud.len() as u32).collect(), nodes: Vec::new() };
        tree.build_node(0, cloud.len());
        tree
    }

    fn build_node(&mut self, start: usize, end: usize) -> usize {
        let id = self.nodes.len();
        if end - start <= LEAF_SIZE {
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let dim = self.cloud.dim();
        let mut axis = 0;
        let mut widest = -1.0;
        for a in 0..dim {
            let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
            for &i in &self.order[start..end] {
                let v = self.cloud.point(i as usize)[a];
                lo = lo.min(v);
                hi = hi.max(v);
            }
            if hi - lo > widest {
                widest = hi - lo;
                axis = a;
            }
        }
        if widest <= 0.0 {
            // All points coincide; no split can separate them.
            self.nodes.push(Node::Leaf { start, end });
            return id;
        }
        let mid = start + (end - start) / 2;
        let cloud = self.cloud;
        self.order[start..end].select_nth_unstable_by(mid - start, |&a, &b| {
            cloud.point(a as usize)[axis].total_cmp(&cloud.point(b as usize)[axis])
        });
        let value = cloud.point(self.order[mid] as usize)[axis];
        self.nodes.push(Node::Leaf { start: 0, end: 0 });
        let left = self.build_node(start, mid);
        let right = self.build_node(mid, end);
        self.nodes[id] = Node::Split { axis, value, left, right };
        id
    }

    fn query(&self, qi: usize, offsets: &mut [f64], best: &mut KBest) {
        offsets.iter_mut().for_each(|o| *o = 0.0);
        self.descend(0, self.cloud.point(qi), qi as u32, 0.0, offsets, best);
    }

    fn descend(&self, node: usize, q: &[f64], qi: u32, rd: f64, offsets: &mut [f64], best: &mut KBest) {
        match self.nodes[node] {
            Node::Leaf { start, end } => {
                for &j in &self.order[start..end] {
                    if j != qi {
                        best.offer(squared_distance(q, self.cloud.point(j as usize)), j);
                    }
                }
            }
            Node::Split { axis, value, left, right } => {
                let diff = q[axis] - value;
                // Points equal to the split value may sit on either side.
                let (near, far) = if diff < 0.0 { (left, right) } else { (right, left) };
                self.descend(near, q, qi, rd, offsets, best);
                let old = offsets[axis];
                let far_rd = rd - old * old + diff * diff;
                if far_rd <= best.worst() * PRUNE_SLACK {
                    offsets[axis] = diff;
                    self.descend(far, q, qi, far_rd, offsets, best);
                    offsets[axis] = old;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        PointCloud::from_flat((0..n * dim).map(|_| rng.random::<f64>() * 4.0 - 2.0).collect(), dim).unwrap()
    }

    // O(n^2) oracle: sort every distance row independently.
    fn all_pairs(cloud: &PointCloud, max_rank: usize) -> Vec<Vec<f64>> {
        (0..cloud.len())
            .map(|i| {
                let mut d: Vec<f64> = (0..cloud.len())
                    .filter(|&j| j != i)
                    .map(|j| squared_distance(cloud.point(i), cloud.point(j)).sqrt())
                    .collect();
                d.sort_by(f64::total_cmp);
                d.truncate(max_rank);
                d
            })
            .collect()
    }

    #[test]
    fn hand_checked_line() {
        let cloud = PointCloud::from_scalars(&[0.0, 1.0, 3.0]).unwrap();
        let t = knn_table(&cloud, 2).unwrap();
        assert_eq!(t.row(0), &[1.0, 3.0]);
        assert_eq!(t.row(1), &[1.0, 2.0]);
        assert_eq!(t.row(2), &[2.0, 3.0]);
    }

    #[test]
    fn coincident_points_give_zero_distance() {
        let cloud = PointCloud::from_points(&[[0.5, 0.5], [0.5, 0.5], [2.0, 1.0]]).unwrap();
        let t = knn_table(&cloud, 1).unwrap();
        assert_eq!(t.get(0, 1), 0.0);
        assert_eq!(t.zero_count_up_to(1), 2);
    }

    #[test]
    fn rank_bounds_are_checked() {
        let cloud = random_cloud(10, 2, 1);
        assert!(knn_table(&cloud, 10).is_err());
        assert!(knn_table(&cloud, 0).is_err());
        assert!(knn_table(&cloud, 9).is_ok());
    }

    #[test]
    fn tree_matches_all_pairs_oracle() {
        for (n, dim, seed) in [(500, 1, 3), (400, 2, 4), (300, 3, 5), (250, 6, 6), (200, 12, 7)] {
            let cloud = random_cloud(n, dim, seed);
            let oracle = all_pairs(&cloud, 20);
            let tree = knn_table(&cloud, 20).unwrap();
            let brute = knn_table_with(&cloud, 20, NeighborSearch::BruteForce).unwrap();
            for (i, expected) in oracle.iter().enumerate() {
                assert_eq!(tree.row(i), expected.as_slice(), "n={n} dim={dim} i={i}");
                assert_eq!(brute.row(i), expected.as_slice());
            }
        }
    }

    #[test]
    fn heavy_ties_on_a_lattice() {
        let pts: Vec<[f64; 2]> = (0..15).flat_map(|i| (0..15).map(move |j| [i as f64, j as f64])).collect();
        let cloud = PointCloud::from_points(&pts).unwrap();
        let oracle = all_pairs(&cloud, 12);
        let tree = knn_table(&cloud, 12).unwrap();
        for (i, expected) in oracle.iter().enumerate() {
            assert_eq!(tree.row(i), expected.as_slice());
        }
    }

    #[test]
    fn rank_column_reads_one_rank() {
        let cloud = PointCloud::from_scalars(&[0.0, 1.0, 3.0]).unwrap();
        let t = knn_table(&cloud, 2).unwrap();
        assert_eq!(t.rank_column(2).collect::<Vec<_>>(), vec![3.0, 2.0, 3.0]);
    }
}
