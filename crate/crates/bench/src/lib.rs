//! Seeded inputs shared by the benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use renyite_core::PointCloud;

pub fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut rng)).collect()
}

pub fn gaussian_cloud(n: usize, dim: usize, seed: u64) -> PointCloud {
    PointCloud::from_flat(normals(n * dim, seed), dim).unwrap()
}

/// `x_t = 0.5 x_{t-1} + 0.3 y_{t-1} + e_t` with white `y`; returns `(x, y)`.
pub fn driven_pair(n: usize, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let e = normals(n, seed);
    let y = normals(n, seed + 1);
    let mut x = vec![0.0; n];
    for t in 1..n {
        x[t] = 0.5 * x[t - 1] + 0.3 * y[t - 1] + e[t];
    }
    (x, y)
}
