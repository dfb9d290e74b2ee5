#![allow(dead_code)]

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

/// `x_t = a x_{t-1} + c y_{t-1} + e_t` with `y` white; unit-variance noises.
pub fn driven_ar(n: usize, a: f64, c: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let e = normals(n, seed);
    let y = normals(n, seed.wrapping_add(0x5eed));
    let mut x = vec![0.0; n];
    for t in 1..n {
        x[t] = a * x[t - 1] + c * y[t - 1] + e[t];
    }
    (x, y)
}

pub fn ar1(n: usize, phi: f64, seed: u64) -> Vec<f64> {
    let e = normals(n, seed);
    let mut x = vec![0.0; n];
    for t in 1..n {
        x[t] = phi * x[t - 1] + e[t];
    }
    x
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

pub fn autocorrelation(x: &[f64], lag: usize) -> f64 {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let var: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    let cov: f64 = (0..n - lag).map(|t| (x[t] - mean) * (x[t + lag] - mean)).sum();
    cov / var
}
