mod common;

use proptest::prelude::*;
use renyite_core::analytic::{alpha_gaussian_cond_mi, escort_distribution};
use renyite_core::infoflow::{rte_balance, rte_balance_effective, LagSpec};
use renyite_core::numkernel::{knn_table_with, NeighborSearch};
use renyite_core::surrogate::{phase_surrogate, shuffle_surrogate};
use renyite_core::{EstimatorConfig, LogBase, PointCloud, SurrogateKind};
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

fn periodogram(x: &[f64]) -> Vec<f64> {
    let mut buf: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(x.len()).process(&mut buf);
    buf.iter().map(|z| z.norm_sqr()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn kd_tree_agrees_with_all_pairs(
        dim in 1usize..6,
        n in 12usize..160,
        seed in any::<u64>(),
        rank in 1usize..10,
    ) {
        let cloud = common::gaussian_cloud(n, dim, seed);
        let rank = rank.min(n - 1);
        let tree = knn_table_with(&cloud, rank, NeighborSearch::KdTree).unwrap();
        let brute = knn_table_with(&cloud, rank, NeighborSearch::BruteForce).unwrap();
        prop_assert_eq!(tree, brute);
    }

    #[test]
    fn kd_tree_agrees_on_quantised_data(
        values in prop::collection::vec(-4i32..4, 60..240),
        rank in 1usize..6,
    ) {
        // Many exact ties and duplicates.
        let pts: Vec<f64> = values.iter().map(|&v| f64::from(v)).collect();
        let cloud = PointCloud::from_flat(pts[..pts.len() / 3 * 3].to_vec(), 3).unwrap();
        let tree = knn_table_with(&cloud, rank, NeighborSearch::KdTree).unwrap();
        let brute = knn_table_with(&cloud, rank, NeighborSearch::BruteForce).unwrap();
        prop_assert_eq!(tree, brute);
    }

    #[test]
    fn shuffle_preserves_the_multiset(values in prop::collection::vec(-1e6f64..1e6, 1..300), seed in any::<u64>()) {
        let mut s = shuffle_surrogate(&values, seed).unwrap();
        let mut v = values.clone();
        s.sort_by(f64::total_cmp);
        v.sort_by(f64::total_cmp);
        prop_assert_eq!(s, v);
    }

    #[test]
    fn phase_surrogate_preserves_the_periodogram(n in 4usize..300, seed in any::<u64>()) {
        let x = common::ar1(n, 0.7, seed);
        let s = phase_surrogate(&x, seed ^ 1).unwrap();
        let (a, b) = (periodogram(&x), periodogram(&s));
        let peak = a.iter().cloned().fold(0.0, f64::max);
        for (pa, pb) in a.iter().zip(&b) {
            prop_assert!((pa - pb).abs() <= 1e-9 * pa.max(1e-6 * peak));
        }
    }

    #[test]
    fn escort_is_normalised_and_keeps_the_mode(
        weights in prop::collection::vec(0.0f64..1.0, 2..20),
        alpha in 0.0f64..8.0,
    ) {
        let total: f64 = weights.iter().sum();
        prop_assume!(total > 1e-3);
        let p: Vec<f64> = weights.iter().map(|w| w / total).collect();
        let r = escort_distribution(&p, alpha).unwrap();
        prop_assert!((r.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let argmax = |v: &[f64]| v.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
        if alpha > 1.0 {
            prop_assert_eq!(p[argmax(&r)], p[argmax(&p)]);
        }
        for (pi, ri) in p.iter().zip(&r) {
            prop_assert_eq!(*pi == 0.0, *ri == 0.0);
        }
    }

    #[test]
    fn cond_mi_is_never_positive(k in 1usize..12, l in 1usize..4, u in 0.0f64..1.0) {
        let lo = (1 + k + l) as f64 / (3 + k + l) as f64;
        let alpha = lo + (1.0 - lo) * (0.001 + 0.999 * u);
        let i = alpha_gaussian_cond_mi(k, l, alpha, LogBase::E).unwrap();
        prop_assert!(i <= 0.0, "{} at k={} l={} alpha={}", i, k, l, alpha);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn balances_are_antisymmetric(seed in any::<u64>(), alpha in prop::sample::select(vec![0.8, 1.0, 1.5])) {
        let (x, y) = common::driven_ar(600, 0.5, 0.4, seed);
        let spec = LagSpec::new(vec![0], 1, vec![0]).unwrap();
        let cfg = EstimatorConfig::with_alpha(alpha).ranks(3, 8);
        let ab = rte_balance(&x, &y, &spec, &cfg).unwrap();
        let ba = rte_balance(&y, &x, &spec, &cfg).unwrap();
        prop_assert_eq!(ab.value, -ba.value);
        prop_assert_eq!(ab.std, ba.std);
        let self_pair = rte_balance(&x, &x, &spec, &cfg).unwrap();
        prop_assert_eq!(self_pair.value, 0.0);

        let eab = rte_balance_effective(&x, &y, &spec, &cfg, SurrogateKind::Shuffle, 3, seed).unwrap();
        let eba = rte_balance_effective(&y, &x, &spec, &cfg, SurrogateKind::Shuffle, 3, seed).unwrap();
        prop_assert_eq!(eab.value, -eba.value);
        let eself = rte_balance_effective(&y, &y, &spec, &cfg, SurrogateKind::Phase, 3, seed).unwrap();
        prop_assert_eq!(eself.value, 0.0);
    }
}
