mod common;

use common::Mat;
use proptest::prelude::*;
use tsdep::{
    column_center, dcorr, dcorrx_statistic, dcov_sample, knn_indicator, local_corr_map,
    mgcx_statistic, optimal_lag, pairwise_distances, BlockPermutationPlan, Metric, SeriesMatrix,
};

fn rows_strategy(n: std::ops::RangeInclusive<usize>, dim: usize) -> impl Strategy<Value = Mat> {
    n.prop_flat_map(move |n| prop::collection::vec(prop::collection::vec(-5.0..5.0f64, dim), n))
}

fn pair_strategy(n: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = (Mat, Mat)> {
    n.prop_flat_map(|n| {
        (
            prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 2), n),
            prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 1), n),
        )
    })
}

fn series(rows: &Mat) -> SeriesMatrix {
    SeriesMatrix::from_rows(rows).unwrap()
}

fn centered(rows: &Mat) -> tsdep::CenteredMatrix {
    column_center(&pairwise_distances(&series(rows), &Metric::Euclidean).unwrap()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn dcorr_invariant_under_rigid_motion_and_scaling(
        (x, y) in pair_strategy(4..=25),
        theta in 0.0..std::f64::consts::TAU,
        shift in prop::array::uniform2(-100.0..100.0f64),
        scale in 0.01..50.0f64,
    ) {
        let base = dcorr(&series(&x), &series(&y), &Metric::Euclidean).unwrap();
        let (c, s) = (theta.cos(), theta.sin());
        let moved: Mat = x
            .iter()
            .map(|r| vec![scale * (c * r[0] - s * r[1]) + shift[0], scale * (s * r[0] + c * r[1]) + shift[1]])
            .collect();
        let after = dcorr(&series(&moved), &series(&y), &Metric::Euclidean).unwrap();
        prop_assert!((after - base).abs() <= 1e-9, "{base} vs {after}");
    }

    #[test]
    fn dcov_is_symmetric((x, y) in pair_strategy(3..=20)) {
        let (a, b) = (centered(&x), centered(&y));
        let (ab, ba) = (dcov_sample(&a, &b).unwrap(), dcov_sample(&b, &a).unwrap());
        prop_assert!((ab - ba).abs() <= 1e-12 * (1.0 + ab.abs()));
    }

    #[test]
    fn self_dcorr_is_one(x in rows_strategy(3..=20, 2)) {
        let d = dcorr(&series(&x), &series(&x), &Metric::Euclidean).unwrap();
        prop_assert!((d - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn knn_rows_have_k_neighbors(x in rows_strategy(2..=15, 1), k_frac in 0.0..1.0f64) {
        let a = centered(&x);
        let k = 1 + (k_frac * (x.len() - 1) as f64) as usize;
        let g = knn_indicator(&a, k).unwrap();
        for i in 0..x.len() {
            prop_assert_eq!(g.row(i).iter().filter(|&&v| v).count(), k);
        }
    }

    #[test]
    fn local_map_matches_direct_summation((x, y) in pair_strategy(3..=8)) {
        let (a, b) = (centered(&x), centered(&y));
        let map = local_corr_map(&a, &b).unwrap();
        let grid = common::local_grid(&common::center(&common::distances(&x)), &common::center(&common::distances(&y)));
        let n = x.len();
        for k in 1..=n {
            for l in 1..=n {
                prop_assert!((map.corr(k, l) - grid[k - 1][l - 1]).abs() <= 1e-10);
            }
        }
        let (stat, scale) = common::smoothed(&grid);
        prop_assert!((map.statistic() - stat).abs() <= 1e-10);
        prop_assert_eq!(map.optimal_scale(), scale);
    }

    #[test]
    fn full_scale_is_global_dcorr((x, y) in pair_strategy(3..=30)) {
        let map = local_corr_map(&centered(&x), &centered(&y)).unwrap();
        let d = dcorr(&series(&x), &series(&y), &Metric::Euclidean).unwrap();
        prop_assert!((map.global() - d).abs() <= 1e-9);
        prop_assert!(map.statistic() >= d - 1e-12);
    }

    #[test]
    fn optimal_lag_ignores_positive_scaling(
        (x, y) in pair_strategy(10..=20),
        cx in 0.01..100.0f64,
        cy in 0.01..100.0f64,
    ) {
        let sx: Mat = x.iter().map(|r| r.iter().map(|v| v * cx).collect()).collect();
        let sy: Mat = y.iter().map(|r| r.iter().map(|v| v * cy).collect()).collect();
        let m = Metric::Euclidean;
        for mgc in [false, true] {
            let stat = |a: &Mat, b: &Mat| {
                let f = if mgc { mgcx_statistic } else { dcorrx_statistic };
                f(&series(a), &series(b), 3, &m).unwrap().1
            };
            let (before, after) = (stat(&x, &y), stat(&sx, &sy));
            prop_assert_eq!(optimal_lag(&before).unwrap(), optimal_lag(&after).unwrap());
        }
    }

    #[test]
    fn block_indices_stay_in_range(n in 1usize..60, b_frac in 0.0..1.0f64, seed: u64, r in 0u64..50) {
        let b = 1 + (b_frac * (n - 1) as f64) as usize;
        let plan = BlockPermutationPlan::new(n, b, seed).unwrap();
        let idx = plan.indices(r);
        prop_assert_eq!(idx.len(), n);
        prop_assert!(idx.iter().all(|&i| i < n));
        if n % b == 0 {
            let mut sorted = idx.clone();
            sorted.sort_unstable();
            prop_assert_eq!(sorted, (0..n).collect::<Vec<_>>());
        }
        // consecutive positions inside a block are consecutive modulo n
        for p in 0..n {
            if p % b != 0 {
                prop_assert_eq!(idx[p], (idx[p - 1] + 1) % n);
            }
        }
    }
}
