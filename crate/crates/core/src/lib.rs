//! Nonparametric tests of independence between two jointly observed
//! (multivariate) time series.
//!
//! The statistics are lag-weighted sums of per-lag dependence measures
//! between `X_t` and `Y_{t-j}`, `j = 0..=M`:
//!
//! * **DCorrX** sums sample distance correlations,
//! * **MGCX** sums multiscale graph correlations (smoothed maxima of local
//!   distance correlations over neighborhood sizes).
//!
//! P-values come from a block permutation of `Y` that keeps short-range
//! serial dependence intact. The crate also ships a cross-correlation
//! Ljung-Box baseline, generators for a family of bivariate processes, and a
//! Monte-Carlo harness for power and lag-recovery experiments.
//!
//! ```
//! use tsdep::{gen_nonlin_lag1, permutation_test, StatisticKind, TestConfig};
//!
//! let pair = gen_nonlin_lag1(80, 7).unwrap();
//! let cfg = TestConfig::new(StatisticKind::Mgcx).max_lag(1).replicates(50).seed(1);
//! let res = permutation_test(&pair.x, &pair.y, &cfg).unwrap();
//! assert!(res.p_value <= 1.0);
//! ```

pub mod baselines;
pub mod cross;
pub mod distance;
pub mod error;
pub mod harness;
pub mod local;
pub mod permutation;
pub mod seed;
pub mod series;
pub mod simulate;

pub use baselines::{
    acf, acvf, bartlett_band, ccf, ccvf, ljung_box, ljung_box_cross_statistic, CorrelogramEntry,
};
pub use cross::{
    dcorrx_statistic, lagged_pair, mgcx_statistic, optimal_lag, LagStatistic, LaggedStatistics,
};
pub use distance::{
    column_center, dcorr, dcorr_sample, dcov_sample, kernel_distance_bijection, pairwise_distances,
    BijectionDirection, CenteredMatrix, DistanceMatrix, Metric, SquareMatrix,
};
pub use error::{Error, Result};
pub use local::{knn_indicator, local_corr_map, smoothed_max, LocalCorrMap, NeighborGraph};
pub use permutation::{
    block_permute, ljung_box_cross_test, permutation_test, BlockPermutationPlan, BlockSize,
    PValueRule, StatisticEngine, StatisticKind, TestConfig, TestResult,
};
pub use series::{SeriesMatrix, TimeSeriesPair};
pub use simulate::{
    extinct_gaussian_innovation, gen_cross_ar1, gen_cross_ar13, gen_extinct_ar1, gen_indep_ar1,
    gen_nonlin_lag1, gen_nonlin_lag3, Process,
};
