use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::LabeledSeries;
use crate::cross::optimal_lag;
use crate::distance::Metric;
use crate::error::{Error, Result};
use crate::permutation::{permutation_test, BlockSize, StatisticEngine, StatisticKind, TestConfig};
use crate::seed::derive_seed;

#[derive(Debug, Clone)]
pub struct PairwiseConfig {
    /// Maximum lag of the MGCX test that produces the p-values.
    pub max_lag_pvalue: usize,
    /// Maximum lag searched for the optimal lag.
    pub max_lag_search: usize,
    pub replicates: usize,
    pub block_size: BlockSize,
    pub seed: u64,
    pub metric: Metric,
}

impl Default for PairwiseConfig {
    fn default() -> Self {
        PairwiseConfig {
            max_lag_pvalue: 1,
            max_lag_search: 10,
            replicates: 100,
            block_size: BlockSize::Auto,
            seed: 0,
            metric: Metric::Euclidean,
        }
    }
}

/// Ordered-pair MGCX results. Entry `[u][v]` tests series `u` against the
/// past of series `v`, so the matrices are asymmetric in general.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairwiseAnalysis {
    pub labels: Vec<String>,
    pub p_values: Vec<Vec<f64>>,
    pub optimal_lags: Vec<Vec<usize>>,
    /// Optimal scale of series `u` at the optimal lag, divided by the number of aligned pairs.
    pub row_scales: Vec<Vec<f64>>,
    /// Optimal scale of series `v` at the optimal lag, divided by the number of aligned pairs.
    pub col_scales: Vec<Vec<f64>>,
}

struct Cell {
    p_value: f64,
    lag: usize,
    row_scale: f64,
    col_scale: f64,
}

pub fn run_pairwise_analysis(
    series: &[LabeledSeries],
    cfg: &PairwiseConfig,
) -> Result<PairwiseAnalysis> {
    if series.len() < 2 {
        return Err(Error::InvalidInput(format!(
            "pairwise analysis needs at least 2 series, got {}",
            series.len()
        )));
    }
    let n = series[0].series.len();
    if let Some(s) = series.iter().find(|s| s.series.len() != n) {
        return Err(Error::InvalidInput(format!(
            "series `{}` has length {}, expected {n}",
            s.label,
            s.series.len()
        )));
    }
    let max_m = cfg.max_lag_pvalue.max(cfg.max_lag_search);
    if n < max_m + 2 {
        return Err(Error::LagTooLarge { lag: max_m, n });
    }
    let l = series.len();
    let cells: Vec<Cell> = (0..l * l)
        .into_par_iter()
        .map(|c| {
            let (u, v) = (c / l, c % l);
            let (x, y) = (&series[u].series, &series[v].series);
            let test = TestConfig::new(StatisticKind::Mgcx)
                .max_lag(cfg.max_lag_pvalue)
                .replicates(cfg.replicates)
                .block_size(cfg.block_size)
                .seed(derive_seed(cfg.seed, &[u as u64, v as u64]))
                .metric(cfg.metric.clone());
            let p_value = permutation_test(x, y, &test)?.p_value;
            let engine =
                StatisticEngine::new(x, y, StatisticKind::Mgcx, cfg.max_lag_search, &cfg.metric)?;
            let stats = engine.observed()?.1;
            let lag = optimal_lag(&stats)?;
            let (row_scale, col_scale) = stats.per_lag[lag]
                .normalized_scale()
                .expect("MGCX records scales");
            Ok(Cell {
                p_value,
                lag,
                row_scale,
                col_scale,
            })
        })
        .collect::<Result<_>>()?;

    let grid = |f: &dyn Fn(&Cell) -> f64| -> Vec<Vec<f64>> {
        cells
            .chunks(l)
            .map(|row| row.iter().map(f).collect())
            .collect()
    };
    Ok(PairwiseAnalysis {
        labels: series.iter().map(|s| s.label.clone()).collect(),
        p_values: grid(&|c| c.p_value),
        optimal_lags: cells
            .chunks(l)
            .map(|row| row.iter().map(|c| c.lag).collect())
            .collect(),
        row_scales: grid(&|c| c.row_scale),
        col_scales: grid(&|c| c.col_scale),
    })
}
