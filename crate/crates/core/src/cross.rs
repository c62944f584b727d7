//! Lagged pairing and the lag-weighted DCorrX / MGCX statistics.
//!
//! Lag `j` pairs `X_t` with `Y_{t-j}` over the `n - j` overlapping timesteps.
//! Every lag gets its own distance matrices and centering, and enters the sum
//! with weight `(n - j) / n` where `n` is the full series length.

use serde::{Deserialize, Serialize};

use crate::distance::{column_center, dcorr_sample, pairwise_distances, CenteredMatrix, Metric};
use crate::error::{Error, Result};
use crate::local::local_corr_map;
use crate::series::SeriesMatrix;

/// Statistic value at one lag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LagStatistic {
    pub lag: usize,
    pub weight: f64,
    pub value: f64,
    /// Optimal MGC scale `(k, l)` on the `n - lag` aligned pairs.
    pub scale: Option<(usize, usize)>,
    /// Number of aligned pairs used at this lag.
    pub pairs: usize,
}

impl LagStatistic {
    pub fn weighted(&self) -> f64 {
        self.weight * self.value
    }

    /// Optimal scale divided by the number of aligned pairs.
    pub fn normalized_scale(&self) -> Option<(f64, f64)> {
        let m = self.pairs as f64;
        self.scale.map(|(k, l)| (k as f64 / m, l as f64 / m))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LaggedStatistics {
    pub n: usize,
    pub max_lag: usize,
    pub per_lag: Vec<LagStatistic>,
}

impl LaggedStatistics {
    pub fn total(&self) -> f64 {
        self.per_lag.iter().map(LagStatistic::weighted).sum()
    }

    pub fn at(&self, lag: usize) -> Option<&LagStatistic> {
        self.per_lag.get(lag)
    }
}

/// Weight `(n - j) / n` applied to the lag-`j` term.
#[inline]
pub fn lag_weight(n: usize, j: usize) -> f64 {
    (n - j) as f64 / n as f64
}

/// `(X_{j+1..n}, Y_{1..n-j})`: row `t` of each output pairs `X_{t+j}` with `Y_t`.
pub fn lagged_pair(
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    j: usize,
) -> Result<(SeriesMatrix, SeriesMatrix)> {
    let n = check_lengths(x, y)?;
    if j + 2 > n {
        return Err(Error::LagTooLarge { lag: j, n });
    }
    Ok((x.slice_rows(j, n), y.slice_rows(0, n - j)))
}

pub(crate) fn check_lengths(x: &SeriesMatrix, y: &SeriesMatrix) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.len())
}

pub(crate) fn check_max_lag(n: usize, m: usize) -> Result<()> {
    if n < m + 2 {
        return Err(Error::LagTooLarge { lag: m, n });
    }
    Ok(())
}

fn centered(s: &SeriesMatrix, metric: &Metric) -> Result<CenteredMatrix> {
    column_center(&pairwise_distances(s, metric)?)
}

fn lagged_statistic<F>(
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    m: usize,
    metric: &Metric,
    mut per_lag: F,
) -> Result<(f64, LaggedStatistics)>
where
    F: FnMut(&CenteredMatrix, &CenteredMatrix) -> Result<(f64, Option<(usize, usize)>)>,
{
    let n = check_lengths(x, y)?;
    check_max_lag(n, m)?;
    let mut out = Vec::with_capacity(m + 1);
    for j in 0..=m {
        let (xs, ys) = lagged_pair(x, y, j)?;
        let (value, scale) = per_lag(&centered(&xs, metric)?, &centered(&ys, metric)?)?;
        out.push(LagStatistic {
            lag: j,
            weight: lag_weight(n, j),
            value,
            scale,
            pairs: n - j,
        });
    }
    let stats = LaggedStatistics {
        n,
        max_lag: m,
        per_lag: out,
    };
    Ok((stats.total(), stats))
}

/// `sum_{j=0}^{M} ((n-j)/n) * DCorr_n(j)`.
pub fn dcorrx_statistic(
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    m: usize,
    metric: &Metric,
) -> Result<(f64, LaggedStatistics)> {
    lagged_statistic(x, y, m, metric, |a, b| Ok((dcorr_sample(a, b)?, None)))
}

/// `sum_{j=0}^{M} ((n-j)/n) * MGC_n(j)`, recording the optimal scale per lag.
pub fn mgcx_statistic(
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    m: usize,
    metric: &Metric,
) -> Result<(f64, LaggedStatistics)> {
    lagged_statistic(x, y, m, metric, |a, b| {
        let map = local_corr_map(a, b)?;
        Ok((map.statistic(), Some(map.optimal_scale())))
    })
}

/// Lag maximizing the weighted per-lag statistic; ties go to the smallest lag.
pub fn optimal_lag(stats: &LaggedStatistics) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for s in &stats.per_lag {
        let w = s.weighted();
        if best.is_none_or(|(_, b)| w > b) {
            best = Some((s.lag, w));
        }
    }
    best.map(|(j, _)| j)
        .ok_or_else(|| Error::InvalidInput("no per-lag statistics".into()))
}
