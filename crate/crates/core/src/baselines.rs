//! Linear baselines: auto/cross covariance and correlation, Bartlett bands,
//! and Ljung-Box statistics.
//!
//! Lag-`j` estimates use the two overlapping windows `x[0..n-j]` and
//! `x[j..n]` (or `y[j..n]` for the cross versions), each with its own mean,
//! and a `1/(n-j)` divisor. Correlations are the Pearson correlation of the
//! windows, so they stay inside [-1, 1].

use serde::{Deserialize, Serialize};

use crate::cross::{LagStatistic, LaggedStatistics};
use crate::error::{Error, Result};
use crate::series::SeriesMatrix;

fn check_lag(n: usize, j: usize) -> Result<()> {
    if j + 2 > n {
        return Err(Error::LagTooLarge { lag: j, n });
    }
    Ok(())
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn window_moments(a: &[f64], b: &[f64]) -> (f64, f64, f64) {
    let (ma, mb) = (mean(a), mean(b));
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        let (da, db) = (x - ma, y - mb);
        sab += da * db;
        saa += da * da;
        sbb += db * db;
    }
    let m = a.len() as f64;
    (sab / m, saa / m, sbb / m)
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let (c, va, vb) = window_moments(a, b);
    let d = va * vb;
    if d > 0.0 {
        c / d.sqrt()
    } else {
        0.0
    }
}

/// Sample autocovariance at lag `j`.
pub fn acvf(x: &[f64], j: usize) -> Result<f64> {
    let n = x.len();
    check_lag(n, j)?;
    Ok(window_moments(&x[..n - j], &x[j..]).0)
}

/// Sample autocorrelation at lag `j`.
pub fn acf(x: &[f64], j: usize) -> Result<f64> {
    let n = x.len();
    check_lag(n, j)?;
    Ok(pearson(&x[..n - j], &x[j..]))
}

/// Sample cross-covariance of `(X_t, Y_{t+j})`.
pub fn ccvf(x: &[f64], y: &[f64], j: usize) -> Result<f64> {
    let n = same_len(x, y)?;
    check_lag(n, j)?;
    Ok(window_moments(&x[..n - j], &y[j..]).0)
}

/// Sample cross-correlation of `(X_t, Y_{t+j})`.
pub fn ccf(x: &[f64], y: &[f64], j: usize) -> Result<f64> {
    let n = same_len(x, y)?;
    check_lag(n, j)?;
    Ok(pearson(&x[..n - j], &y[j..]))
}

fn same_len(x: &[f64], y: &[f64]) -> Result<usize> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    Ok(x.len())
}

/// Approximate 95% band `1.96 / sqrt(n)`.
pub fn bartlett_band(n: usize) -> f64 {
    1.96 / (n as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelogramEntry {
    pub lag: usize,
    pub value: f64,
    pub band: f64,
}

impl CorrelogramEntry {
    pub fn outside_band(&self) -> bool {
        self.value.abs() > self.band
    }
}

pub fn correlogram(x: &[f64], max_lag: usize) -> Result<Vec<CorrelogramEntry>> {
    let band = bartlett_band(x.len());
    (0..=max_lag)
        .map(|j| {
            Ok(CorrelogramEntry {
                lag: j,
                value: acf(x, j)?,
                band,
            })
        })
        .collect()
}

pub fn cross_correlogram(x: &[f64], y: &[f64], max_lag: usize) -> Result<Vec<CorrelogramEntry>> {
    let band = bartlett_band(x.len());
    (0..=max_lag)
        .map(|j| {
            Ok(CorrelogramEntry {
                lag: j,
                value: ccf(x, y, j)?,
                band,
            })
        })
        .collect()
}

/// `n(n+2) * sum_{j=1}^{M} ACF(j)^2 / (n-j)`.
pub fn ljung_box(x: &[f64], m: usize) -> Result<f64> {
    let n = x.len();
    if m == 0 {
        return Err(Error::InvalidInput(
            "Ljung-Box needs at least one lag".into(),
        ));
    }
    check_lag(n, m)?;
    let nf = n as f64;
    let mut s = 0.0;
    for j in 1..=m {
        s += acf(x, j)?.powi(2) / (nf - j as f64);
    }
    Ok(nf * (nf + 2.0) * s)
}

fn univariate(s: &SeriesMatrix, name: &str) -> Result<Vec<f64>> {
    if s.dim() != 1 {
        return Err(Error::InvalidInput(format!(
            "Ljung-Box cross statistic needs a univariate `{name}`, got dimension {}",
            s.dim()
        )));
    }
    Ok(s.values().to_vec())
}

/// Cross Ljung-Box statistic for `X_t` against `Y_{t-j}`, `j = 0..=M`:
/// `n(n+2) * sum_j CCF_{X_t, Y_{t-j}}^2 / (n-j)`.
///
/// Per-lag entries hold the squared correlation with weight `n(n+2)/(n-j)`.
pub fn ljung_box_cross_statistic(
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    m: usize,
) -> Result<(f64, LaggedStatistics)> {
    let xv = univariate(x, "x")?;
    let yv = univariate(y, "y")?;
    let n = same_len(&xv, &yv)?;
    check_lag(n, m)?;
    ljung_box_cross_values(&xv, &yv, m)
}

pub(crate) fn ljung_box_cross_values(
    x: &[f64],
    y: &[f64],
    m: usize,
) -> Result<(f64, LaggedStatistics)> {
    let n = x.len();
    let nf = n as f64;
    let mut per_lag = Vec::with_capacity(m + 1);
    for j in 0..=m {
        // (Y_t, X_{t+j}) is the pair (X_t, Y_{t-j}) reindexed.
        let r = ccf(y, x, j)?;
        per_lag.push(LagStatistic {
            lag: j,
            weight: nf * (nf + 2.0) / (nf - j as f64),
            value: r * r,
            scale: None,
            pairs: n - j,
        });
    }
    let stats = LaggedStatistics {
        n,
        max_lag: m,
        per_lag,
    };
    Ok((stats.total(), stats))
}
