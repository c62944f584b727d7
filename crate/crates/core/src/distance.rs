//! Pairwise distance matrices, column centering and the global sample
//! distance covariance / correlation.
//!
//! Centering subtracts each column's sum divided by `n - 1`:
//! `A[i][j] = a[i][j] - (1/(n-1)) * sum_s a[s][j]`. The sample covariance is
//! `1/(n(n-1)) * sum_{i,j} A[i][j] * B[j][i]`, diagonal terms included.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::series::SeriesMatrix;

/// Row-major `n x n` matrix of reals.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    data: Vec<f64>,
    n: usize,
}

impl SquareMatrix {
    pub fn zeros(n: usize) -> Self {
        SquareMatrix {
            data: vec![0.0; n * n],
            n,
        }
    }

    pub fn from_vec(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        Ok(SquareMatrix { data, n })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidInput(
                "matrix rows must all have length n".into(),
            ));
        }
        Ok(SquareMatrix {
            data: rows.concat(),
            n,
        })
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn transpose(&self) -> SquareMatrix {
        let n = self.n;
        let mut out = vec![0.0; n * n];
        for i in 0..n {
            for j in 0..n {
                out[j * n + i] = self.data[i * n + j];
            }
        }
        SquareMatrix { data: out, n }
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        self.data
            .chunks(self.n.max(1))
            .map(<[f64]>::to_vec)
            .collect()
    }
}

/// Symmetric, zero-diagonal matrix of pairwise distances.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix(SquareMatrix);

impl DistanceMatrix {
    /// Wraps a matrix after checking symmetry, a zero diagonal and finite nonnegative entries.
    pub fn new(m: SquareMatrix) -> Result<Self> {
        let n = m.n();
        for i in 0..n {
            if m.get(i, i) != 0.0 {
                return Err(Error::InvalidInput(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let v = m.get(i, j);
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::InvalidInput(format!(
                        "distance ({i},{j}) = {v} is not a finite nonnegative value"
                    )));
                }
                if v != m.get(j, i) {
                    return Err(Error::InvalidInput(format!(
                        "asymmetric entry at ({i},{j})"
                    )));
                }
            }
        }
        Ok(DistanceMatrix(m))
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    /// Distances among the rows picked by `indices` (0-based, repeats allowed).
    pub fn gather(&self, indices: &[usize]) -> DistanceMatrix {
        let m = indices.len();
        let mut data = Vec::with_capacity(m * m);
        for &i in indices {
            let row = self.0.row(i);
            data.extend(indices.iter().map(|&j| row[j]));
        }
        DistanceMatrix(SquareMatrix { data, n: m })
    }

    /// Leading `m x m` block, i.e. the distances among the first `m` rows.
    pub fn leading(&self, m: usize) -> DistanceMatrix {
        let mut data = Vec::with_capacity(m * m);
        for i in 0..m {
            data.extend_from_slice(&self.0.row(i)[..m]);
        }
        DistanceMatrix(SquareMatrix { data, n: m })
    }

    /// Trailing `m x m` block, i.e. the distances among the last `m` rows.
    pub fn trailing(&self, m: usize) -> DistanceMatrix {
        let off = self.n() - m;
        let mut data = Vec::with_capacity(m * m);
        for i in off..self.n() {
            data.extend_from_slice(&self.0.row(i)[off..]);
        }
        DistanceMatrix(SquareMatrix { data, n: m })
    }
}

/// Column-centered distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteredMatrix(SquareMatrix);

impl CenteredMatrix {
    #[cfg(test)]
    pub(crate) fn from_raw(m: SquareMatrix) -> Self {
        CenteredMatrix(m)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }

    pub fn n(&self) -> usize {
        self.0.n()
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0.get(i, j)
    }
}

pub type MetricFn = dyn Fn(&[f64], &[f64]) -> f64 + Send + Sync;

/// Distance used between rows of a series.
///
/// Custom metrics should be of strong negative type for the independence
/// characterization to hold; that is not checked here.
#[derive(Clone, Default)]
pub enum Metric {
    #[default]
    Euclidean,
    Custom(Arc<MetricFn>),
}

impl Metric {
    pub fn custom<F>(f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> f64 + Send + Sync + 'static,
    {
        Metric::Custom(Arc::new(f))
    }

    #[inline]
    pub fn eval(&self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            Metric::Euclidean => euclidean(a, b),
            Metric::Custom(f) => f(a, b),
        }
    }
}

impl fmt::Debug for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Metric::Euclidean => f.write_str("Euclidean"),
            Metric::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[inline]
fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    if a.len() == 1 {
        return (a[0] - b[0]).abs();
    }
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

/// All pairwise distances between the rows of `x`.
pub fn pairwise_distances(x: &SeriesMatrix, metric: &Metric) -> Result<DistanceMatrix> {
    let n = x.len();
    if n == 0 {
        return Err(Error::Degenerate { needed: 1, got: 0 });
    }
    // SeriesMatrix guarantees finite entries on construction.
    let mut m = SquareMatrix::zeros(n);
    for i in 0..n {
        let ri = x.row(i);
        for j in (i + 1)..n {
            let d = metric.eval(ri, x.row(j));
            if !d.is_finite() || d < 0.0 {
                return Err(Error::InvalidInput(format!(
                    "metric returned {d} for rows ({i},{j})"
                )));
            }
            m.set(i, j, d);
            m.set(j, i, d);
        }
    }
    Ok(DistanceMatrix(m))
}

/// Subtracts `(1/(n-1)) * column sum` from every entry of each column.
pub fn column_center(d: &DistanceMatrix) -> Result<CenteredMatrix> {
    let n = d.n();
    if n < 2 {
        return Err(Error::Degenerate { needed: 2, got: n });
    }
    let src = d.matrix().as_slice();
    let mut col = vec![0.0; n];
    for row in src.chunks_exact(n) {
        for (c, v) in col.iter_mut().zip(row) {
            *c += v;
        }
    }
    let scale = 1.0 / (n as f64 - 1.0);
    col.iter_mut().for_each(|c| *c *= scale);
    let mut data = Vec::with_capacity(n * n);
    for row in src.chunks_exact(n) {
        data.extend(row.iter().zip(&col).map(|(v, c)| v - c));
    }
    Ok(CenteredMatrix(SquareMatrix { data, n }))
}

/// `sum_{i,j} A[i][j] * B[j][i]` without the `1/(n(n-1))` factor.
pub(crate) fn cross_sum(a: &SquareMatrix, b: &SquareMatrix) -> f64 {
    let n = a.n();
    let (a, b) = (a.as_slice(), b.as_slice());
    let mut total = 0.0;
    for i in 0..n {
        let row = &a[i * n..(i + 1) * n];
        let mut s = 0.0;
        for (j, av) in row.iter().enumerate() {
            s += av * b[j * n + i];
        }
        total += s;
    }
    total
}

/// Sample distance covariance `1/(n(n-1)) * sum_{i,j} A[i][j] B[j][i]`.
pub fn dcov_sample(a: &CenteredMatrix, b: &CenteredMatrix) -> Result<f64> {
    let n = a.n();
    if b.n() != n {
        return Err(Error::DimensionMismatch {
            left: n,
            right: b.n(),
        });
    }
    if n < 2 {
        return Err(Error::Degenerate { needed: 2, got: n });
    }
    let nf = n as f64;
    Ok(cross_sum(a.matrix(), b.matrix()) / (nf * (nf - 1.0)))
}

/// Sample distance correlation. A nonpositive variance product maps to 0.
pub fn dcorr_sample(a: &CenteredMatrix, b: &CenteredMatrix) -> Result<f64> {
    let cov = dcov_sample(a, b)?;
    let var_a = dcov_sample(a, a)?;
    let var_b = dcov_sample(b, b)?;
    Ok(normalize(cov, var_a, var_b))
}

#[inline]
pub(crate) fn normalize(cov: f64, var_a: f64, var_b: f64) -> f64 {
    let denom = var_a * var_b;
    if denom > 0.0 {
        cov / denom.sqrt()
    } else {
        0.0
    }
}

/// Convenience: distance correlation between two series under `metric`.
pub fn dcorr(x: &SeriesMatrix, y: &SeriesMatrix, metric: &Metric) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    let a = column_center(&pairwise_distances(x, metric)?)?;
    let b = column_center(&pairwise_distances(y, metric)?)?;
    dcorr_sample(&a, &b)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BijectionDirection {
    KernelToDistance,
    DistanceToKernel,
}

/// `max(M) - M` entrywise. The same map converts a kernel to a distance and back.
pub fn kernel_distance_bijection(m: &SquareMatrix, _direction: BijectionDirection) -> SquareMatrix {
    let max = m
        .as_slice()
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max);
    SquareMatrix {
        data: m.as_slice().iter().map(|v| max - v).collect(),
        n: m.n(),
    }
}
