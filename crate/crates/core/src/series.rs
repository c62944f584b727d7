use crate::error::{Error, Result};

/// A sampled time series: `n` rows (timesteps) of `dim` coordinates, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesMatrix {
    values: Vec<f64>,
    n: usize,
    dim: usize,
}

impl SeriesMatrix {
    /// Builds a series from row-major values. Rejects non-finite entries.
    pub fn new(values: Vec<f64>, n: usize, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput(
                "series dimension must be at least 1".into(),
            ));
        }
        if values.len() != n * dim {
            return Err(Error::InvalidInput(format!(
                "expected {} values for a {n}x{dim} series, got {}",
                n * dim,
                values.len()
            )));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / dim,
                col: pos % dim,
            });
        }
        Ok(SeriesMatrix { values, n, dim })
    }

    pub fn univariate(values: Vec<f64>) -> Result<Self> {
        let n = values.len();
        Self::new(values, n, 1)
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.first().map_or(1, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "row {i} has {} columns, expected {dim}",
                    row.len()
                )));
            }
            values.extend_from_slice(row);
        }
        Self::new(values, rows.len(), dim)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.dim..(i + 1) * self.dim]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.dim)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Column `c` as an owned vector.
    pub fn column(&self, c: usize) -> Vec<f64> {
        self.rows().map(|r| r[c]).collect()
    }

    /// Rows `start..end` as a new series.
    pub fn slice_rows(&self, start: usize, end: usize) -> SeriesMatrix {
        SeriesMatrix {
            values: self.values[start * self.dim..end * self.dim].to_vec(),
            n: end - start,
            dim: self.dim,
        }
    }

    /// Reorders rows by a 0-based index sequence; indices may repeat.
    pub fn select_rows(&self, indices: &[usize]) -> SeriesMatrix {
        let mut values = Vec::with_capacity(indices.len() * self.dim);
        for &i in indices {
            values.extend_from_slice(self.row(i));
        }
        SeriesMatrix {
            values,
            n: indices.len(),
            dim: self.dim,
        }
    }
}

/// Jointly observed pair of series of equal length.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesPair {
    pub x: SeriesMatrix,
    pub y: SeriesMatrix,
}

impl TimeSeriesPair {
    pub fn new(x: SeriesMatrix, y: SeriesMatrix) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::DimensionMismatch {
                left: x.len(),
                right: y.len(),
            });
        }
        Ok(TimeSeriesPair { x, y })
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }
}
