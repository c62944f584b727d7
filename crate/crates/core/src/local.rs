//! Local (multiscale) distance correlations and the smoothed-max MGC statistic.
//!
//! Neighbor ranks are taken row-wise over the centered matrix `A`, the
//! self-entry included, ties resolved toward the smaller column index.
//! `G^k[i][j] = 1` iff `rank(A[i][j]) < k`.
//!
//! The local covariance pairs `A[i][j]` with `B[j][i]` in the same orientation
//! as the global estimator:
//!
//! ```text
//! cov^{k,l}(X, Y) = sum_{i,j} A[i][j] G^k[i][j] B[j][i] H^l[j][i]
//! ```
//!
//! so at `(k, l) = (n, n)` the map reproduces the global sample distance
//! correlation. The whole grid is built from one row-wise sort per matrix and a
//! two-dimensional prefix sum over rank pairs.

use std::collections::VecDeque;

use crate::distance::{normalize, CenteredMatrix};
use crate::error::{Error, Result};

/// k-nearest-neighbor indicator over the rows of a centered matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NeighborGraph {
    indicator: Vec<bool>,
    n: usize,
    k: usize,
}

impl NeighborGraph {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        self.indicator[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[bool] {
        &self.indicator[i * self.n..(i + 1) * self.n]
    }
}

/// Row-wise 0-based ranks, ties broken by column index.
pub(crate) fn row_ranks(a: &CenteredMatrix) -> Vec<u32> {
    let n = a.n();
    let mut ranks = vec![0u32; n * n];
    let mut keyed: Vec<(i64, u32)> = Vec::with_capacity(n);
    for i in 0..n {
        keyed.clear();
        keyed.extend(
            a.matrix()
                .row(i)
                .iter()
                .enumerate()
                .map(|(j, &v)| (order_key(v), j as u32)),
        );
        keyed.sort_unstable();
        let out = &mut ranks[i * n..(i + 1) * n];
        for (r, &(_, j)) in keyed.iter().enumerate() {
            out[j as usize] = r as u32;
        }
    }
    ranks
}

/// Integer key with the ordering of `f64::total_cmp`.
#[inline]
fn order_key(v: f64) -> i64 {
    let bits = v.to_bits() as i64;
    bits ^ ((((bits >> 63) as u64) >> 1) as i64)
}

/// Transpose of a row-major `n x n` buffer, in cache-sized tiles.
fn transpose<T: Copy + Default>(src: &[T], n: usize) -> Vec<T> {
    const TILE: usize = 32;
    let mut out = vec![T::default(); n * n];
    for i0 in (0..n).step_by(TILE) {
        for j0 in (0..n).step_by(TILE) {
            for i in i0..(i0 + TILE).min(n) {
                for j in j0..(j0 + TILE).min(n) {
                    out[j * n + i] = src[i * n + j];
                }
            }
        }
    }
    out
}

pub fn knn_indicator(a: &CenteredMatrix, k: usize) -> Result<NeighborGraph> {
    let n = a.n();
    if k == 0 || k > n {
        return Err(Error::InvalidInput(format!(
            "neighbor count {k} outside 1..={n}"
        )));
    }
    let indicator = row_ranks(a).into_iter().map(|r| (r as usize) < k).collect();
    Ok(NeighborGraph { indicator, n, k })
}

/// Full grid of local correlations and its smoothed maximum.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCorrMap {
    n: usize,
    corr: Vec<f64>,
    statistic: f64,
    optimal_scale: (usize, usize),
}

impl LocalCorrMap {
    /// Wraps a precomputed `n x n` grid (`corr[(k-1)*n + (l-1)]`) and smooths it.
    pub fn from_grid(n: usize, corr: Vec<f64>) -> Result<Self> {
        if n == 0 || corr.len() != n * n {
            return Err(Error::InvalidInput(format!(
                "grid of {} cells is not {n}x{n}",
                corr.len()
            )));
        }
        let (statistic, optimal_scale) = smoothed_max(n, &corr);
        Ok(LocalCorrMap {
            n,
            corr,
            statistic,
            optimal_scale,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Local correlation at scale `(k, l)`, both 1-based.
    #[inline]
    pub fn corr(&self, k: usize, l: usize) -> f64 {
        self.corr[(k - 1) * self.n + (l - 1)]
    }

    pub fn grid(&self) -> &[f64] {
        &self.corr
    }

    /// Value at `(n, n)`, the global distance correlation.
    pub fn global(&self) -> f64 {
        self.corr[self.n * self.n - 1]
    }

    pub fn statistic(&self) -> f64 {
        self.statistic
    }

    pub fn optimal_scale(&self) -> (usize, usize) {
        self.optimal_scale
    }

    pub fn normalized_scale(&self) -> (f64, f64) {
        let n = self.n as f64;
        (
            self.optimal_scale.0 as f64 / n,
            self.optimal_scale.1 as f64 / n,
        )
    }
}

/// Per-matrix data that does not depend on the other series: ranks, their
/// transposes, and the cumulative self-covariance `cov^{k,k}` for every `k`.
#[derive(Debug, Clone)]
pub(crate) struct RankedSide {
    ranks: Vec<u32>,
    ranks_t: Vec<u32>,
    values_t: Vec<f64>,
    self_cov: Vec<f64>,
}

impl RankedSide {
    pub(crate) fn new(a: &CenteredMatrix) -> Self {
        let n = a.n();
        let ranks = row_ranks(a);
        let ranks_t = transpose(&ranks, n);
        let m = a.matrix().as_slice();
        let values_t = transpose(m, n);
        // A[i][j]A[j][i] enters cov^{k,k} once both ranks are below k.
        let mut cells = vec![0.0; n];
        for c in 0..n * n {
            cells[ranks[c].max(ranks_t[c]) as usize] += m[c] * values_t[c];
        }
        let mut acc = 0.0;
        for c in cells.iter_mut() {
            acc += *c;
            *c = acc;
        }
        RankedSide {
            ranks,
            ranks_t,
            values_t,
            self_cov: cells,
        }
    }
}

pub fn local_corr_map(a: &CenteredMatrix, b: &CenteredMatrix) -> Result<LocalCorrMap> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    if a.n() < 2 {
        return Err(Error::Degenerate {
            needed: 2,
            got: a.n(),
        });
    }
    let ra = RankedSide::new(a);
    let rb = RankedSide::new(b);
    Ok(local_corr_map_ranked(a, &ra, &rb))
}

pub(crate) fn local_corr_map_ranked(
    a: &CenteredMatrix,
    ra: &RankedSide,
    rb: &RankedSide,
) -> LocalCorrMap {
    let n = a.n();
    let am = a.matrix().as_slice();
    let mut grid = vec![0.0; n * n];
    // cell (i, j) pairs A[i][j] with B[j][i]
    let cells = am.iter().zip(&ra.ranks).zip(&rb.ranks_t).zip(&rb.values_t);
    for (((&av, &k), &l), &bv) in cells {
        grid[k as usize * n + l as usize] += av * bv;
    }
    // 2-D inclusive prefix sums: rows first, then columns.
    for k in 0..n {
        let row = &mut grid[k * n..(k + 1) * n];
        let mut acc = 0.0;
        for v in row.iter_mut() {
            acc += *v;
            *v = acc;
        }
    }
    for k in 1..n {
        let (prev, cur) = grid.split_at_mut(k * n);
        let prev = &prev[(k - 1) * n..];
        for (c, p) in cur[..n].iter_mut().zip(prev) {
            *c += p;
        }
    }
    for k in 0..n {
        let vx = ra.self_cov[k];
        for l in 0..n {
            let cell = &mut grid[k * n + l];
            *cell = normalize(*cell, vx, rb.self_cov[l]);
        }
    }
    let (statistic, optimal_scale) = smoothed_max(n, &grid);
    LocalCorrMap {
        n,
        corr: grid,
        statistic,
        optimal_scale,
    }
}

const TIE_MARGIN: f64 = 1e-12;

/// Smoothed maximum of an `n x n` local correlation grid.
///
/// Cells qualify when they exceed both the global value at `(n, n)` and the
/// noise threshold `max(0, max(-corr))` by more than a rounding margin, so
/// cells mathematically equal to the global value never qualify. Among 4-connected components of
/// qualifying cells the largest is kept (first in row-major order on ties).
/// If it covers at least `2n` cells its maximum and argmax are returned,
/// otherwise the global value at scale `(n, n)`. Argmax ties go to the
/// smallest `k`, then the smallest `l`. Scales are 1-based.
pub fn smoothed_max(n: usize, corr: &[f64]) -> (f64, (usize, usize)) {
    let global = corr[n * n - 1];
    let tau = corr.iter().fold(0.0f64, |m, &v| m.max(-v));
    let threshold = tau.max(global) + TIE_MARGIN;

    let mask: Vec<bool> = corr.iter().map(|&v| v > threshold).collect();
    let mut label = vec![0u32; n * n];
    let mut best: Option<(u32, usize)> = None;
    let mut next = 0u32;
    let mut queue = VecDeque::new();
    for start in 0..n * n {
        if !mask[start] || label[start] != 0 {
            continue;
        }
        next += 1;
        label[start] = next;
        queue.push_back(start);
        let mut area = 0usize;
        while let Some(c) = queue.pop_front() {
            area += 1;
            let (r, col) = (c / n, c % n);
            let mut visit = |nb: usize| {
                if mask[nb] && label[nb] == 0 {
                    label[nb] = next;
                    queue.push_back(nb);
                }
            };
            if r > 0 {
                visit(c - n);
            }
            if r + 1 < n {
                visit(c + n);
            }
            if col > 0 {
                visit(c - 1);
            }
            if col + 1 < n {
                visit(c + 1);
            }
        }
        if best.is_none_or(|(_, a)| area > a) {
            best = Some((next, area));
        }
    }

    match best {
        Some((id, area)) if area >= 2 * n => {
            let mut arg = usize::MAX;
            for c in 0..n * n {
                if label[c] == id && (arg == usize::MAX || corr[c] > corr[arg]) {
                    arg = c;
                }
            }
            (corr[arg], (arg / n + 1, arg % n + 1))
        }
        _ => (global, (n, n)),
    }
}
