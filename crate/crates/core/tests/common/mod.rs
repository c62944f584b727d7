//! Naive reference implementations used as oracles by the integration tests.
//!
//! Everything here works on plain nested vectors with direct loops and
//! shares no code with the library.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<f64>>;

pub fn random_rows(rng: &mut ChaCha8Rng, n: usize, dim: usize) -> Mat {
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random_range(-2.0..2.0)).collect())
        .collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(p, q)| (p - q) * (p - q))
        .sum::<f64>()
        .sqrt()
}

pub fn distances(x: &Mat) -> Mat {
    x.iter()
        .map(|a| x.iter().map(|b| euclid(a, b)).collect())
        .collect()
}

/// Subtracts from each entry its column sum divided by `n - 1`.
pub fn center(d: &Mat) -> Mat {
    let n = d.len();
    let mut out = vec![vec![0.0; n]; n];
    for j in 0..n {
        let mut s = 0.0;
        for row in d {
            s += row[j];
        }
        for i in 0..n {
            out[i][j] = d[i][j] - s / (n as f64 - 1.0);
        }
    }
    out
}

pub fn dcov(a: &Mat, b: &Mat) -> f64 {
    let n = a.len();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            s += a[i][j] * b[j][i];
        }
    }
    s / (n * (n - 1)) as f64
}

pub fn corr_from(c: f64, va: f64, vb: f64) -> f64 {
    if va * vb > 0.0 {
        c / (va * vb).sqrt()
    } else {
        0.0
    }
}

pub fn dcorr(x: &Mat, y: &Mat) -> f64 {
    let a = center(&distances(x));
    let b = center(&distances(y));
    corr_from(dcov(&a, &b), dcov(&a, &a), dcov(&b, &b))
}

/// Rank of `a[i][j]` within row `i`: entries strictly smaller, plus equal
/// entries at a smaller column.
pub fn rank(a: &Mat, i: usize, j: usize) -> usize {
    (0..a.len())
        .filter(|&s| a[i][s] < a[i][j] || (a[i][s] == a[i][j] && s < j))
        .count()
}

/// Local correlation at 1-based scale `(k, l)` by direct summation.
pub fn local_corr(a: &Mat, b: &Mat, k: usize, l: usize) -> f64 {
    let n = a.len();
    let g = |i: usize, j: usize| rank(a, i, j) < k;
    let h = |i: usize, j: usize| rank(b, i, j) < l;
    let (mut c, mut va, mut vb) = (0.0, 0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            if g(i, j) && h(j, i) {
                c += a[i][j] * b[j][i];
            }
            if g(i, j) && g(j, i) {
                va += a[i][j] * a[j][i];
            }
            if h(i, j) && h(j, i) {
                vb += b[i][j] * b[j][i];
            }
        }
    }
    corr_from(c, va, vb)
}

/// Grid indexed `[k-1][l-1]`.
pub fn local_grid(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    (1..=n)
        .map(|k| (1..=n).map(|l| local_corr(a, b, k, l)).collect())
        .collect()
}

fn find(parent: &mut [usize], mut c: usize) -> usize {
    while parent[c] != c {
        parent[c] = parent[parent[c]];
        c = parent[c];
    }
    c
}

/// Smoothed maximum via union-find labelling of qualifying cells.
#[allow(clippy::needless_range_loop)]
pub fn smoothed(grid: &Mat) -> (f64, (usize, usize)) {
    let n = grid.len();
    let global = grid[n - 1][n - 1];
    let mut tau: f64 = 0.0;
    for row in grid {
        for &v in row {
            tau = tau.max(-v);
        }
    }
    // values within rounding of the threshold count as equal to it
    let thr = tau.max(global) + 1e-12;
    let on = |r: usize, c: usize| grid[r][c] > thr;
    let mut parent: Vec<usize> = (0..n * n).collect();
    for r in 0..n {
        for c in 0..n {
            if !on(r, c) {
                continue;
            }
            if r + 1 < n && on(r + 1, c) {
                let (p, q) = (
                    find(&mut parent, r * n + c),
                    find(&mut parent, (r + 1) * n + c),
                );
                parent[p.max(q)] = p.min(q);
            }
            if c + 1 < n && on(r, c + 1) {
                let (p, q) = (
                    find(&mut parent, r * n + c),
                    find(&mut parent, r * n + c + 1),
                );
                parent[p.max(q)] = p.min(q);
            }
        }
    }
    // component size keyed by root; the root is the component's first cell
    let mut size = vec![0usize; n * n];
    for cell in 0..n * n {
        if on(cell / n, cell % n) {
            let root = find(&mut parent, cell);
            size[root] += 1;
        }
    }
    let mut best_root = None;
    for root in 0..n * n {
        if size[root] > 0 && best_root.is_none_or(|b: usize| size[root] > size[b]) {
            best_root = Some(root);
        }
    }
    match best_root {
        Some(root) if size[root] >= 2 * n => {
            let mut best = (f64::NEG_INFINITY, (0, 0));
            for r in 0..n {
                for c in 0..n {
                    if on(r, c) && find(&mut parent, r * n + c) == root && grid[r][c] > best.0 {
                        best = (grid[r][c], (r + 1, c + 1));
                    }
                }
            }
            best
        }
        _ => (global, (n, n)),
    }
}

pub fn mgc(x: &Mat, y: &Mat) -> f64 {
    let a = center(&distances(x));
    let b = center(&distances(y));
    smoothed(&local_grid(&a, &b)).0
}

/// `sum_j (n-j)/n * T(x[j..], y[..n-j])`.
pub fn lagged_sum(x: &Mat, y: &Mat, m: usize, stat: fn(&Mat, &Mat) -> f64) -> f64 {
    let n = x.len();
    (0..=m)
        .map(|j| (n - j) as f64 / n as f64 * stat(&x[j..].to_vec(), &y[..n - j].to_vec()))
        .sum()
}

/// Index sequence of a block permutation with the given block order.
pub fn block_indices(n: usize, b: usize, order: &[usize]) -> Vec<usize> {
    (0..n).map(|p| (b * order[p / b] + p % b) % n).collect()
}

pub fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

pub fn var(v: &[f64]) -> f64 {
    let m = mean(v);
    v.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (v.len() as f64 - 1.0)
}

pub fn column(x: &Mat, c: usize) -> Vec<f64> {
    x.iter().map(|r| r[c]).collect()
}
