//! Block permutation of the `Y` series and permutation p-values.
//!
//! Indices are split into `ceil(n/b)` blocks of length `b`; block `i` covers
//! `b*i .. b*i + b` (0-based) with indices past the end wrapped modulo `n`.
//! Blocks are concatenated in a uniformly random order and the result is
//! truncated to `n`. Replicate `r` draws its order from a stream seeded by
//! `derive_seed(seed, [r])`, so results do not depend on scheduling.

use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::ljung_box_cross_values;
use crate::cross::{
    check_lengths, check_max_lag, lag_weight, optimal_lag, LagStatistic, LaggedStatistics,
};
use crate::distance::{
    column_center, dcorr_sample, pairwise_distances, CenteredMatrix, DistanceMatrix, Metric,
};
use crate::error::{Error, Result};
use crate::local::{local_corr_map_ranked, RankedSide};
use crate::seed::{derive_seed, stream};
use crate::series::SeriesMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StatisticKind {
    #[serde(alias = "DCorrX")]
    Dcorrx,
    #[serde(alias = "MGCX")]
    Mgcx,
    #[serde(alias = "ljung-box", alias = "ljung-box-cross")]
    Ljungbox,
}

impl StatisticKind {
    pub fn name(self) -> &'static str {
        match self {
            StatisticKind::Dcorrx => "dcorrx",
            StatisticKind::Mgcx => "mgcx",
            StatisticKind::Ljungbox => "ljungbox",
        }
    }
}

impl std::fmt::Display for StatisticKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for StatisticKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "dcorrx" => Ok(StatisticKind::Dcorrx),
            "mgcx" => Ok(StatisticKind::Mgcx),
            "ljungbox" | "ljung-box" | "ljung-box-cross" => Ok(StatisticKind::Ljungbox),
            other => Err(Error::config("test", format!("unknown test `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BlockSize {
    /// `ceil(sqrt(n))`
    #[default]
    Auto,
    #[serde(untagged)]
    Fixed(usize),
}

impl BlockSize {
    pub fn resolve(self, n: usize) -> usize {
        match self {
            BlockSize::Auto => (n as f64).sqrt().ceil().max(1.0) as usize,
            BlockSize::Fixed(b) => b,
        }
    }
}

impl std::str::FromStr for BlockSize {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.eq_ignore_ascii_case("auto") {
            return Ok(BlockSize::Auto);
        }
        match s.parse::<usize>() {
            Ok(b) if b >= 1 => Ok(BlockSize::Fixed(b)),
            _ => Err(Error::config(
                "block_size",
                format!("expected `auto` or a positive integer, got `{s}`"),
            )),
        }
    }
}

/// How the replicate count becomes a p-value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PValueRule {
    /// `#{T_r >= T} / R`
    #[default]
    Literal,
    /// `(1 + #{T_r >= T}) / (1 + R)`
    AddOne,
}

impl PValueRule {
    pub fn p_value(self, exceed: usize, r: usize) -> f64 {
        match self {
            PValueRule::Literal => exceed as f64 / r as f64,
            PValueRule::AddOne => (exceed + 1) as f64 / (r + 1) as f64,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPermutationPlan {
    pub n: usize,
    pub block_size: usize,
    pub num_blocks: usize,
    pub seed: u64,
}

impl BlockPermutationPlan {
    pub fn new(n: usize, block_size: usize, seed: u64) -> Result<Self> {
        if block_size == 0 {
            return Err(Error::InvalidInput("block size must be at least 1".into()));
        }
        if n == 0 {
            return Err(Error::Degenerate { needed: 1, got: 0 });
        }
        Ok(BlockPermutationPlan {
            n,
            block_size,
            num_blocks: n.div_ceil(block_size),
            seed,
        })
    }

    /// Row sequence (0-based) produced by a given block order.
    pub fn indices_for_order(&self, order: &[usize]) -> Vec<usize> {
        let (n, b) = (self.n, self.block_size);
        let mut out = Vec::with_capacity(order.len() * b);
        for &i in order {
            out.extend((b * i..b * i + b).map(|idx| idx % n));
        }
        out.truncate(n);
        out
    }

    pub fn random_order<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.num_blocks).collect();
        order.shuffle(rng);
        order
    }

    /// Row sequence for replicate `r`.
    pub fn indices(&self, replicate: u64) -> Vec<usize> {
        let mut rng = stream(derive_seed(self.seed, &[replicate]));
        let order = self.random_order(&mut rng);
        self.indices_for_order(&order)
    }
}

/// Reorders `y` by a random block permutation drawn from `rng`.
pub fn block_permute<R: Rng + ?Sized>(
    y: &SeriesMatrix,
    b: usize,
    rng: &mut R,
) -> Result<SeriesMatrix> {
    let plan = BlockPermutationPlan::new(y.len(), b, 0)?;
    let order = plan.random_order(rng);
    Ok(y.select_rows(&plan.indices_for_order(&order)))
}

#[derive(Debug, Clone)]
pub struct TestConfig {
    pub kind: StatisticKind,
    pub max_lag: usize,
    pub replicates: usize,
    pub block_size: BlockSize,
    pub seed: u64,
    pub metric: Metric,
    pub p_value_rule: PValueRule,
}

impl TestConfig {
    pub fn new(kind: StatisticKind) -> Self {
        TestConfig {
            kind,
            max_lag: 1,
            replicates: 100,
            block_size: BlockSize::Auto,
            seed: 0,
            metric: Metric::Euclidean,
            p_value_rule: PValueRule::Literal,
        }
    }

    pub fn max_lag(mut self, m: usize) -> Self {
        self.max_lag = m;
        self
    }

    pub fn replicates(mut self, r: usize) -> Self {
        self.replicates = r;
        self
    }

    pub fn block_size(mut self, b: BlockSize) -> Self {
        self.block_size = b;
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn metric(mut self, m: Metric) -> Self {
        self.metric = m;
        self
    }

    pub fn p_value_rule(mut self, rule: PValueRule) -> Self {
        self.p_value_rule = rule;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConfigEcho {
    pub kind: StatisticKind,
    pub max_lag: usize,
    pub block_size: usize,
    pub replicates: usize,
    pub seed: u64,
    pub p_value_rule: PValueRule,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub replicates: Vec<f64>,
    pub optimal_lag: usize,
    pub per_lag: LaggedStatistics,
    pub config: ConfigEcho,
}

/// Precomputed state for evaluating one statistic on `(x, y[indices])` many times.
///
/// Everything on the `X` side (distances, centering, ranks per lag) is fixed
/// across replicates; the `Y` side reuses the full distance matrix and only
/// re-gathers and re-centers it.
pub struct StatisticEngine {
    kind: StatisticKind,
    n: usize,
    max_lag: usize,
    x_lags: Vec<CenteredMatrix>,
    x_ranks: Vec<RankedSide>,
    y_dist: Option<DistanceMatrix>,
    x_values: Vec<f64>,
    y_values: Vec<f64>,
}

impl StatisticEngine {
    pub fn new(
        x: &SeriesMatrix,
        y: &SeriesMatrix,
        kind: StatisticKind,
        max_lag: usize,
        metric: &Metric,
    ) -> Result<Self> {
        let n = check_lengths(x, y)?;
        check_max_lag(n, max_lag)?;
        let mut engine = StatisticEngine {
            kind,
            n,
            max_lag,
            x_lags: Vec::new(),
            x_ranks: Vec::new(),
            y_dist: None,
            x_values: Vec::new(),
            y_values: Vec::new(),
        };
        match kind {
            StatisticKind::Ljungbox => {
                for (s, name) in [(x, "x"), (y, "y")] {
                    if s.dim() != 1 {
                        return Err(Error::InvalidInput(format!(
                            "Ljung-Box cross statistic needs a univariate `{name}`"
                        )));
                    }
                }
                engine.x_values = x.values().to_vec();
                engine.y_values = y.values().to_vec();
            }
            StatisticKind::Dcorrx | StatisticKind::Mgcx => {
                let dx = pairwise_distances(x, metric)?;
                for j in 0..=max_lag {
                    let a = column_center(&dx.trailing(n - j))?;
                    if kind == StatisticKind::Mgcx {
                        engine.x_ranks.push(RankedSide::new(&a));
                    }
                    engine.x_lags.push(a);
                }
                engine.y_dist = Some(pairwise_distances(y, metric)?);
            }
        }
        Ok(engine)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Statistic on `(x, y)` with `y` reordered by `indices` (length `n`).
    pub fn evaluate(&self, indices: &[usize]) -> Result<(f64, LaggedStatistics)> {
        debug_assert_eq!(indices.len(), self.n);
        if self.kind == StatisticKind::Ljungbox {
            let y: Vec<f64> = indices.iter().map(|&i| self.y_values[i]).collect();
            return ljung_box_cross_values(&self.x_values, &y, self.max_lag);
        }
        let y_dist = self.y_dist.as_ref().expect("distance-based engine");
        let n = self.n;
        let mut per_lag = Vec::with_capacity(self.max_lag + 1);
        for j in 0..=self.max_lag {
            let b = column_center(&y_dist.gather(&indices[..n - j]))?;
            let a = &self.x_lags[j];
            let (value, scale) = match self.kind {
                StatisticKind::Dcorrx => (dcorr_sample(a, &b)?, None),
                _ => {
                    let rb = RankedSide::new(&b);
                    let map = local_corr_map_ranked(a, &self.x_ranks[j], &rb);
                    (map.statistic(), Some(map.optimal_scale()))
                }
            };
            per_lag.push(LagStatistic {
                lag: j,
                weight: lag_weight(n, j),
                value,
                scale,
                pairs: n - j,
            });
        }
        let stats = LaggedStatistics {
            n,
            max_lag: self.max_lag,
            per_lag,
        };
        Ok((stats.total(), stats))
    }

    pub fn observed(&self) -> Result<(f64, LaggedStatistics)> {
        let id: Vec<usize> = (0..self.n).collect();
        self.evaluate(&id)
    }
}

/// Block-permutation test of `X_t` against `Y_{t-j}`, `j = 0..=M`.
pub fn permutation_test(
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    config: &TestConfig,
) -> Result<TestResult> {
    if config.replicates == 0 {
        return Err(Error::InvalidInput(
            "replicate count must be at least 1".into(),
        ));
    }
    let engine = StatisticEngine::new(x, y, config.kind, config.max_lag, &config.metric)?;
    let n = engine.n();
    let plan = BlockPermutationPlan::new(n, config.block_size.resolve(n), config.seed)?;
    let (statistic, per_lag) = engine.observed()?;
    let replicates = (0..config.replicates as u64)
        .into_par_iter()
        .map(|r| engine.evaluate(&plan.indices(r)).map(|(t, _)| t))
        .collect::<Result<Vec<f64>>>()?;
    let exceed = replicates.iter().filter(|&&t| t >= statistic).count();
    Ok(TestResult {
        statistic,
        p_value: config.p_value_rule.p_value(exceed, config.replicates),
        optimal_lag: optimal_lag(&per_lag)?,
        per_lag,
        replicates,
        config: ConfigEcho {
            kind: config.kind,
            max_lag: config.max_lag,
            block_size: plan.block_size,
            replicates: config.replicates,
            seed: config.seed,
            p_value_rule: config.p_value_rule,
        },
    })
}

/// Ljung-Box cross-correlation test with a block-permutation p-value.
pub fn ljung_box_cross_test(
    x: &SeriesMatrix,
    y: &SeriesMatrix,
    max_lag: usize,
    replicates: usize,
    block_size: BlockSize,
    seed: u64,
) -> Result<TestResult> {
    let config = TestConfig::new(StatisticKind::Ljungbox)
        .max_lag(max_lag)
        .replicates(replicates)
        .block_size(block_size)
        .seed(seed);
    permutation_test(x, y, &config)
}
