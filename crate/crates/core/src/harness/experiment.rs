use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cross::optimal_lag;
use crate::distance::Metric;
use crate::error::{Error, Result};
use crate::permutation::{permutation_test, BlockSize, StatisticEngine, StatisticKind, TestConfig};
use crate::seed::derive_seed;
use crate::simulate::Process;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepVariable {
    N,
    Phi,
    Delta,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

fn default_alpha() -> f64 {
    0.05
}

fn default_replicates() -> usize {
    100
}

fn default_max_lag() -> usize {
    1
}

fn default_tests() -> Vec<StatisticKind> {
    vec![StatisticKind::Dcorrx, StatisticKind::Mgcx]
}

/// One Monte-Carlo experiment: a process template, an optional sweep, and
/// the tests to run on each simulated pair.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    pub process: Process,
    pub n: usize,
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_tests")]
    pub tests: Vec<StatisticKind>,
    pub trials: usize,
    #[serde(default = "default_alpha")]
    pub alpha: f64,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub block_size: BlockSize,
    #[serde(default = "default_max_lag")]
    pub max_lag: usize,
    #[serde(default)]
    pub seed: u64,
}

impl ExperimentSpec {
    pub fn new(process: Process, n: usize) -> Self {
        ExperimentSpec {
            process,
            n,
            sweep: None,
            tests: default_tests(),
            trials: 100,
            alpha: default_alpha(),
            replicates: default_replicates(),
            block_size: BlockSize::Auto,
            max_lag: default_max_lag(),
            seed: 0,
        }
    }

    /// Sweep points as `(value, process, n)`; a spec without a sweep has one
    /// point whose value is `n`.
    pub fn points(&self) -> Result<Vec<(f64, Process, usize)>> {
        let Some(sweep) = &self.sweep else {
            return Ok(vec![(self.n as f64, self.process, self.n)]);
        };
        if sweep.values.is_empty() {
            return Err(Error::config("sweep.values", "must not be empty"));
        }
        sweep
            .values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                let field = format!("sweep.values[{i}]");
                let mut process = self.process;
                let mut n = self.n;
                match sweep.variable {
                    SweepVariable::N => {
                        if v.fract() != 0.0 || v < 2.0 {
                            return Err(Error::config(
                                field,
                                format!("{v} is not a sample size >= 2"),
                            ));
                        }
                        n = v as usize;
                    }
                    SweepVariable::Phi => match &mut process {
                        Process::IndepAr1 { phi, .. }
                        | Process::CrossAr1 { phi }
                        | Process::ExtinctAr1 { phi, .. } => *phi = v,
                        other => {
                            return Err(Error::config(
                                field,
                                format!("process {} has no `phi`", other.name()),
                            ))
                        }
                    },
                    SweepVariable::Delta => match &mut process {
                        Process::ExtinctAr1 { delta, .. } => *delta = v,
                        other => {
                            return Err(Error::config(
                                field,
                                format!("process {} has no `delta`", other.name()),
                            ))
                        }
                    },
                }
                process
                    .validate()
                    .map_err(|e| Error::config(format!("sweep.values[{i}]"), e.to_string()))?;
                Ok((v, process, n))
            })
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::config(
                "alpha",
                format!("{} not in (0, 1)", self.alpha),
            ));
        }
        if self.replicates == 0 {
            return Err(Error::config("replicates", "must be at least 1"));
        }
        if self.tests.is_empty() {
            return Err(Error::config("tests", "at least one test is required"));
        }
        if let BlockSize::Fixed(0) = self.block_size {
            return Err(Error::config("block_size", "must be at least 1"));
        }
        self.process
            .validate()
            .map_err(|e| Error::config("process", e.to_string()))?;
        for (_, _, n) in self.points()? {
            if n < self.max_lag + 2 {
                return Err(Error::config(
                    "max_lag",
                    format!("{} too large for n = {n}", self.max_lag),
                ));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub sweep_value: f64,
    pub test: StatisticKind,
    pub rejection_rate: f64,
    pub stderr: f64,
    pub trials: usize,
}

impl PowerEstimate {
    fn from_count(sweep_value: f64, test: StatisticKind, rejected: usize, trials: usize) -> Self {
        let rate = rejected as f64 / trials as f64;
        PowerEstimate {
            sweep_value,
            test,
            rejection_rate: rate,
            stderr: (rate * (1.0 - rate) / trials as f64).sqrt(),
            trials,
        }
    }
}

/// Seed for the data of trial `t` at sweep point `s`.
fn data_seed(master: u64, s: usize, t: usize) -> u64 {
    derive_seed(master, &[s as u64, t as u64, 0])
}

/// Seed for the permutation stream of test `k` in that trial.
fn test_seed(master: u64, s: usize, t: usize, k: usize) -> u64 {
    derive_seed(master, &[s as u64, t as u64, 1, k as u64])
}

/// Rejection rates per sweep point and test. A trial rejects when `p < alpha`.
pub fn run_power_experiment(spec: &ExperimentSpec) -> Result<Vec<PowerEstimate>> {
    spec.validate()?;
    let mut out = Vec::new();
    for (s, (value, process, n)) in spec.points()?.into_iter().enumerate() {
        let rejections: Vec<Vec<bool>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let pair = process.generate(n, data_seed(spec.seed, s, t))?;
                spec.tests
                    .iter()
                    .enumerate()
                    .map(|(k, &kind)| {
                        let cfg = TestConfig::new(kind)
                            .max_lag(spec.max_lag)
                            .replicates(spec.replicates)
                            .block_size(spec.block_size)
                            .seed(test_seed(spec.seed, s, t, k));
                        Ok(permutation_test(&pair.x, &pair.y, &cfg)?.p_value < spec.alpha)
                    })
                    .collect::<Result<Vec<bool>>>()
            })
            .collect::<Result<_>>()?;
        for (k, &kind) in spec.tests.iter().enumerate() {
            let count = rejections.iter().filter(|r| r[k]).count();
            out.push(PowerEstimate::from_count(value, kind, count, spec.trials));
        }
    }
    Ok(out)
}

/// Frequencies of the optimal-lag estimate over trials.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagHistogram {
    pub sweep_value: f64,
    pub test: StatisticKind,
    /// `counts[j]` = number of trials whose estimate was lag `j`.
    pub counts: Vec<usize>,
    pub trials: usize,
}

impl LagHistogram {
    pub fn frequency(&self, lag: usize) -> f64 {
        self.counts.get(lag).copied().unwrap_or(0) as f64 / self.trials as f64
    }

    /// Most frequent lag, smallest on ties.
    pub fn mode(&self) -> usize {
        let mut best = 0;
        for (j, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = j;
            }
        }
        best
    }
}

/// Histogram of optimal-lag estimates per sweep point and test. No permutations are run.
pub fn run_lag_experiment(spec: &ExperimentSpec) -> Result<Vec<LagHistogram>> {
    spec.validate()?;
    let metric = Metric::Euclidean;
    let mut out = Vec::new();
    for (s, (value, process, n)) in spec.points()?.into_iter().enumerate() {
        let lags: Vec<Vec<usize>> = (0..spec.trials)
            .into_par_iter()
            .map(|t| {
                let pair = process.generate(n, data_seed(spec.seed, s, t))?;
                spec.tests
                    .iter()
                    .map(|&kind| {
                        let engine =
                            StatisticEngine::new(&pair.x, &pair.y, kind, spec.max_lag, &metric)?;
                        optimal_lag(&engine.observed()?.1)
                    })
                    .collect::<Result<Vec<usize>>>()
            })
            .collect::<Result<_>>()?;
        for (k, &kind) in spec.tests.iter().enumerate() {
            let mut counts = vec![0; spec.max_lag + 1];
            for trial in &lags {
                counts[trial[k]] += 1;
            }
            out.push(LagHistogram {
                sweep_value: value,
                test: kind,
                counts,
                trials: spec.trials,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_spec() -> ExperimentSpec {
        let mut spec = ExperimentSpec::new(Process::CrossAr1 { phi: 0.5 }, 30);
        spec.trials = 4;
        spec.replicates = 10;
        spec
    }

    #[test]
    fn validation_names_fields() {
        let mut spec = small_spec();
        spec.alpha = 1.5;
        match spec.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "alpha"),
            other => panic!("{other:?}"),
        }
        let mut spec = small_spec();
        spec.sweep = Some(Sweep {
            variable: SweepVariable::Delta,
            values: vec![0.1],
        });
        match spec.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "sweep.values[0]"),
            other => panic!("{other:?}"),
        }
        let mut spec = small_spec();
        spec.sweep = Some(Sweep {
            variable: SweepVariable::Phi,
            values: vec![0.2, 1.3],
        });
        match spec.validate() {
            Err(Error::Config { field, .. }) => assert_eq!(field, "sweep.values[1]"),
            other => panic!("{other:?}"),
        }
        let mut spec = small_spec();
        spec.trials = 0;
        assert!(spec.validate().is_err());
    }

    #[test]
    fn single_trial_rates_are_binary() {
        let mut spec = small_spec();
        spec.trials = 1;
        spec.tests = vec![StatisticKind::Dcorrx, StatisticKind::Ljungbox];
        for est in run_power_experiment(&spec).unwrap() {
            assert!(est.rejection_rate == 0.0 || est.rejection_rate == 1.0);
            assert_eq!(est.stderr, 0.0);
        }
    }

    #[test]
    fn sweep_over_n_orders_output() {
        let mut spec = small_spec();
        spec.tests = vec![StatisticKind::Dcorrx];
        spec.sweep = Some(Sweep {
            variable: SweepVariable::N,
            values: vec![20.0, 25.0],
        });
        let est = run_power_experiment(&spec).unwrap();
        assert_eq!(est.len(), 2);
        assert_eq!(est[0].sweep_value, 20.0);
        assert_eq!(est[1].sweep_value, 25.0);
    }

    #[test]
    fn lag_zero_histogram_is_degenerate() {
        let mut spec = small_spec();
        spec.max_lag = 0;
        let h = run_lag_experiment(&spec).unwrap();
        for hist in h {
            assert_eq!(hist.counts, vec![4]);
            assert_eq!(hist.mode(), 0);
        }
    }

    #[test]
    fn spec_json_defaults() {
        let spec: ExperimentSpec =
            serde_json::from_str(r#"{"process": {"kind": "nonlin_lag1"}, "n": 50, "trials": 3}"#)
                .unwrap();
        assert_eq!(spec.alpha, 0.05);
        assert_eq!(spec.replicates, 100);
        assert_eq!(spec.block_size, BlockSize::Auto);
        assert_eq!(spec.max_lag, 1);
    }
}
