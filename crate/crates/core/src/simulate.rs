//! Bivariate process generators.
//!
//! Every generator runs `n + BURN_IN` steps from zero initial conditions and
//! keeps the last `n`. Innovations are standard normal unless stated.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seed::{stream, StreamRng};
use crate::series::{SeriesMatrix, TimeSeriesPair};

pub const BURN_IN: usize = 200;
pub const MAX_REJECTION_ATTEMPTS: usize = 1_000_000;

/// Declarative process description; `generate` is deterministic in `(self, n, seed)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Process {
    /// `X_t = phi X_{t-1} + e_t`, `Y_t = phi Y_{t-1} + h_t`, independent.
    /// With `noise_scaling` the innovation variance is `1 - phi^2`.
    IndepAr1 {
        phi: f64,
        #[serde(default)]
        noise_scaling: bool,
    },
    /// `X_t = phi Y_{t-1} + e_t`, `Y_t = phi X_{t-1} + h_t`.
    CrossAr1 { phi: f64 },
    /// `X_t = e_t Y_{t-1}`, `Y_t = h_t`.
    NonlinLag1,
    /// Independent AR(1) dynamics driven by extinct-Gaussian innovation pairs.
    ExtinctAr1 { phi: f64, delta: f64, radius: f64 },
    /// `X_t = phi1 Y_{t-1} + phi3 Y_{t-3} + e_t` and symmetrically for `Y`.
    CrossAr13 { phi1: f64, phi3: f64 },
    /// `X_t = e_t Y_{t-3}`, `Y_t = h_t`.
    NonlinLag3,
}

impl Process {
    pub fn name(&self) -> &'static str {
        match self {
            Process::IndepAr1 { .. } => "indep_ar1",
            Process::CrossAr1 { .. } => "cross_ar1",
            Process::NonlinLag1 => "nonlin_lag1",
            Process::ExtinctAr1 { .. } => "extinct_ar1",
            Process::CrossAr13 { .. } => "cross_ar13",
            Process::NonlinLag3 => "nonlin_lag3",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let stationary = |phi: f64| {
            if phi.is_finite() && phi.abs() < 1.0 {
                Ok(())
            } else {
                Err(Error::NonStationary(phi.abs()))
            }
        };
        match *self {
            Process::IndepAr1 { phi, .. } | Process::CrossAr1 { phi } => stationary(phi),
            Process::ExtinctAr1 { phi, delta, radius } => {
                stationary(phi)?;
                if !(0.0..1.0).contains(&delta) {
                    return Err(Error::config("delta", format!("{delta} not in [0, 1)")));
                }
                if !(radius > 0.0 && radius.is_finite()) {
                    return Err(Error::config(
                        "radius",
                        format!("{radius} must be positive"),
                    ));
                }
                Ok(())
            }
            // |phi1| + |phi3| < 1 keeps every root of the lag polynomial outside the unit circle.
            Process::CrossAr13 { phi1, phi3 } => stationary(phi1.abs() + phi3.abs()),
            Process::NonlinLag1 | Process::NonlinLag3 => Ok(()),
        }
    }

    pub fn generate(&self, n: usize, seed: u64) -> Result<TimeSeriesPair> {
        self.validate()?;
        if n < 2 {
            return Err(Error::Degenerate { needed: 2, got: n });
        }
        let mut rng = stream(seed);
        let total = n + BURN_IN;
        let mut x = vec![0.0; total];
        let mut y = vec![0.0; total];
        match *self {
            Process::IndepAr1 { phi, noise_scaling } => {
                let s = if noise_scaling {
                    (1.0 - phi * phi).sqrt()
                } else {
                    1.0
                };
                for t in 1..total {
                    let (e, h) = normal_pair(&mut rng);
                    x[t] = phi * x[t - 1] + s * e;
                    y[t] = phi * y[t - 1] + s * h;
                }
            }
            Process::CrossAr1 { phi } => {
                for t in 1..total {
                    let (e, h) = normal_pair(&mut rng);
                    x[t] = phi * y[t - 1] + e;
                    y[t] = phi * x[t - 1] + h;
                }
            }
            Process::NonlinLag1 => nonlinear_lag(&mut rng, &mut x, &mut y, 1),
            Process::ExtinctAr1 { phi, delta, radius } => {
                for t in 1..total {
                    let (e, h) = extinct_gaussian_draw(&mut rng, delta, radius)?;
                    x[t] = phi * x[t - 1] + e;
                    y[t] = phi * y[t - 1] + h;
                }
            }
            Process::CrossAr13 { phi1, phi3 } => {
                for t in 0..total {
                    let (e, h) = normal_pair(&mut rng);
                    let (y1, x1) = if t >= 1 {
                        (y[t - 1], x[t - 1])
                    } else {
                        (0.0, 0.0)
                    };
                    let (y3, x3) = if t >= 3 {
                        (y[t - 3], x[t - 3])
                    } else {
                        (0.0, 0.0)
                    };
                    x[t] = phi1 * y1 + phi3 * y3 + e;
                    y[t] = phi1 * x1 + phi3 * x3 + h;
                }
            }
            Process::NonlinLag3 => nonlinear_lag(&mut rng, &mut x, &mut y, 3),
        }
        TimeSeriesPair::new(
            SeriesMatrix::univariate(x.split_off(BURN_IN))?,
            SeriesMatrix::univariate(y.split_off(BURN_IN))?,
        )
    }
}

fn normal_pair<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    (StandardNormal.sample(rng), StandardNormal.sample(rng))
}

/// `Y_t = h_t`, `X_t = e_t Y_{t-lag}`; the first `lag` values of `X` use `Y = 0`.
fn nonlinear_lag<R: Rng + ?Sized>(rng: &mut R, x: &mut [f64], y: &mut [f64], lag: usize) {
    for t in 0..x.len() {
        let (e, h) = normal_pair(rng);
        y[t] = h;
        x[t] = if t >= lag { e * y[t - lag] } else { 0.0 };
    }
}

/// One innovation pair from the extinct Gaussian.
///
/// Draws independent standard normals `(e, h)` and `U ~ Unif(0,1)`; the pair is
/// returned if `e^2 + h^2 > radius` or `U > delta`, and redrawn otherwise.
/// `radius` bounds the squared norm.
pub fn extinct_gaussian_draw<R: Rng + ?Sized>(
    rng: &mut R,
    delta: f64,
    radius: f64,
) -> Result<(f64, f64)> {
    for _ in 0..MAX_REJECTION_ATTEMPTS {
        let (e, h) = normal_pair(rng);
        let u: f64 = rng.random();
        if e * e + h * h > radius || u > delta {
            return Ok((e, h));
        }
    }
    Err(Error::SamplerExhausted(MAX_REJECTION_ATTEMPTS))
}

/// `count` extinct-Gaussian pairs from a seeded stream.
pub fn extinct_gaussian_innovation(
    delta: f64,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let mut rng: StreamRng = stream(seed);
    (0..count)
        .map(|_| extinct_gaussian_draw(&mut rng, delta, radius))
        .collect()
}

pub fn gen_indep_ar1(n: usize, phi: f64, noise_scaling: bool, seed: u64) -> Result<TimeSeriesPair> {
    Process::IndepAr1 { phi, noise_scaling }.generate(n, seed)
}

pub fn gen_cross_ar1(n: usize, phi: f64, seed: u64) -> Result<TimeSeriesPair> {
    Process::CrossAr1 { phi }.generate(n, seed)
}

pub fn gen_nonlin_lag1(n: usize, seed: u64) -> Result<TimeSeriesPair> {
    Process::NonlinLag1.generate(n, seed)
}

pub fn gen_extinct_ar1(
    n: usize,
    phi: f64,
    delta: f64,
    radius: f64,
    seed: u64,
) -> Result<TimeSeriesPair> {
    Process::ExtinctAr1 { phi, delta, radius }.generate(n, seed)
}

pub fn gen_cross_ar13(n: usize, phi1: f64, phi3: f64, seed: u64) -> Result<TimeSeriesPair> {
    Process::CrossAr13 { phi1, phi3 }.generate(n, seed)
}

pub fn gen_nonlin_lag3(n: usize, seed: u64) -> Result<TimeSeriesPair> {
    Process::NonlinLag3.generate(n, seed)
}
