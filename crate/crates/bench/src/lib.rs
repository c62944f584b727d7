//! Shared fixtures for the kernel benchmarks.

use tsdep::{gen_nonlin_lag1, TimeSeriesPair};

pub fn fixture(n: usize) -> TimeSeriesPair {
    gen_nonlin_lag1(n, 42).expect("fixture generation")
}
