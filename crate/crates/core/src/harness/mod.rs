//! Monte-Carlo experiments, pairwise multi-series analysis and result I/O.

mod experiment;
mod io;
mod pairwise;

pub use experiment::{
    run_lag_experiment, run_power_experiment, ExperimentSpec, LagHistogram, PowerEstimate, Sweep,
    SweepVariable,
};
pub use io::{
    emit_results, ingest_csv, render, round_sig, CsvOptions, LabeledSeries, OutputFormat, Results,
    SCHEMA_VERSION,
};
pub use pairwise::{run_pairwise_analysis, PairwiseAnalysis, PairwiseConfig};
