mod overlay;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;
use tsdep::harness::{
    emit_results, ingest_csv, render, run_lag_experiment, run_pairwise_analysis,
    run_power_experiment, CsvOptions, ExperimentSpec, LabeledSeries, OutputFormat, PairwiseConfig,
    Results,
};
use tsdep::{permutation_test, BlockSize, Error, Process, StatisticKind, TestConfig};

use overlay::Overlay;

#[derive(Parser)]
#[command(
    name = "tsdep",
    version,
    about = "Independence tests and Monte-Carlo experiments for time series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Rejection rates of each test over simulated trials.
    Power(ExperimentArgs),
    /// Histogram of optimal-lag estimates over simulated trials (max lag defaults to 10).
    Lags(ExperimentArgs),
    /// MGCX p-values, optimal lags and scales for every ordered pair of CSV series.
    Pairwise(PairwiseArgs),
    /// Permutation test of one pair of series read from CSV.
    Test(TestArgs),
    /// Emit one simulated pair of series.
    Simulate(SimulateArgs),
}

#[derive(Args)]
struct ProcessArgs {
    /// indep_ar1 | cross_ar1 | nonlin_lag1 | extinct_ar1 | cross_ar13 | nonlin_lag3
    #[arg(long)]
    process: Option<String>,
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi1: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    phi3: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    radius: Option<f64>,
    /// Scale AR(1) innovations to variance 1 - phi^2 (indep_ar1 only).
    #[arg(long)]
    noise_scaling: bool,
}

impl ProcessArgs {
    fn any_parameter(&self) -> bool {
        self.phi.is_some()
            || self.phi1.is_some()
            || self.phi3.is_some()
            || self.delta.is_some()
            || self.radius.is_some()
            || self.noise_scaling
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args)]
struct ExperimentArgs {
    /// JSON experiment spec; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    process: ProcessArgs,
    #[arg(long)]
    n: Option<usize>,
    /// Sweep over `n`, `phi` or `delta`, e.g. `n=60,120,300`.
    #[arg(long)]
    sweep: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// Permutation replicates per test.
    #[arg(long)]
    reps: Option<usize>,
    /// Block length, or `auto` for ceil(sqrt(n)).
    #[arg(long)]
    block_size: Option<String>,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Repeatable: dcorrx | mgcx | ljungbox.
    #[arg(long = "test")]
    tests: Vec<String>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct InputArgs {
    /// CSV file with one column per series.
    input: PathBuf,
    /// First row holds column names.
    #[arg(long)]
    header: bool,
    /// Consecutive columns forming one multivariate series.
    #[arg(long, default_value_t = 1)]
    group_size: usize,
}

#[derive(Args)]
struct PairwiseArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Maximum lag of the MGCX test producing p-values.
    #[arg(long)]
    max_lag: Option<usize>,
    /// Maximum lag searched for the optimal lag.
    #[arg(long)]
    max_lag_search: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    block_size: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TestArgs {
    #[command(flatten)]
    input: InputArgs,
    #[arg(long)]
    config: Option<PathBuf>,
    /// Label of the `X` series; defaults to the first series.
    #[arg(long)]
    x: Option<String>,
    /// Label of the `Y` series; defaults to the second series.
    #[arg(long)]
    y: Option<String>,
    /// dcorrx | mgcx | ljungbox
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    max_lag: Option<usize>,
    #[arg(long)]
    reps: Option<usize>,
    #[arg(long)]
    block_size: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[command(flatten)]
    process: ProcessArgs,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct PairwiseFile {
    #[serde(default = "one")]
    max_lag: usize,
    #[serde(default = "ten")]
    max_lag_search: usize,
    #[serde(default = "hundred")]
    replicates: usize,
    #[serde(default)]
    block_size: BlockSize,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TestFile {
    #[serde(default = "mgcx")]
    test: StatisticKind,
    #[serde(default = "one")]
    max_lag: usize,
    #[serde(default = "hundred")]
    replicates: usize,
    #[serde(default)]
    block_size: BlockSize,
    #[serde(default)]
    seed: u64,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct SimulateFile {
    process: Process,
    n: usize,
    #[serde(default)]
    seed: u64,
}

fn one() -> usize {
    1
}

fn ten() -> usize {
    10
}

fn hundred() -> usize {
    100
}

fn mgcx() -> StatisticKind {
    StatisticKind::Mgcx
}

pub enum CliError {
    Config(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Lib(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Lib(Error::Config { .. } | Error::NonStationary(_)) => {
                2
            }
            CliError::Lib(Error::Ingest { .. } | Error::IngestFile { .. }) => 3,
            CliError::Lib(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Lib(e) => e.fmt(f),
        }
    }
}

fn write_output(results: &Results, out: &OutputArgs) -> Result<(), CliError> {
    let format = match out.format {
        Format::Csv => OutputFormat::Csv,
        Format::Json => OutputFormat::Json,
    };
    match &out.out {
        Some(path) => emit_results(results, format, path)?,
        None => print!("{}", render(results, format)?),
    }
    Ok(())
}

fn experiment_spec(args: &ExperimentArgs, lags: bool) -> Result<ExperimentSpec, CliError> {
    let mut o = Overlay::load(args.config.as_deref())?;
    o.process(&args.process)?;
    o.set("n", args.n);
    o.sweep(args.sweep.as_deref())?;
    o.set("trials", args.trials);
    o.set("alpha", args.alpha);
    o.set("replicates", args.reps);
    o.block_size(args.block_size.as_deref())?;
    o.set("max_lag", args.max_lag);
    o.set("seed", args.seed);
    o.tests(&args.tests)?;
    if lags {
        o.default("max_lag", 10);
    }
    let spec: ExperimentSpec = o.finish()?;
    spec.validate()?;
    Ok(spec)
}

fn read_series(input: &InputArgs) -> Result<Vec<LabeledSeries>, CliError> {
    let opts = CsvOptions {
        header: input.header,
        group_size: input.group_size,
    };
    Ok(ingest_csv(&input.input, opts)?)
}

fn pick<'a>(
    series: &'a [LabeledSeries],
    label: Option<&str>,
    fallback: usize,
) -> Result<&'a LabeledSeries, CliError> {
    match label {
        Some(l) => series
            .iter()
            .find(|s| s.label == l)
            .ok_or_else(|| CliError::Config(format!("no series labelled `{l}`"))),
        None => series.get(fallback).ok_or_else(|| {
            CliError::Config(format!(
                "input has {} series, need at least 2",
                series.len()
            ))
        }),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Power(args) => {
            let spec = experiment_spec(&args, false)?;
            write_output(&Results::Power(run_power_experiment(&spec)?), &args.output)
        }
        Command::Lags(args) => {
            let spec = experiment_spec(&args, true)?;
            write_output(&Results::Lags(run_lag_experiment(&spec)?), &args.output)
        }
        Command::Pairwise(args) => {
            let mut o = Overlay::load(args.config.as_deref())?;
            o.set("max_lag", args.max_lag);
            o.set("max_lag_search", args.max_lag_search);
            o.set("replicates", args.reps);
            o.block_size(args.block_size.as_deref())?;
            o.set("seed", args.seed);
            let file: PairwiseFile = o.finish()?;
            let series = read_series(&args.input)?;
            let cfg = PairwiseConfig {
                max_lag_pvalue: file.max_lag,
                max_lag_search: file.max_lag_search,
                replicates: file.replicates,
                block_size: file.block_size,
                seed: file.seed,
                ..PairwiseConfig::default()
            };
            write_output(
                &Results::Pairwise(run_pairwise_analysis(&series, &cfg)?),
                &args.output,
            )
        }
        Command::Test(args) => {
            let mut o = Overlay::load(args.config.as_deref())?;
            if let Some(t) = &args.test {
                o.set("test", Some(t.parse::<StatisticKind>()?));
            }
            o.set("max_lag", args.max_lag);
            o.set("replicates", args.reps);
            o.block_size(args.block_size.as_deref())?;
            o.set("seed", args.seed);
            let file: TestFile = o.finish()?;
            let series = read_series(&args.input)?;
            let x = pick(&series, args.x.as_deref(), 0)?;
            let y = pick(&series, args.y.as_deref(), 1)?;
            let cfg = TestConfig::new(file.test)
                .max_lag(file.max_lag)
                .replicates(file.replicates)
                .block_size(file.block_size)
                .seed(file.seed);
            write_output(
                &Results::Test(permutation_test(&x.series, &y.series, &cfg)?),
                &args.output,
            )
        }
        Command::Simulate(args) => {
            let mut o = Overlay::load(args.config.as_deref())?;
            o.process(&args.process)?;
            o.set("n", args.n);
            o.set("seed", args.seed);
            let file: SimulateFile = o.finish()?;
            let pair = file.process.generate(file.n, file.seed)?;
            write_output(&Results::Series(pair), &args.output)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tsdep: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cli_definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }

    #[test]
    fn exit_codes_by_error_kind() {
        assert_eq!(CliError::Config("x".into()).exit_code(), 2);
        assert_eq!(CliError::Lib(Error::NonStationary(1.2)).exit_code(), 2);
        let ingest = Error::IngestFile {
            path: "f".into(),
            message: "m".into(),
        };
        assert_eq!(CliError::Lib(ingest).exit_code(), 3);
        assert_eq!(CliError::Lib(Error::SamplerExhausted(10)).exit_code(), 4);
    }
}
