//! CSV ingestion and CSV/JSON emission.
//!
//! Emitted floats are rounded to 10 significant digits and printed in their
//! shortest round-trip form. JSON documents carry `schema_version` and a
//! `kind` tag; object keys are sorted.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Value};

use super::experiment::{LagHistogram, PowerEstimate};
use super::pairwise::PairwiseAnalysis;
use crate::error::{Error, Result};
use crate::permutation::TestResult;
use crate::series::{SeriesMatrix, TimeSeriesPair};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledSeries {
    pub label: String,
    pub series: SeriesMatrix,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CsvOptions {
    pub header: bool,
    /// Consecutive columns per series; 1 gives one univariate series per column.
    pub group_size: usize,
}

impl Default for CsvOptions {
    fn default() -> Self {
        CsvOptions {
            header: false,
            group_size: 1,
        }
    }
}

/// Reads a rectangular numeric table. Errors carry 1-based file line and column.
pub fn ingest_csv(path: impl AsRef<Path>, opts: CsvOptions) -> Result<Vec<LabeledSeries>> {
    let path = path.as_ref();
    let shown = path.display().to_string();
    let file_err = |message: String| Error::IngestFile {
        path: shown.clone(),
        message,
    };
    if opts.group_size == 0 {
        return Err(Error::config("group_size", "must be at least 1"));
    }
    let text = fs::read_to_string(path).map_err(|e| file_err(e.to_string()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let mut names: Option<Vec<String>> = None;
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for record in reader.records() {
        let record = record.map_err(|e| file_err(e.to_string()))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        let w = *width.get_or_insert(record.len());
        if record.len() != w {
            return Err(Error::Ingest {
                path: shown.clone(),
                row: line,
                col: record.len().min(w) + 1,
                message: format!("expected {w} fields, found {}", record.len()),
            });
        }
        if opts.header && names.is_none() {
            names = Some(record.iter().map(str::to_owned).collect());
            continue;
        }
        if columns.is_empty() {
            columns = vec![Vec::new(); w];
        }
        for (c, field) in record.iter().enumerate() {
            let v: f64 = field.parse().map_err(|_| Error::Ingest {
                path: shown.clone(),
                row: line,
                col: c + 1,
                message: format!("`{field}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Ingest {
                    path: shown.clone(),
                    row: line,
                    col: c + 1,
                    message: format!("`{field}` is not finite"),
                });
            }
            columns[c].push(v);
        }
    }
    let Some(w) = width else {
        return Err(file_err("file is empty".into()));
    };
    if columns.is_empty() || columns[0].is_empty() {
        return Err(file_err("no data rows".into()));
    }
    if w % opts.group_size != 0 {
        return Err(Error::config(
            "group_size",
            format!(
                "{w} columns do not split into groups of {}",
                opts.group_size
            ),
        ));
    }
    let names = names.unwrap_or_else(|| (1..=w).map(|c| format!("c{c}")).collect());
    let rows = columns[0].len();
    (0..w / opts.group_size)
        .map(|g| {
            let cols = &columns[g * opts.group_size..(g + 1) * opts.group_size];
            let mut values = Vec::with_capacity(rows * cols.len());
            for r in 0..rows {
                values.extend(cols.iter().map(|c| c[r]));
            }
            Ok(LabeledSeries {
                label: names[g * opts.group_size..(g + 1) * opts.group_size].join("+"),
                series: SeriesMatrix::new(values, rows, opts.group_size)?,
            })
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl std::str::FromStr for OutputFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(OutputFormat::Csv),
            "json" => Ok(OutputFormat::Json),
            other => Err(Error::config("format", format!("unknown format `{other}`"))),
        }
    }
}

#[derive(Debug, Clone)]
pub enum Results {
    Power(Vec<PowerEstimate>),
    Lags(Vec<LagHistogram>),
    Pairwise(PairwiseAnalysis),
    Test(TestResult),
    Series(TimeSeriesPair),
}

impl Results {
    fn kind(&self) -> &'static str {
        match self {
            Results::Power(_) => "power",
            Results::Lags(_) => "lags",
            Results::Pairwise(_) => "pairwise",
            Results::Test(_) => "test",
            Results::Series(_) => "series",
        }
    }
}

/// `v` rounded to 10 significant digits.
pub fn round_sig(v: f64) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{v:.9e}").parse().unwrap_or(v)
}

fn num(v: f64) -> String {
    format!("{}", round_sig(v))
}

fn round_json(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n
                .as_f64()
                .and_then(|f| serde_json::Number::from_f64(round_sig(f)))
            {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_json),
        Value::Object(map) => map.values_mut().for_each(round_json),
        _ => {}
    }
}

fn to_value<T: Serialize>(t: &T) -> Result<Value> {
    serde_json::to_value(t).map_err(|e| Error::InvalidInput(e.to_string()))
}

fn render_json(results: &Results) -> Result<String> {
    let body = match results {
        Results::Power(v) => json!({ "results": to_value(v)? }),
        Results::Lags(v) => json!({ "results": to_value(v)? }),
        Results::Pairwise(p) => to_value(p)?,
        Results::Test(t) => to_value(t)?,
        Results::Series(pair) => json!({
            "n": pair.len(),
            "x": pair.x.rows().map(<[f64]>::to_vec).collect::<Vec<_>>(),
            "y": pair.y.rows().map(<[f64]>::to_vec).collect::<Vec<_>>(),
        }),
    };
    let mut doc = match body {
        Value::Object(map) => map,
        _ => unreachable!("results serialize to objects"),
    };
    doc.insert("schema_version".into(), json!(SCHEMA_VERSION));
    doc.insert("kind".into(), json!(results.kind()));
    let mut doc = Value::Object(doc);
    round_json(&mut doc);
    let mut s =
        serde_json::to_string_pretty(&doc).map_err(|e| Error::InvalidInput(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn render_csv(results: &Results) -> String {
    let mut out = String::new();
    match results {
        Results::Power(rows) => {
            out.push_str("sweep_value,test,rejection_rate,stderr,trials\n");
            for r in rows {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    num(r.sweep_value),
                    r.test,
                    num(r.rejection_rate),
                    num(r.stderr),
                    r.trials
                );
            }
        }
        Results::Lags(hists) => {
            out.push_str("sweep_value,test,lag,count,frequency\n");
            for h in hists {
                for (lag, &count) in h.counts.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{},{},{lag},{count},{}",
                        num(h.sweep_value),
                        h.test,
                        num(h.frequency(lag))
                    );
                }
            }
        }
        Results::Pairwise(p) => {
            out.push_str("row,col,p_value,optimal_lag,row_scale,col_scale\n");
            for (u, row_label) in p.labels.iter().enumerate() {
                for (v, col_label) in p.labels.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "{row_label},{col_label},{},{},{},{}",
                        num(p.p_values[u][v]),
                        p.optimal_lags[u][v],
                        num(p.row_scales[u][v]),
                        num(p.col_scales[u][v])
                    );
                }
            }
        }
        Results::Test(t) => {
            out.push_str("test,statistic,p_value,optimal_lag,max_lag,block_size,replicates,seed\n");
            let c = &t.config;
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                c.kind,
                num(t.statistic),
                num(t.p_value),
                t.optimal_lag,
                c.max_lag,
                c.block_size,
                c.replicates,
                c.seed
            );
        }
        Results::Series(pair) => {
            let (dx, dy) = (pair.x.dim(), pair.y.dim());
            let mut header = vec!["t".to_string()];
            header.extend((1..=dx).map(|i| if dx == 1 { "x".into() } else { format!("x{i}") }));
            header.extend((1..=dy).map(|i| if dy == 1 { "y".into() } else { format!("y{i}") }));
            out.push_str(&header.join(","));
            out.push('\n');
            for (t, (xr, yr)) in pair.x.rows().zip(pair.y.rows()).enumerate() {
                let cells: Vec<String> = xr.iter().chain(yr).map(|&v| num(v)).collect();
                let _ = writeln!(out, "{t},{}", cells.join(","));
            }
        }
    }
    out
}

pub fn render(results: &Results, format: OutputFormat) -> Result<String> {
    match format {
        OutputFormat::Csv => Ok(render_csv(results)),
        OutputFormat::Json => render_json(results),
    }
}

pub fn emit_results(results: &Results, format: OutputFormat, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, render(results, format)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::permutation::StatisticKind;
    use std::io::Write;

    fn write_tmp(contents: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(contents.as_bytes()).unwrap();
        f
    }

    #[test]
    fn header_and_rows() {
        let f = write_tmp("a,b\n1,2\n3,4\n5,6\n");
        let s = ingest_csv(
            f.path(),
            CsvOptions {
                header: true,
                group_size: 1,
            },
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].label, "a");
        assert_eq!(s[1].series.values(), &[2.0, 4.0, 6.0]);
    }

    #[test]
    fn grouping_builds_multivariate_series() {
        let f = write_tmp("1,2,3,4\n5,6,7,8\n");
        let s = ingest_csv(
            f.path(),
            CsvOptions {
                header: false,
                group_size: 2,
            },
        )
        .unwrap();
        assert_eq!(s.len(), 2);
        assert_eq!(s[0].label, "c1+c2");
        assert_eq!(s[1].series.dim(), 2);
        assert_eq!(s[1].series.values(), &[3.0, 4.0, 7.0, 8.0]);
        let bad = ingest_csv(
            f.path(),
            CsvOptions {
                header: false,
                group_size: 3,
            },
        );
        assert!(matches!(bad, Err(Error::Config { .. })));
    }

    #[test]
    fn empty_file_is_an_error() {
        let f = write_tmp("");
        assert!(matches!(
            ingest_csv(f.path(), CsvOptions::default()),
            Err(Error::IngestFile { .. })
        ));
    }

    #[test]
    fn missing_file_is_an_error() {
        assert!(ingest_csv("/nonexistent/file.csv", CsvOptions::default()).is_err());
    }

    #[test]
    fn bad_cell_location() {
        let f = write_tmp("a,b\n1,2\n3,4\n5,x\n");
        match ingest_csv(
            f.path(),
            CsvOptions {
                header: true,
                group_size: 1,
            },
        ) {
            Err(Error::Ingest { row, col, .. }) => assert_eq!((row, col), (4, 2)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn ragged_row_location() {
        let f = write_tmp("1,2\n3\n");
        match ingest_csv(f.path(), CsvOptions::default()) {
            Err(Error::Ingest { row, .. }) => assert_eq!(row, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn power_csv_format() {
        let rows = vec![PowerEstimate {
            sweep_value: 100.0,
            test: StatisticKind::Mgcx,
            rejection_rate: 0.05,
            stderr: (0.05f64 * 0.95 / 300.0).sqrt(),
            trials: 300,
        }];
        let s = render(&Results::Power(rows), OutputFormat::Csv).unwrap();
        assert_eq!(
            s,
            "sweep_value,test,rejection_rate,stderr,trials\n100,mgcx,0.05,0.01258305739,300\n"
        );
    }

    #[test]
    fn pairwise_json_has_named_matrices() {
        let p = PairwiseAnalysis {
            labels: vec!["a".into(), "b".into()],
            p_values: vec![vec![0.0, 0.5], vec![0.25, 0.0]],
            optimal_lags: vec![vec![0, 3], vec![1, 0]],
            row_scales: vec![vec![1.0, 0.5], vec![1.0, 1.0]],
            col_scales: vec![vec![1.0, 0.25], vec![1.0, 1.0]],
        };
        let s = render(&Results::Pairwise(p.clone()), OutputFormat::Json).unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v["schema_version"], 1);
        assert_eq!(v["kind"], "pairwise");
        for key in ["p_values", "optimal_lags", "row_scales", "col_scales"] {
            assert!(v[key].is_array(), "{key}");
        }
        assert_eq!(
            s,
            render(&Results::Pairwise(p), OutputFormat::Json).unwrap()
        );
    }

    #[test]
    fn rounding_to_ten_digits() {
        assert_eq!(round_sig(0.123456789012345), 0.1234567890);
        assert_eq!(round_sig(-98765.4321987654), -98765.43220);
        assert_eq!(round_sig(0.0), 0.0);
        assert_eq!(num(1.0 / 3.0), "0.3333333333");
    }

    #[test]
    fn emit_writes_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.json");
        let r = Results::Lags(vec![LagHistogram {
            sweep_value: 60.0,
            test: StatisticKind::Dcorrx,
            counts: vec![1, 0, 3],
            trials: 4,
        }]);
        emit_results(&r, OutputFormat::Json, &path).unwrap();
        let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
        assert_eq!(v["results"][0]["counts"][2], 3);
        assert!(emit_results(&r, OutputFormat::Csv, dir.path().join("missing/dir/x.csv")).is_err());
    }
}
