//! JSON config files with command-line overrides.
//!
//! A config file is a JSON object whose keys match the subcommand's schema.
//! Flags are written over the parsed object before it is deserialized, so a
//! flag always wins over the file.

use std::fs;
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use tsdep::{BlockSize, StatisticKind};

use crate::{CliError, ProcessArgs};

pub struct Overlay {
    map: Map<String, Value>,
}

impl Overlay {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Overlay { map: Map::new() });
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(Overlay { map }),
            Ok(_) => Err(CliError::Config(format!(
                "{}: top level must be an object",
                path.display()
            ))),
            Err(e) => Err(CliError::Config(format!("{}: {e}", path.display()))),
        }
    }

    pub fn set<T: Serialize>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.map.insert(
                key.to_owned(),
                serde_json::to_value(v).expect("flag values serialize"),
            );
        }
    }

    pub fn default<T: Serialize>(&mut self, key: &str, value: T) {
        if !self.map.contains_key(key) {
            self.set(key, Some(value));
        }
    }

    pub fn block_size(&mut self, flag: Option<&str>) -> Result<(), CliError> {
        let parsed = flag.map(str::parse::<BlockSize>).transpose()?;
        self.set("block_size", parsed);
        Ok(())
    }

    pub fn tests(&mut self, flags: &[String]) -> Result<(), CliError> {
        if flags.is_empty() {
            return Ok(());
        }
        let kinds = flags
            .iter()
            .map(|s| s.parse::<StatisticKind>())
            .collect::<Result<Vec<_>, _>>()?;
        self.set("tests", Some(kinds));
        Ok(())
    }

    /// Parses `variable=v1,v2,...`.
    pub fn sweep(&mut self, flag: Option<&str>) -> Result<(), CliError> {
        let Some(spec) = flag else { return Ok(()) };
        let bad = || {
            CliError::Config(format!(
                "sweep: expected `n|phi|delta=v1,v2,...`, got `{spec}`"
            ))
        };
        let (variable, values) = spec.split_once('=').ok_or_else(bad)?;
        let values = values
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| bad())?;
        self.map.insert(
            "sweep".into(),
            serde_json::json!({ "variable": variable.trim().to_ascii_lowercase(), "values": values }),
        );
        Ok(())
    }

    pub fn process(&mut self, args: &ProcessArgs) -> Result<(), CliError> {
        let mut process = match self.map.remove("process") {
            Some(Value::Object(m)) => m,
            None => Map::new(),
            Some(_) => return Err(CliError::Config("process: expected an object".into())),
        };
        if let Some(kind) = &args.process {
            if process.get("kind").and_then(Value::as_str) != Some(kind.as_str()) {
                process.clear();
                process.insert("kind".into(), Value::from(kind.as_str()));
            }
        }
        let Some(kind) = process
            .get("kind")
            .and_then(Value::as_str)
            .map(str::to_owned)
        else {
            if args.any_parameter() {
                return Err(CliError::Config(
                    "process: parameters given without `--process`".into(),
                ));
            }
            return Ok(());
        };
        let (allowed, defaults): (&[&str], &[(&str, Value)]) = match kind.as_str() {
            "indep_ar1" => (&["phi", "noise_scaling"], &[("phi", Value::from(0.5))]),
            "cross_ar1" => (&["phi"], &[("phi", Value::from(0.5))]),
            "extinct_ar1" => (
                &["phi", "delta", "radius"],
                &[("phi", Value::from(0.2)), ("delta", Value::from(0.5)), ("radius", Value::from(1.0))],
            ),
            "cross_ar13" => (&["phi1", "phi3"], &[("phi1", Value::from(0.1)), ("phi3", Value::from(0.8))]),
            "nonlin_lag1" | "nonlin_lag3" => (&[], &[]),
            other => {
                return Err(CliError::Config(format!(
                    "process.kind: unknown process `{other}` (expected indep_ar1, cross_ar1, nonlin_lag1, \
                     extinct_ar1, cross_ar13 or nonlin_lag3)"
                )))
            }
        };
        let flags = [
            ("phi", args.phi.map(Value::from)),
            ("phi1", args.phi1.map(Value::from)),
            ("phi3", args.phi3.map(Value::from)),
            ("delta", args.delta.map(Value::from)),
            ("radius", args.radius.map(Value::from)),
            (
                "noise_scaling",
                args.noise_scaling.then_some(Value::Bool(true)),
            ),
        ];
        for (name, value) in flags {
            if let Some(v) = value {
                if !allowed.contains(&name) {
                    return Err(CliError::Config(format!(
                        "process.{name}: not a parameter of `{kind}`"
                    )));
                }
                process.insert(name.into(), v);
            }
        }
        for key in process.keys() {
            if key != "kind" && !allowed.contains(&key.as_str()) {
                return Err(CliError::Config(format!(
                    "process.{key}: not a parameter of `{kind}`"
                )));
            }
        }
        for (name, v) in defaults {
            process.entry(name.to_string()).or_insert_with(|| v.clone());
        }
        self.map.insert("process".into(), Value::Object(process));
        Ok(())
    }

    pub fn finish<T: DeserializeOwned>(self) -> Result<T, CliError> {
        serde_json::from_value(Value::Object(self.map)).map_err(|e| CliError::Config(e.to_string()))
    }
}
