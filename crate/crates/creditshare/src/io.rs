//! Parameter files, effort paths and CSV tables.

use std::fs;
use std::path::Path;

use creditshare_core::contracts::SharingContract;
use creditshare_core::dynamics::EffortPath;
use creditshare_core::hetero::HeteroParams;
use creditshare_core::GameParams;
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

/// Reads a JSON file, applying `key=value` overrides before deserializing.
/// Unknown keys are rejected by the target types.
fn read_json<T: DeserializeOwned>(path: &Path, overrides: &[String]) -> CliResult<T> {
    let text = read(path)?;
    let mut value: Value = serde_json::from_str(&text).map_err(|e| CliError::Params(format!("{}: {e}", path.display())))?;
    for item in overrides {
        let (key, raw) = item
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("override `{item}` is not KEY=VALUE")))?;
        let parsed: Value =
            serde_json::from_str(raw).map_err(|_| CliError::usage(format!("override `{item}` has a non-JSON value")))?;
        let obj = value
            .as_object_mut()
            .ok_or_else(|| CliError::Params(format!("{}: expected a JSON object", path.display())))?;
        if !obj.contains_key(key) {
            return Err(CliError::Params(format!("unknown parameter `{key}`")));
        }
        obj.insert(key.to_string(), parsed);
    }
    serde_json::from_value(value).map_err(|e| CliError::Params(format!("{}: {e}", path.display())))
}

pub fn read_params(path: &Path, overrides: &[String]) -> CliResult<GameParams> {
    read_json(path, overrides)
}

pub fn read_hetero(path: &Path, overrides: &[String]) -> CliResult<HeteroParams> {
    read_json(path, overrides)
}

pub fn read_contract(path: &Path) -> CliResult<SharingContract> {
    read_json(path, &[])
}

fn format_error(path: &Path, message: impl ToString) -> CliError {
    CliError::Format { path: path.display().to_string(), message: message.to_string() }
}

/// Effort path CSV with header `t_start,k_1,...,k_N`.
pub fn read_effort_path(path: &Path, n_agents: usize) -> CliResult<EffortPath> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format_error(path, e))?;
    let headers = reader.headers().map_err(|e| format_error(path, e))?.clone();
    if headers.len() != n_agents + 1 || &headers[0] != "t_start" {
        return Err(format_error(path, format!("expected columns t_start,k_1..k_{n_agents}")));
    }
    let mut pieces = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format_error(path, e))?;
        let nums = record
            .iter()
            .map(|x| x.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| format_error(path, e))?;
        pieces.push((nums[0], nums[1..].to_vec()));
    }
    Ok(EffortPath::new(n_agents, pieces)?)
}

/// Single-column table of per-agent efforts on a belief grid: header `p,k`.
pub fn read_effort_table(path: &Path) -> CliResult<Vec<f64>> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| format_error(path, e))?;
    let mut out = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| format_error(path, e))?;
        let k = record.get(1).ok_or_else(|| format_error(path, "expected columns p,k"))?;
        out.push(k.trim().parse::<f64>().map_err(|e| format_error(path, e))?);
    }
    Ok(out)
}

/// A CSV table kept in memory until it is written out.
pub struct Table {
    header: Vec<String>,
    rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Table { header: header.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(|x| x.to_string())).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv is utf-8")
    }
}

pub fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|source| CliError::Io { path: path.display().to_string(), source })
}

pub fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string(value).expect("output types serialize");
    s.push('\n');
    s
}
