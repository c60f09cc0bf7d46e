//! Rendering of results as JSON envelopes and CSV tables.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{Format, RunConfig};
use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// A command's result: a JSON summary, an optional table and optional extra files.
pub struct Report {
    pub summary: Value,
    pub table: Option<Vec<Value>>,
    /// `(file name, body)` pairs; bodies get a `#` header carrying the config.
    pub extra: Vec<(String, String)>,
}

impl Report {
    pub fn new<T: Serialize>(summary: &T) -> Result<Self, CliError> {
        Ok(Report { summary: to_value(summary)?, table: None, extra: Vec::new() })
    }

    pub fn with_table<T: Serialize>(mut self, rows: &[T]) -> Result<Self, CliError> {
        self.table = Some(rows.iter().map(to_value).collect::<Result<_, _>>()?);
        Ok(self)
    }

    pub fn with_file(mut self, name: &str, body: String) -> Self {
        self.extra.push((name.to_string(), body));
        self
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Result<Value, CliError> {
    serde_json::to_value(v).map_err(|e| CliError::Config(format!("serialisation failed: {e}")))
}

pub fn envelope(config: &RunConfig, result: &Value) -> Result<Value, CliError> {
    Ok(json!({ "version": VERSION, "config": to_value(config)?, "result": result }))
}

fn flatten_into(prefix: &str, v: &Value, out: &mut Vec<(String, String)>) {
    let key = |k: &str| if prefix.is_empty() { k.to_string() } else { format!("{prefix}.{k}") };
    match v {
        Value::Object(m) => m.iter().for_each(|(k, v)| flatten_into(&key(k), v, out)),
        Value::Array(a) => a.iter().enumerate().for_each(|(i, v)| flatten_into(&key(&i.to_string()), v, out)),
        Value::Null => out.push((prefix.to_string(), String::new())),
        Value::String(s) => out.push((prefix.to_string(), s.clone())),
        other => out.push((prefix.to_string(), other.to_string())),
    }
}

pub fn flatten(v: &Value) -> Vec<(String, String)> {
    let mut out = Vec::new();
    flatten_into("", v, &mut out);
    out
}

fn csv_error(e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("csv: {e}"))
}

/// CSV with a header row; tables use flattened column names, scalars become `key,value`.
pub fn to_csv(report: &Report) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    match &report.table {
        Some(rows) if !rows.is_empty() => {
            let header: Vec<String> = flatten(&rows[0]).into_iter().map(|(k, _)| k).collect();
            w.write_record(&header).map_err(csv_error)?;
            for r in rows {
                w.write_record(flatten(r).into_iter().map(|(_, v)| v)).map_err(csv_error)?;
            }
        }
        _ => {
            w.write_record(["key", "value"]).map_err(csv_error)?;
            for (k, v) in flatten(&report.summary) {
                w.write_record([k, v]).map_err(csv_error)?;
            }
        }
    }
    String::from_utf8(w.into_inner().map_err(csv_error)?).map_err(csv_error)
}

fn comment_header(config: &RunConfig) -> Result<String, CliError> {
    let cfg = serde_json::to_string(&to_value(config)?).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(format!("# version: {VERSION}\n# config: {cfg}\n"))
}

fn write(path: &Path, body: &str) -> Result<(), CliError> {
    fs::write(path, body).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Prints the report to stdout and, with `--out`, writes it to files.
pub fn emit(config: &RunConfig, report: &Report) -> Result<(), CliError> {
    let name = config.command.name();
    let mut result = report.summary.clone();
    if let (Some(rows), Value::Object(m)) = (&report.table, &mut result) {
        if !m.contains_key("rows") {
            m.insert("rows".into(), Value::Array(rows.clone()));
        }
    }
    let env = envelope(config, &result)?;
    let pretty = serde_json::to_string_pretty(&env).map_err(|e| CliError::Config(e.to_string()))?;
    if let Some(dir) = &config.settings.out {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
        write(&dir.join(format!("{name}.json")), &(pretty.clone() + "\n"))?;
        write(&dir.join(format!("{name}.csv")), &(comment_header(config)? + &to_csv(report)?))?;
        for (file, body) in &report.extra {
            write(&dir.join(file), &(comment_header(config)? + body))?;
        }
    }
    let body = match config.format() {
        Format::Json => pretty + "\n",
        Format::Csv => to_csv(report)?,
    };
    let mut out = std::io::stdout().lock();
    match out.write_all(body.as_bytes()).and_then(|_| out.flush()) {
        Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(CliError::Io(e.to_string())),
        _ => Ok(()),
    }
}

/// Object with the given key/value pairs, in order.
pub fn object(pairs: Vec<(&str, Value)>) -> Value {
    Value::Object(pairs.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}
