//! Report emission and logging.
//!
//! A report has three parts: `meta` (tool name, version, wall-clock
//! timestamp — the only section allowed to vary between identically
//! configured runs), `config` (the fully resolved configuration), and
//! `result`. JSON prints the whole envelope; CSV prints the table with
//! the config echoed in `#` comment lines and carries no timestamp at
//! all. Floating-point values use the shortest round-trip decimal form
//! in both formats.

use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::sync::atomic::{AtomicU8, Ordering};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::CliError;

#[derive(ValueEnum, Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub(crate) enum OutputFormat {
    Csv,
    Json,
}

// ---------------------------------------------------------------------
// logging

/// 0 = error, 1 = warn, 2 = info, 3 = debug.
static LOG_LEVEL: AtomicU8 = AtomicU8::new(1);

pub(crate) fn init_logger(level: &str) -> Result<(), CliError> {
    let v = match level {
        "error" => 0,
        "warn" => 1,
        "info" => 2,
        "debug" => 3,
        other => {
            return Err(CliError::Config(format!(
                "unknown log level '{other}'; use error, warn, info, or debug"
            )))
        }
    };
    LOG_LEVEL.store(v, Ordering::Relaxed);
    Ok(())
}

fn enabled(level: u8) -> bool {
    level <= LOG_LEVEL.load(Ordering::Relaxed)
}

pub(crate) fn info(msg: impl AsRef<str>) {
    if enabled(2) {
        eprintln!("fraczero: {}", msg.as_ref());
    }
}

pub(crate) fn debug(msg: impl AsRef<str>) {
    if enabled(3) {
        eprintln!("fraczero: {}", msg.as_ref());
    }
}

// ---------------------------------------------------------------------
// reports

/// A finished command result ready for emission.
pub(crate) struct Report {
    pub command: &'static str,
    /// Fully resolved configuration (embedded for provenance).
    pub config: Value,
    pub result: Value,
    /// Tabular form, for commands that support CSV.
    pub table: Option<Table>,
}

pub(crate) struct Table {
    /// Extra `#` comment lines placed after the config echo.
    pub comments: Vec<String>,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

/// Shortest round-trip decimal form of a float.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v}")
}

fn unix_time_ms() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_millis() as u64)
        .unwrap_or(0)
}

impl Report {
    fn to_json(&self) -> String {
        let envelope = json!({
            "meta": {
                "tool": "fraczero",
                "version": env!("CARGO_PKG_VERSION"),
                "command": self.command,
                "unix_time_ms": unix_time_ms(),
            },
            "config": self.config,
            "result": self.result,
        });
        let mut s = serde_json::to_string_pretty(&envelope).expect("report serialization");
        s.push('\n');
        s
    }

    fn to_csv(&self) -> Result<String, CliError> {
        let table = self.table.as_ref().ok_or_else(|| {
            CliError::Config(format!(
                "the {} report is JSON-only; drop --format csv",
                self.command
            ))
        })?;
        let mut s = String::new();
        s.push_str(&format!("# fraczero {} report\n", self.command));
        let config_line = serde_json::to_string(&self.config).expect("config serialization");
        s.push_str(&format!("# config: {config_line}\n"));
        for line in &table.comments {
            s.push_str(&format!("# {line}\n"));
        }
        s.push_str(&table.header.join(","));
        s.push('\n');
        for row in &table.rows {
            s.push_str(
                &row.iter()
                    .map(|f| csv_field(f))
                    .collect::<Vec<_>>()
                    .join(","),
            );
            s.push('\n');
        }
        Ok(s)
    }

    /// Renders the report in `format` and writes it to `out` (or stdout).
    pub fn emit(&self, format: OutputFormat, out: Option<&Path>) -> Result<(), CliError> {
        let text = match format {
            OutputFormat::Json => self.to_json(),
            OutputFormat::Csv => self.to_csv()?,
        };
        match out {
            Some(path) => {
                fs::write(path, text.as_bytes()).map_err(|e| {
                    CliError::Config(format!("cannot write {}: {e}", path.display()))
                })?;
                info(format!("wrote {}", path.display()));
            }
            None => {
                io::stdout().write_all(text.as_bytes())?;
            }
        }
        Ok(())
    }
}

/// Quotes a CSV field only when it needs it.
fn csv_field(field: &str) -> String {
    if field.contains([',', '"', '\n']) {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_owned()
    }
}
