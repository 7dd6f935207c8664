//! Result rendering: JSON (default), CSV for tabular outputs, or text.

use std::fs;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::resolve::CliError;

#[derive(Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl Format {
    pub fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            "text" => Ok(Format::Text),
            other => Err(CliError::validation(
                "bad_format",
                format!("unknown format {other:?} (expected json, csv or text)"),
            )),
        }
    }
}

pub struct OutputOpts {
    pub format: Format,
    pub out: Option<String>,
    pub no_meta: bool,
}

/// Renders and writes one command result. `csv` is None for commands with
/// no tabular shape; asking for CSV there is a validation error.
pub fn emit(
    opts: &OutputOpts,
    command: &str,
    result: serde_json::Value,
    csv: Option<String>,
    text: String,
) -> Result<(), CliError> {
    let rendered = match opts.format {
        Format::Json => {
            let mut doc = serde_json::json!({
                "command": command,
                "result": result,
            });
            if !opts.no_meta {
                let timestamp = SystemTime::now()
                    .duration_since(UNIX_EPOCH)
                    .map(|d| d.as_secs())
                    .unwrap_or(0);
                doc["meta"] = serde_json::json!({
                    "tool": env!("CARGO_PKG_NAME"),
                    "version": env!("CARGO_PKG_VERSION"),
                    "unix_time": timestamp,
                });
            }
            let mut s = serde_json::to_string_pretty(&doc).expect("serializable document");
            s.push('\n');
            s
        }
        Format::Csv => csv.ok_or_else(|| {
            CliError::validation(
                "csv_unsupported",
                format!("the {command} command has no CSV shape"),
            )
        })?,
        Format::Text => text,
    };
    match &opts.out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| CliError::runtime("write_failed", format!("{path}: {e}"))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}
