//! Reports: CSV rows with a header, a JSON meta file echoing the command,
//! its parameters and a summary block, and optional extra files.

use std::path::{Path, PathBuf};

use proxlab_core::numfmt;
use serde_json::{json, Map, Value};

use crate::CliError;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, Default)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
    /// Ordered summary entries.
    pub summary: Vec<(String, Value)>,
    /// Refuted certificates that the command asserts.
    pub refuted: usize,
    /// Failed searches or violated checks.
    pub failures: usize,
    /// `(file suffix, contents)` written next to the CSV.
    pub extra: Vec<(String, String)>,
}

/// 17 significant digits, or `inf`/`nan`.
pub fn real(x: f64) -> String {
    numfmt::real(x)
}

/// A real for JSON output, as a string in the CSV format.
pub fn jreal(x: f64) -> Value {
    Value::String(real(x))
}

impl Report {
    pub fn new(command: &str, params: Value, seed: u64, header: &[&str]) -> Self {
        Self {
            command: command.into(),
            params,
            seed,
            header: header.iter().map(|s| s.to_string()).collect(),
            ..Default::default()
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len(), "row width");
        self.rows.push(row);
    }

    pub fn stat(&mut self, key: &str, value: Value) {
        self.summary.push((key.into(), value));
    }

    pub fn passed(&self) -> bool {
        self.refuted == 0 && self.failures == 0
    }

    pub fn csv(&self) -> Result<String, CliError> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(&self.header)
            .map_err(|e| CliError::Io(e.to_string()))?;
        for r in &self.rows {
            w.write_record(r).map_err(|e| CliError::Io(e.to_string()))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Io(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("CSV of UTF-8 fields"))
    }

    pub fn summary_value(&self) -> Value {
        let mut m = Map::new();
        for (k, v) in &self.summary {
            m.insert(k.clone(), v.clone());
        }
        m.insert("refuted".into(), json!(self.refuted));
        m.insert("failures".into(), json!(self.failures));
        m.insert("passed".into(), json!(self.passed()));
        Value::Object(m)
    }

    pub fn meta(&self) -> Value {
        json!({
            "command": self.command,
            "parameters": self.params,
            "seed": self.seed,
            "rows": self.rows.len(),
            "summary": self.summary_value(),
            "version": VERSION,
        })
    }

    /// Writes `<stem>.csv`, `<stem>.meta.json` and the extra files; returns
    /// the CSV path.
    pub fn write(&self, dir: &Path, stem: &str) -> Result<PathBuf, CliError> {
        std::fs::create_dir_all(dir)
            .map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let csv_path = dir.join(format!("{stem}.csv"));
        write_file(&csv_path, &self.csv()?)?;
        write_file(
            &dir.join(format!("{stem}.meta.json")),
            &pretty(&self.meta()),
        )?;
        for (suffix, text) in &self.extra {
            write_file(&dir.join(format!("{stem}.{suffix}")), text)?;
        }
        Ok(csv_path)
    }
}

pub fn pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

pub fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}
