//! Tabular output with a `#`-prefixed run manifest.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Value};

/// Bumped whenever a column is renamed, reordered or removed.
pub const SCHEMA_VERSION: u32 = 1;
pub const TOOL: &str = "lric";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Everything needed to reproduce a run.
#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub schema: u32,
    pub command: String,
    pub argv: Vec<String>,
    pub params: Value,
    pub timestamp: String,
    pub seed: Option<u64>,
}

impl RunManifest {
    pub fn new(command: &str, argv: &[String], params: Value, seed: Option<u64>) -> Self {
        Self {
            tool: TOOL.into(),
            version: env!("CARGO_PKG_VERSION").into(),
            schema: SCHEMA_VERSION,
            command: command.into(),
            argv: argv.to_vec(),
            params,
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            seed,
        }
    }

    fn header_lines(&self) -> Vec<String> {
        vec![
            format!("# tool: {} {}", self.tool, self.version),
            format!("# schema: {}", self.schema),
            format!("# command: {}", self.command),
            format!("# argv: {}", self.argv.join(" ")),
            format!("# params: {}", self.params),
            format!("# timestamp: {}", self.timestamp),
            format!(
                "# seed: {}",
                self.seed.map_or_else(|| "none".to_string(), |s| s.to_string())
            ),
        ]
    }

    pub fn write_header<W: Write + ?Sized>(&self, out: &mut W) -> io::Result<()> {
        for line in self.header_lines() {
            writeln!(out, "{line}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Empty, Cell::Float)
    }
}

impl Cell {
    /// 17 significant digits, enough to round-trip an `f64`.
    fn to_csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format!("{v:.16e}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self { columns: columns.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn write<W: Write>(&self, manifest: &RunManifest, format: Format, out: W) -> Result<()> {
        match format {
            Format::Csv => self.write_csv(manifest, out),
            Format::Json => self.write_json(manifest, out),
        }
    }

    fn write_csv<W: Write>(&self, manifest: &RunManifest, mut out: W) -> Result<()> {
        manifest.write_header(&mut out)?;
        let mut writer = csv::Writer::from_writer(out);
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(Cell::to_csv))?;
        }
        writer.flush()?;
        Ok(())
    }

    fn write_json<W: Write>(&self, manifest: &RunManifest, mut out: W) -> Result<()> {
        let rows: Vec<Vec<Value>> = self.rows.iter().map(|r| r.iter().map(Cell::to_json).collect()).collect();
        let doc = json!({ "manifest": manifest, "columns": self.columns, "rows": rows });
        serde_json::to_writer_pretty(&mut out, &doc)?;
        writeln!(out)?;
        Ok(())
    }
}

/// Where results go: stdout, or named files in a directory.
#[derive(Debug, Clone)]
pub struct Sink {
    dir: Option<PathBuf>,
    format: Format,
}

impl Sink {
    pub fn new(dir: Option<PathBuf>, format: Format) -> Self {
        Self { dir, format }
    }

    pub fn format(&self) -> Format {
        self.format
    }

    pub fn dir(&self) -> Option<&Path> {
        self.dir.as_deref()
    }

    /// Writes `table` as `<stem>.<ext>` in the output directory, or to stdout.
    pub fn emit(&self, stem: &str, table: &Table, manifest: &RunManifest) -> Result<Option<PathBuf>> {
        match &self.dir {
            Some(dir) => {
                let path = dir.join(format!("{stem}.{}", self.format.extension()));
                write_table_file(&path, table, manifest, self.format)?;
                Ok(Some(path))
            }
            None => {
                let stdout = io::stdout();
                table.write(manifest, self.format, stdout.lock())?;
                Ok(None)
            }
        }
    }
}

pub fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).with_context(|| format!("cannot create output directory {}", dir.display()))
}

pub fn write_table_file(path: &Path, table: &Table, manifest: &RunManifest, format: Format) -> Result<()> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    let file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    table.write(manifest, format, io::BufWriter::new(file))
}

pub fn write_json_file(path: &Path, value: &Value) -> Result<()> {
    if let Some(parent) = path.parent() {
        ensure_dir(parent)?;
    }
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").with_context(|| format!("cannot write {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn manifest() -> RunManifest {
        RunManifest::new("demo", &["lric".into(), "demo".into()], json!({"n": 3}), Some(5))
    }

    #[test]
    fn csv_has_header_then_columns() {
        let mut t = Table::new(&["k", "value", "label"]);
        t.push(vec![1usize.into(), 0.1.into(), "min".into()]);
        t.push(vec![2usize.into(), Cell::Empty, "max".into()]);
        let mut buf = Vec::new();
        t.write(&manifest(), Format::Csv, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], format!("# tool: lric {}", env!("CARGO_PKG_VERSION")));
        assert_eq!(lines[6], "# seed: 5");
        assert_eq!(lines[7], "k,value,label");
        assert_eq!(lines[8], "1,1.0000000000000001e-1,min");
        assert_eq!(lines[9], "2,,max");
    }

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1.0 / 3.0, 6.02214076e23, -2.5e-300] {
            let s = Cell::Float(v).to_csv();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_layout() {
        let mut t = Table::new(&["t", "p"]);
        t.push(vec![1.0.into(), 0.5.into()]);
        let mut buf = Vec::new();
        t.write(&manifest(), Format::Json, &mut buf).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["columns"], json!(["t", "p"]));
        assert_eq!(v["rows"][0][1], json!(0.5));
        assert_eq!(v["manifest"]["command"], json!("demo"));
    }
}
