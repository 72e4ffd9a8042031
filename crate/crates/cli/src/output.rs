//! CSV and JSON emitters. CSV files start with `#` metadata lines holding
//! the program version, a timestamp, the scenario and the fully resolved
//! configuration; everything after the timestamp line is deterministic.

use std::io::Write;

use serde_json::{json, Value};

use crate::error::CliError;

pub const UNSTABLE: &str = "unstable";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    /// Quantity undefined because the steady state does not exist.
    Unstable,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            // `{:e}` is the shortest round-trip form
            Cell::Num(x) => format!("{x:e}"),
            Cell::Int(k) => k.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Unstable => UNSTABLE.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) if x.is_finite() => json!(x),
            Cell::Num(x) => json!(x.to_string()),
            Cell::Int(k) => json!(k),
            Cell::Bool(b) => json!(b),
            Cell::Text(s) => json!(s),
            Cell::Unstable => json!(UNSTABLE),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }
}

#[derive(Clone, Debug)]
pub struct Metadata {
    pub version: String,
    pub timestamp: String,
    pub scenario: String,
    pub config_toml: String,
}

impl Metadata {
    pub fn now(scenario: &str, config_toml: String) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            timestamp: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            scenario: scenario.to_string(),
            config_toml,
        }
    }
}

pub fn write_csv<W: Write>(mut out: W, meta: &Metadata, table: &Table) -> Result<(), CliError> {
    writeln!(out, "# tlsbath {}", meta.version)?;
    writeln!(out, "# generated {}", meta.timestamp)?;
    writeln!(out, "# scenario {}", meta.scenario)?;
    for line in meta.config_toml.lines() {
        if line.is_empty() {
            writeln!(out, "#")?;
        } else {
            writeln!(out, "# {line}")?;
        }
    }
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_json<W: Write>(mut out: W, meta: &Metadata, table: &Table) -> Result<(), CliError> {
    let doc = json!({
        "version": meta.version,
        "generated": meta.timestamp,
        "scenario": meta.scenario,
        "config": meta.config_toml,
        "columns": table.columns,
        "rows": table.rows.iter().map(|r| r.iter().map(Cell::json).collect::<Vec<_>>()).collect::<Vec<_>>(),
    });
    serde_json::to_writer_pretty(&mut out, &doc).map_err(|e| CliError::Io(e.into()))?;
    writeln!(out)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> (Metadata, Table) {
        let mut t = Table::new(["x", "y_re", "ok"]);
        t.push(vec![Cell::Num(1e-7), Cell::Unstable, Cell::Bool(true)]);
        t.push(vec![Cell::Num(0.25), Cell::Num(-3.0), Cell::Bool(false)]);
        let meta = Metadata {
            version: "0.0.0".into(),
            timestamp: "t".into(),
            scenario: "demo".into(),
            config_toml: "[a]\nb = 1\n".into(),
        };
        (meta, t)
    }

    #[test]
    fn csv_layout() {
        let (meta, t) = sample();
        let mut buf = Vec::new();
        write_csv(&mut buf, &meta, &t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(
            text,
            "# tlsbath 0.0.0\n# generated t\n# scenario demo\n# [a]\n# b = 1\nx,y_re,ok\n1e-7,unstable,true\n2.5e-1,-3e0,false\n"
        );
        assert_eq!("2.5e-1".parse::<f64>().unwrap(), 0.25);
    }

    #[test]
    fn json_layout() {
        let (meta, t) = sample();
        let mut buf = Vec::new();
        write_json(&mut buf, &meta, &t).unwrap();
        let v: Value = serde_json::from_slice(&buf).unwrap();
        assert_eq!(v["rows"][0][1], json!("unstable"));
        assert_eq!(v["rows"][1][0], json!(0.25));
        assert_eq!(v["columns"][2], json!("ok"));
    }
}
