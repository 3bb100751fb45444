//! Curve files. CSV numbers carry 17 significant digits; JSON numbers use
//! the shortest form that reads back to the same `f64`.

use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::error::CliError;

/// Named columns of equal length plus metadata for the JSON form.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<f64>>,
    pub meta: Map<String, Value>,
    /// Written as a `#` line above the CSV header.
    pub warning: Option<String>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: &str, value: impl Into<Value>) {
        self.meta.insert(key.to_string(), value.into());
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let mut obj = self.meta.clone();
                if let Some(w) = &self.warning {
                    obj.insert("warning".into(), json!(w));
                }
                let mut cols = Map::new();
                for (k, name) in self.columns.iter().enumerate() {
                    let col: Vec<Value> = self.rows.iter().map(|r| number(r[k])).collect();
                    cols.insert(name.to_string(), Value::Array(col));
                }
                obj.insert("columns".into(), Value::Object(cols));
                json_bytes(&Value::Object(obj))
            }
        }
    }

    fn csv(&self) -> Result<Vec<u8>, CliError> {
        let mut buf = Vec::new();
        if let Some(w) = &self.warning {
            buf.extend_from_slice(format!("# {w}\n").as_bytes());
        }
        let mut wtr = csv::Writer::from_writer(buf);
        wtr.write_record(&self.columns).map_err(csv_err)?;
        for row in &self.rows {
            wtr.write_record(row.iter().map(|x| format!("{x:.16e}")))
                .map_err(csv_err)?;
        }
        wtr.into_inner().map_err(|e| CliError::Config(e.to_string()))
    }
}

/// Rows of text, for reports.
pub fn text_csv(header: &[&str], rows: &[Vec<String>]) -> Result<Vec<u8>, CliError> {
    let mut wtr = csv::Writer::from_writer(Vec::new());
    wtr.write_record(header).map_err(csv_err)?;
    for r in rows {
        wtr.write_record(r).map_err(csv_err)?;
    }
    wtr.into_inner().map_err(|e| CliError::Config(e.to_string()))
}

pub fn json_bytes(v: &Value) -> Result<Vec<u8>, CliError> {
    let mut out = serde_json::to_vec_pretty(v).map_err(|e| CliError::Config(e.to_string()))?;
    out.push(b'\n');
    Ok(out)
}

/// Non-finite values become `null`.
pub fn number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::Config(format!("csv: {e}"))
}
