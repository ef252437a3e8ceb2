//! Tabular output shared by every command: CSV with a header row, or JSON
//! arrays of records with the same keys and values.

use std::fs;
use std::io::Write;
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Number, Value};

use crate::CliError;

/// Significant digits of every emitted number.
pub const SIG_DIGITS: usize = 12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
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

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    /// Value undefined at this point (see the row's `status`).
    Empty,
}

impl Cell {
    pub fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => format_sig(*x)
                .parse::<f64>()
                .ok()
                .and_then(Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Empty => Value::Null,
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

/// `x` with [`SIG_DIGITS`] significant digits, positional for moderate
/// magnitudes and scientific otherwise, trailing zeros removed.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{:.*e}", SIG_DIGITS - 1, x);
    let (mantissa, exp) = sci
        .split_once('e')
        .expect("scientific format has an exponent");
    let exp: i32 = exp.parse().expect("exponent is an integer");
    if (-5..SIG_DIGITS as i32).contains(&exp) {
        let decimals = (SIG_DIGITS as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{:.*}", decimals, x))
    } else {
        format!("{}e{}", trim_zeros(mantissa.to_string()), exp)
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    let t = s.trim_end_matches('0').trim_end_matches('.');
    if t == "-0" {
        "0".to_string()
    } else {
        t.to_string()
    }
}

/// Rounds to the emitted precision, so values used in a computation are the
/// values written out.
pub fn round_sig(x: f64) -> f64 {
    format_sig(x).parse().unwrap_or(x)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| *c == name)
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        w.into_inner()
            .map_err(|e| CliError::Output(e.error().to_string()))
    }

    pub fn to_json(&self) -> String {
        let records: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let map: Map<String, Value> = self
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), v.to_json()))
                    .collect();
                Value::Object(map)
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&Value::Array(records))
            .expect("JSON values always serialize");
        text.push('\n');
        text
    }

    pub fn render(&self, format: Format) -> Result<Vec<u8>, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json().into_bytes()),
        }
    }
}

/// A table together with the file stem it is written under.
#[derive(Debug, Clone, PartialEq)]
pub struct Output {
    pub name: String,
    pub table: Table,
}

impl Output {
    pub fn new(name: impl Into<String>, table: Table) -> Self {
        Self {
            name: name.into(),
            table,
        }
    }
}

/// Writes one output to `out` (stdout when absent) or several outputs into
/// the directory `out` as `<name>.<ext>`.
pub fn emit(outputs: &[Output], out: Option<&Path>, format: Format) -> Result<(), CliError> {
    match (outputs, out) {
        ([single], None) => {
            let bytes = single.table.render(format)?;
            std::io::stdout()
                .write_all(&bytes)
                .map_err(|e| CliError::Output(format!("stdout: {e}")))
        }
        ([single], Some(path)) if !path.is_dir() => write_file(path, &single.table.render(format)?),
        (_, None) => Err(CliError::Config(
            "this command writes several files; pass --out DIR".to_string(),
        )),
        (many, Some(dir)) => {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Output(format!("{}: {e}", dir.display())))?;
            for o in many {
                let path = dir.join(format!("{}.{}", o.name, format.extension()));
                write_file(&path, &o.table.render(format)?)?;
            }
            Ok(())
        }
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::Output(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(0.25), "0.25");
        assert_eq!(format_sig(12.0), "12");
        assert_eq!(format_sig(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig(2.0 / 3.0 * 1e-7), "6.66666666667e-8");
        assert_eq!(format_sig(-123456.7890123456), "-123456.789012");
        assert_eq!(format_sig(1e15), "1e15");
        assert_eq!(format_sig(0.1 + 0.2), "0.3");
        assert_eq!(format_sig(-1e-20), "-1e-20");
    }

    #[test]
    fn json_mirrors_csv_values() {
        let mut t = Table::new(vec!["x", "status", "y"]);
        t.push(vec![Cell::Num(1.0 / 3.0), "ok".into(), Cell::Empty]);
        let csv = String::from_utf8(t.to_csv().unwrap()).unwrap();
        assert_eq!(csv, "x,status,y\n0.333333333333,ok,\n");
        let json: Value = serde_json::from_str(&t.to_json()).unwrap();
        assert_eq!(json[0]["x"].as_f64().unwrap(), 0.333333333333);
        assert!(json[0]["y"].is_null());
        let keys: Vec<&String> = json[0].as_object().unwrap().keys().collect();
        assert_eq!(keys, ["x", "status", "y"]);
    }
}
