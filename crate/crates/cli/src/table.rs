//! Rectangular result tables with CSV and JSON-lines emission.

use std::fmt;
use std::io::{BufRead, Write};
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("row has {got} cells, table has {want} columns")]
    Ragged { got: usize, want: usize },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
    #[error("line {0}: {1}")]
    Parse(usize, String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

impl FromStr for Format {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "csv" => Ok(Format::Csv),
            "jsonl" | "json-lines" => Ok(Format::JsonLines),
            _ => Err(format!("unknown format `{s}` (csv|jsonl)")),
        }
    }
}

/// Rounds to 9 significant digits.
pub fn quantize(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.8e}").parse().unwrap()
    } else {
        x
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
}

impl Cell {
    pub fn num(x: f64) -> Cell {
        Cell::Num(quantize(x))
    }

    pub fn text(s: impl Into<String>) -> Cell {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(n) => Some(*n as f64),
            Cell::Text(_) => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            Cell::Text(s) => Some(s),
            _ => None,
        }
    }

    fn parse(s: &str) -> Cell {
        if let Ok(n) = s.parse::<u64>() {
            Cell::Int(n)
        } else if let Ok(x) = s.parse::<f64>() {
            Cell::Num(x)
        } else {
            Cell::Text(s.to_string())
        }
    }

    fn json(&self) -> String {
        match self {
            Cell::Num(x) if x.is_finite() => format!("{x:e}"),
            Cell::Num(_) => "null".into(),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => serde_json::to_string(s).unwrap(),
        }
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // `{:e}` keeps numbers distinguishable from integer cells on re-parse
            Cell::Num(x) if x.is_finite() => write!(f, "{x:e}"),
            Cell::Num(x) => write!(f, "{x}"),
            Cell::Int(n) => write!(f, "{n}"),
            Cell::Text(s) => f.write_str(s),
        }
    }
}

impl PartialEq for Cell {
    fn eq(&self, other: &Cell) -> bool {
        match (self, other) {
            (Cell::Num(a), Cell::Num(b)) => a.total_cmp(b).is_eq() || (a.is_nan() && b.is_nan()),
            (Cell::Int(a), Cell::Int(b)) => a == b,
            (Cell::Text(a), Cell::Text(b)) => a == b,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct OutputTable {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl OutputTable {
    pub fn new(columns: &[&str]) -> Self {
        OutputTable { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<(), TableError> {
        if row.len() != self.columns.len() {
            return Err(TableError::Ragged { got: row.len(), want: self.columns.len() });
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Values of a column, `None` for cells that are not numbers.
    pub fn numbers(&self, name: &str) -> Vec<Option<f64>> {
        let k = self.column(name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows.iter().map(|r| r[k].as_f64()).collect()
    }

    pub fn write<W: Write>(&self, out: W, format: Format) -> Result<(), TableError> {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(out);
                w.write_record(&self.columns)?;
                for row in &self.rows {
                    w.write_record(row.iter().map(|c| c.to_string()))?;
                }
                w.flush()?;
            }
            Format::JsonLines => {
                let mut out = out;
                for row in &self.rows {
                    let fields: Vec<String> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| format!("{}:{}", serde_json::to_string(c).unwrap(), v.json()))
                        .collect();
                    writeln!(out, "{{{}}}", fields.join(","))?;
                }
            }
        }
        Ok(())
    }

    pub fn to_bytes(&self, format: Format) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write(&mut buf, format).expect("writing to memory");
        buf
    }

    pub fn read<R: BufRead>(input: R, format: Format) -> Result<OutputTable, TableError> {
        match format {
            Format::Csv => {
                let mut r = csv::Reader::from_reader(input);
                let columns = r.headers()?.iter().map(String::from).collect();
                let mut table = OutputTable { columns, rows: Vec::new() };
                for rec in r.records() {
                    table.push(rec?.iter().map(Cell::parse).collect())?;
                }
                Ok(table)
            }
            Format::JsonLines => {
                let mut table = OutputTable::default();
                for (i, line) in input.lines().enumerate() {
                    let line = line?;
                    if line.trim().is_empty() {
                        continue;
                    }
                    let obj: serde_json::Map<String, serde_json::Value> = serde_json::from_str(&line)?;
                    if i == 0 {
                        table.columns = obj.keys().cloned().collect();
                    } else if !obj.keys().eq(table.columns.iter()) {
                        return Err(TableError::Parse(i + 1, "columns differ from the first line".into()));
                    }
                    let row = obj
                        .values()
                        .map(|v| match v {
                            serde_json::Value::Null => Ok(Cell::Num(f64::NAN)),
                            serde_json::Value::String(s) => Ok(Cell::Text(s.clone())),
                            serde_json::Value::Number(n) => Ok(match n.as_u64() {
                                Some(u) => Cell::Int(u),
                                None => Cell::Num(n.as_f64().unwrap()),
                            }),
                            other => Err(TableError::Parse(i + 1, format!("unexpected value {other}"))),
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    table.push(row)?;
                }
                Ok(table)
            }
        }
    }
}
