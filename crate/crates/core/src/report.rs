//! Deterministic CSV emission: `.` decimal separator, 17 significant digits.

use std::fmt::Write;

/// Formats with 17 significant digits in scientific notation. `-0.0` prints
/// as `0`, so equal values always produce equal bytes.
pub fn fmt_f64(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    format!("{x:.16e}")
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

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Text(v.to_string())
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

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl std::fmt::Display for Cell {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => f.write_str(&fmt_f64(*v)),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

/// A CSV table with optional leading `# key=value` metadata lines.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CsvTable {
    pub metadata: Vec<(String, String)>,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl CsvTable {
    pub fn new<S: Into<String>>(header: impl IntoIterator<Item = S>) -> Self {
        Self {
            metadata: Vec::new(),
            header: header.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl ToString) -> &mut Self {
        self.metadata.push((key.into(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.metadata {
            let _ = writeln!(out, "# {k}={v}");
        }
        out.push_str(&self.header.join(","));
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(ToString::to_string).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }
}
