//! CSV emission: UTF-8, comma separated, one header row behind a schema
//! comment, floats at nine significant digits, divergent delays as the
//! literal token `inf`.

use std::fmt::Write as _;

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Debug, Clone)]
pub enum Field {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    /// Unbounded / not measurable.
    Inf,
}

impl From<f64> for Field {
    fn from(v: f64) -> Field {
        if v.is_finite() {
            Field::Float(v)
        } else {
            Field::Inf
        }
    }
}

impl From<u64> for Field {
    fn from(v: u64) -> Field {
        Field::Int(v)
    }
}

impl From<usize> for Field {
    fn from(v: usize) -> Field {
        Field::Int(v as u64)
    }
}

impl From<bool> for Field {
    fn from(v: bool) -> Field {
        Field::Bool(v)
    }
}

impl From<&str> for Field {
    fn from(v: &str) -> Field {
        Field::Text(v.to_string())
    }
}

pub fn format_float(v: f64) -> String {
    if !v.is_finite() {
        return "inf".into();
    }
    // nine significant digits
    format!("{v:.8e}")
}

pub struct Table {
    command: &'static str,
    columns: Vec<&'static str>,
    rows: Vec<Vec<Field>>,
}

impl Table {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Table {
        Table {
            command,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Field>) {
        assert_eq!(row.len(), self.columns.len(), "row width mismatch");
        self.rows.push(row);
    }

    pub fn rows(&self) -> usize {
        self.rows.len()
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "# alohacr csv {} {}", SCHEMA_VERSION, self.command);
        let _ = writeln!(out, "{}", self.columns.join(","));
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|f| match f {
                    Field::Float(v) => format_float(*v),
                    Field::Int(v) => v.to_string(),
                    Field::Text(v) => v.clone(),
                    Field::Bool(v) => v.to_string(),
                    Field::Inf => "inf".into(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    /// Column values as floats (inf mapped to f64::INFINITY), for plotting.
    pub fn column_values(&self, name: &str) -> Vec<f64> {
        let idx = self
            .columns
            .iter()
            .position(|c| *c == name)
            .expect("column exists");
        self.rows
            .iter()
            .map(|row| match &row[idx] {
                Field::Float(v) => *v,
                Field::Int(v) => *v as f64,
                Field::Bool(v) => f64::from(*v),
                Field::Inf => f64::INFINITY,
                Field::Text(_) => f64::NAN,
            })
            .collect()
    }

    pub fn column_texts(&self, name: &str) -> Vec<String> {
        let idx = self
            .columns
            .iter()
            .position(|c| *c == name)
            .expect("column exists");
        self.rows
            .iter()
            .map(|row| match &row[idx] {
                Field::Text(v) => v.clone(),
                Field::Float(v) => format_float(*v),
                Field::Int(v) => v.to_string(),
                Field::Bool(v) => v.to_string(),
                Field::Inf => "inf".into(),
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn formatting_rules() {
        assert_eq!(format_float(0.36787944117144233), "3.67879441e-1");
        assert_eq!(format_float(f64::INFINITY), "inf");
        let mut t = Table::new("demo", vec!["a", "b"]);
        t.push(vec![1.5f64.into(), Field::Inf]);
        let csv = t.to_csv();
        assert!(csv.starts_with("# alohacr csv v1 demo\na,b\n"));
        assert!(csv.contains("1.50000000e0,inf"));
    }
}
