//! CSV and JSON-lines writers for result tables.
//!
//! Floats are written with 17 significant digits so they round-trip.

use std::io::{self, Write};

use crate::config::Format;

#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Num(f64),
    Int(i64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Value {
    fn from(v: f64) -> Self {
        Value::Num(v)
    }
}

impl From<bool> for Value {
    fn from(v: bool) -> Self {
        Value::Bool(v)
    }
}

impl From<usize> for Value {
    fn from(v: usize) -> Self {
        Value::Int(v as i64)
    }
}

impl From<&str> for Value {
    fn from(v: &str) -> Self {
        Value::Text(v.to_owned())
    }
}

impl From<String> for Value {
    fn from(v: String) -> Self {
        Value::Text(v)
    }
}

impl<T: Into<Value>> From<Option<T>> for Value {
    fn from(v: Option<T>) -> Self {
        v.map_or(Value::Empty, Into::into)
    }
}

pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

impl Value {
    fn csv_field(&self) -> String {
        match self {
            Value::Num(v) => format_f64(*v),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => s.clone(),
            Value::Empty => String::new(),
        }
    }

    fn json(&self) -> String {
        match self {
            Value::Num(v) if v.is_finite() => format_f64(*v),
            Value::Num(_) | Value::Empty => "null".into(),
            Value::Int(v) => v.to_string(),
            Value::Bool(v) => v.to_string(),
            Value::Text(s) => serde_json::Value::String(s.clone()).to_string(),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Table {
    /// Name and version, e.g. `steady/1`.
    pub schema: &'static str,
    /// Whether CSV output carries a leading `schema` column.
    pub schema_column: bool,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Value>>,
}

impl Table {
    pub fn new(schema: &'static str, columns: Vec<String>) -> Self {
        Self {
            schema,
            schema_column: true,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Value>) {
        assert_eq!(row.len(), self.columns.len(), "row width");
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    pub fn write(&self, format: Format, out: impl Write) -> io::Result<()> {
        match format {
            Format::Csv => self.write_csv(out),
            Format::Jsonl => self.write_jsonl(out),
        }
    }

    fn write_csv(&self, out: impl Write) -> io::Result<()> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let mut header: Vec<&str> = Vec::new();
        if self.schema_column {
            header.push("schema");
        }
        header.extend(self.columns.iter().map(String::as_str));
        w.write_record(&header)?;
        for row in &self.rows {
            let mut rec: Vec<String> = Vec::with_capacity(row.len() + 1);
            if self.schema_column {
                rec.push(self.schema.into());
            }
            rec.extend(row.iter().map(Value::csv_field));
            w.write_record(&rec)?;
        }
        w.flush()
    }

    fn write_jsonl(&self, mut out: impl Write) -> io::Result<()> {
        for row in &self.rows {
            let mut line = format!("{{\"schema\":{}", Value::from(self.schema).json());
            for (c, v) in self.columns.iter().zip(row) {
                line.push(',');
                line.push_str(&serde_json::Value::String(c.clone()).to_string());
                line.push(':');
                line.push_str(&v.json());
            }
            line.push_str("}\n");
            out.write_all(line.as_bytes())?;
        }
        out.flush()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("demo/1", vec!["x".into(), "ok".into(), "note".into()]);
        t.push(vec![0.1.into(), true.into(), Value::Empty]);
        t.push(vec![f64::INFINITY.into(), false.into(), "a,b".into()]);
        t
    }

    #[test]
    fn csv_has_header_schema_and_lf() {
        let mut buf = Vec::new();
        sample().write(Format::Csv, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(!s.contains('\r'));
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "schema,x,ok,note");
        assert_eq!(lines[1], "demo/1,1.0000000000000001e-1,true,");
        assert_eq!(lines[2], "demo/1,inf,false,\"a,b\"");
    }

    proptest::proptest! {
        #[test]
        fn floats_round_trip(v in proptest::num::f64::NORMAL | proptest::num::f64::SUBNORMAL | proptest::num::f64::ZERO) {
            proptest::prop_assert_eq!(format_f64(v).parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn jsonl_lines_parse() {
        let mut buf = Vec::new();
        sample().write(Format::Jsonl, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        for line in s.lines() {
            let v: serde_json::Value = serde_json::from_str(line).unwrap();
            assert_eq!(v["schema"], "demo/1");
        }
        let first: serde_json::Value = serde_json::from_str(s.lines().next().unwrap()).unwrap();
        assert_eq!(first["x"].as_f64().unwrap(), 0.1);
        assert!(first["note"].is_null());
    }
}
