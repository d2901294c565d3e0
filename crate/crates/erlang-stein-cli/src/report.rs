//! Row records and the csv/json writers.

use std::io::{self, Write};

use serde_json::{Map, Value};

/// One output cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Missing, Into::into)
    }
}

impl Cell {
    fn to_json(&self) -> Value {
        match self {
            Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Missing => Value::Null,
        }
    }

    fn to_csv(&self) -> String {
        match self {
            Cell::Float(x) => full_precision(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }
}

/// Ordered named cells.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Record {
    fields: Vec<(&'static str, Cell)>,
}

impl Record {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, name: &'static str, value: impl Into<Cell>) -> Self {
        self.fields.push((name, value.into()));
        self
    }

    pub fn get(&self, name: &str) -> Option<&Cell> {
        self.fields.iter().find(|(k, _)| *k == name).map(|(_, v)| v)
    }

    pub fn names(&self) -> impl Iterator<Item = &'static str> + '_ {
        self.fields.iter().map(|(k, _)| *k)
    }

    fn to_json(&self) -> Value {
        let mut map = Map::new();
        for (k, v) in &self.fields {
            map.insert((*k).to_owned(), v.to_json());
        }
        Value::Object(map)
    }
}

/// Pass/fail tally of one verification suite.
#[derive(Debug, Clone, PartialEq)]
pub struct SuiteSummary {
    pub name: String,
    pub passed: usize,
    pub failed: usize,
    pub reported: usize,
}

impl SuiteSummary {
    fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("name".into(), Value::from(self.name.as_str()));
        map.insert("passed".into(), Value::from(self.passed));
        map.insert("failed".into(), Value::from(self.failed));
        map.insert("reported".into(), Value::from(self.reported));
        Value::Object(map)
    }
}

/// Everything one run emits.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub command: &'static str,
    pub config: Record,
    pub rows: Vec<Record>,
    pub suites: Vec<SuiteSummary>,
    pub tolerances: Record,
}

pub const SCHEMA_VERSION: u64 = 1;

impl Document {
    pub fn to_json(&self) -> Value {
        let mut map = Map::new();
        map.insert("schema_version".into(), Value::from(SCHEMA_VERSION));
        map.insert("command".into(), Value::from(self.command));
        map.insert("config".into(), self.config.to_json());
        map.insert("rows".into(), Value::Array(self.rows.iter().map(Record::to_json).collect()));
        map.insert(
            "suites".into(),
            Value::Array(self.suites.iter().map(SuiteSummary::to_json).collect()),
        );
        map.insert("tolerances".into(), self.tolerances.to_json());
        Value::Object(map)
    }

    pub fn write_json<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut ser = serde_json::Serializer::with_formatter(&mut out, ScientificFormatter);
        serde::Serialize::serialize(&self.to_json(), &mut ser).map_err(io::Error::other)?;
        out.write_all(b"\n")
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        if let Some(first) = self.rows.first() {
            w.write_record(first.names())?;
        }
        for row in &self.rows {
            w.write_record(row.fields.iter().map(|(_, v)| v.to_csv()))?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Floats as `d.dddddddddddddddde±x`, 17 significant digits.
struct ScientificFormatter;

impl serde_json::ser::Formatter for ScientificFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }
}

pub fn full_precision(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "nan".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

/// Two decimals.
pub fn fixed2(x: f64) -> String {
    format!("{x:.2}")
}

/// Three significant figures in `d.dde±x` form.
pub fn sci2(x: f64) -> String {
    format!("{x:.2e}")
}

/// Two decimals for moderate magnitudes, otherwise three significant figures.
pub fn rounded(x: f64) -> String {
    let a = x.abs();
    if a != 0.0 && !(0.01..100.0).contains(&a) {
        sci2(x)
    } else {
        fixed2(x)
    }
}
