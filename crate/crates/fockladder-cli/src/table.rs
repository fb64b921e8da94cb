//! Output tables, tolerance checks and their CSV / JSON / gnuplot renderings.

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{FloatFormat, SCHEMA_VERSION};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
}

#[derive(Debug, Clone, Serialize)]
pub struct Column {
    pub name: String,
    pub unit: String,
    /// Dynamics picture the column refers to, when it depends on one.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub picture: Option<String>,
}

impl Column {
    pub fn new(name: impl Into<String>, unit: &str) -> Self {
        Column { name: name.into(), unit: unit.into(), picture: None }
    }

    pub fn pictured(name: impl Into<String>, unit: &str, picture: &str) -> Self {
        Column { name: name.into(), unit: unit.into(), picture: Some(picture.into()) }
    }

    /// `name [unit]` or `name [unit; picture picture]`.
    pub fn label(&self) -> String {
        match &self.picture {
            Some(p) => format!("{} [{}; {} picture]", self.name, self.unit, p),
            None => format!("{} [{}]", self.name, self.unit),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: Vec<Column>) -> Self {
        Table { name: name.into(), columns, rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// A requested tolerance and the value it was compared with.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), value, tolerance, passed: value <= tolerance }
    }
}

#[derive(Debug, Clone)]
pub struct Report {
    pub command: &'static str,
    pub tables: Vec<Table>,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.passed).collect()
    }
}

pub fn format_float(x: f64, fmt: FloatFormat) -> String {
    if x.is_nan() {
        return "NaN".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    // Print negative zero as zero.
    let x = if x == 0.0 { 0.0 } else { x };
    match fmt {
        FloatFormat::Fixed17 => format!("{x:.16e}"),
        FloatFormat::Shortest => format!("{x:?}"),
    }
}

fn cell_text(c: &Cell, fmt: FloatFormat) -> String {
    match c {
        Cell::Num(x) => format_float(*x, fmt),
        Cell::Int(i) => i.to_string(),
        Cell::Text(s) => s.clone(),
    }
}

pub fn to_csv(table: &Table, fmt: FloatFormat) -> Result<String, csv::Error> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(Vec::new());
    w.write_record(table.columns.iter().map(Column::label))?;
    for row in &table.rows {
        w.write_record(row.iter().map(|c| cell_text(c, fmt)))?;
    }
    let bytes = w.into_inner().map_err(|e| e.into_error())?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn cell_json(c: &Cell) -> Value {
    match c {
        // Non-finite values have no JSON number form.
        Cell::Num(x) if x.is_finite() => json!(x),
        Cell::Num(_) => Value::Null,
        Cell::Int(i) => json!(i),
        Cell::Text(s) => json!(s),
    }
}

pub fn to_json(report: &Report) -> String {
    let tables: Vec<Value> = report
        .tables
        .iter()
        .map(|t| {
            json!({
                "name": t.name,
                "columns": t.columns,
                "rows": t.rows.iter().map(|r| r.iter().map(cell_json).collect::<Vec<_>>()).collect::<Vec<_>>(),
            })
        })
        .collect();
    let doc = json!({
        "schema_version": SCHEMA_VERSION,
        "command": report.command,
        "tables": tables,
        "checks": report.checks,
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

/// A gnuplot script plotting every column of `csv_file` against the first.
pub fn gnuplot_script(table: &Table, csv_file: &str) -> String {
    let n = table.columns.len();
    let first = &table.columns[0];
    let mut s = String::new();
    s.push_str("set datafile separator ','\n");
    s.push_str("set key autotitle columnhead\n");
    s.push_str(&format!("set xlabel \"{}\"\n", first.label()));
    s.push_str(&format!("set title \"{}\"\n", table.name));
    s.push_str(&format!("plot for [i=2:{n}] '{csv_file}' using 1:i with lines\n"));
    s
}
