//! Tabular output shared by every subcommand.
//!
//! A [`Table`] is a list of `(flag, value)` pairs describing the run plus a
//! rectangular block of typed cells. The CSV form is
//!
//! ```text
//! # command: simulate
//! # seed: 7
//! k,rule,n,...
//! 3,3,20,...
//! ```
//!
//! and the JSON form is `{"flags": {...}, "columns": [...], "rows": [{"k": 3, ...}, ...]}`
//! with keys in column order. Floats are written in shortest round-trip
//! form, so parsing an emitted file and writing it again reproduces it
//! byte for byte.

use std::fmt;

use serde_json::{Map, Value};

use crate::analytics::{BoundRow, PoissonFixedPoint};
use crate::error::{Error, Result};
use crate::hardinstances::TightnessReport;
use crate::montecarlo::SimReport;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Text(v.to_string())
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

fn format_float(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        serde_json::to_string(&x).expect("finite floats serialize")
    }
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Int(v) => write!(f, "{v}"),
            Cell::Float(v) => f.write_str(&format_float(*v)),
            Cell::Text(s) => f.write_str(s),
            Cell::Empty => Ok(()),
        }
    }
}

impl Cell {
    /// Inverse of the CSV rendering.
    pub fn parse(text: &str) -> Cell {
        if text.is_empty() {
            return Cell::Empty;
        }
        if let Ok(v) = text.parse::<i64>() {
            if v.to_string() == text {
                return Cell::Int(v);
            }
        }
        if let Ok(v) = text.parse::<f64>() {
            if format_float(v) == text {
                return Cell::Float(v);
            }
        }
        Cell::Text(text.to_string())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(v) => Some(v as f64),
            Cell::Float(v) => Some(v),
            _ => None,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) => serde_json::Number::from_f64(*v)
                .map(Value::Number)
                .unwrap_or_else(|| Value::String(format_float(*v))),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }

    fn from_json(v: &Value) -> Result<Cell> {
        Ok(match v {
            Value::Null => Cell::Empty,
            Value::Number(n) => match n.as_i64() {
                Some(i) if !n.is_f64() => Cell::Int(i),
                _ => Cell::Float(
                    n.as_f64()
                        .ok_or_else(|| Error::Parse(format!("unrepresentable number {n}")))?,
                ),
            },
            Value::String(s) => Cell::Text(s.clone()),
            other => return Err(Error::Parse(format!("unexpected cell {other}"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub flags: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(flags: Vec<(String, String)>, columns: Vec<String>) -> Self {
        Table {
            flags,
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Parse(format!(
                "row has {} cells, table has {} columns",
                row.len(),
                self.columns.len()
            )));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Cell `name` of row `row`.
    pub fn get(&self, row: usize, name: &str) -> Option<&Cell> {
        self.rows.get(row)?.get(self.column(name)?)
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut out = String::new();
        for (key, value) in &self.flags {
            if key.contains(['\n', ':']) || value.contains('\n') {
                return Err(Error::Parse(format!("flag {key:?} cannot be written as a header line")));
            }
            out.push_str(&format!("# {key}: {value}\n"));
        }
        if self.columns.first().is_some_and(|c| c.starts_with('#')) {
            return Err(Error::Parse("first column name would read back as a header line".into()));
        }
        let mut writer = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        writer.write_record(&self.columns)?;
        for row in &self.rows {
            writer.write_record(row.iter().map(|c| c.to_string()))?;
        }
        let body = writer
            .into_inner()
            .map_err(|e| Error::Parse(format!("csv buffer: {e}")))?;
        out.push_str(std::str::from_utf8(&body).expect("csv output is utf-8"));
        Ok(out)
    }

    pub fn from_csv(text: &str) -> Result<Table> {
        let mut flags = Vec::new();
        let mut offset = 0;
        for line in text.split_inclusive('\n') {
            let Some(rest) = line.strip_prefix('#') else { break };
            let rest = rest.trim_end_matches('\n').strip_prefix(' ').unwrap_or("");
            let (key, value) = rest
                .split_once(": ")
                .ok_or_else(|| Error::Parse(format!("malformed header line {line:?}")))?;
            flags.push((key.to_string(), value.to_string()));
            offset += line.len();
        }
        let mut reader = csv::ReaderBuilder::new()
            .has_headers(true)
            .from_reader(text[offset..].as_bytes());
        let columns: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        check_unique(&columns)?;
        let mut table = Table::new(flags, columns);
        for record in reader.records() {
            let record = record?;
            table.push(record.iter().map(Cell::parse).collect())?;
        }
        Ok(table)
    }

    pub fn to_json_value(&self) -> Value {
        let flags: Map<String, Value> = self
            .flags
            .iter()
            .map(|(k, v)| (k.clone(), Value::String(v.clone())))
            .collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                Value::Object(
                    self.columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.to_json()))
                        .collect(),
                )
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("flags".into(), Value::Object(flags));
        doc.insert("columns".into(), self.columns.iter().map(|c| Value::from(c.as_str())).collect());
        doc.insert("rows".into(), Value::Array(rows));
        Value::Object(doc)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_json_value())
            .expect("table serialization cannot fail");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Table> {
        let doc: Value = serde_json::from_str(text)?;
        let field = |name: &str| {
            doc.get(name)
                .ok_or_else(|| Error::Parse(format!("missing field {name:?}")))
        };
        let flags = field("flags")?
            .as_object()
            .ok_or_else(|| Error::Parse("flags must be an object".into()))?
            .iter()
            .map(|(k, v)| match v {
                Value::String(s) => Ok((k.clone(), s.clone())),
                _ => Err(Error::Parse(format!("flag {k:?} must be a string"))),
            })
            .collect::<Result<Vec<_>>>()?;
        let columns = field("columns")?
            .as_array()
            .ok_or_else(|| Error::Parse("columns must be an array".into()))?
            .iter()
            .map(|c| {
                c.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse("column names must be strings".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        check_unique(&columns)?;
        let mut table = Table::new(flags, columns);
        let rows = field("rows")?
            .as_array()
            .ok_or_else(|| Error::Parse("rows must be an array".into()))?;
        for row in rows {
            let obj = row
                .as_object()
                .ok_or_else(|| Error::Parse("rows must be objects".into()))?;
            if obj.len() != table.columns.len() {
                return Err(Error::Parse("row keys do not match columns".into()));
            }
            let cells = table
                .columns
                .iter()
                .map(|c| {
                    obj.get(c)
                        .ok_or_else(|| Error::Parse(format!("row lacks column {c:?}")))
                        .and_then(Cell::from_json)
                })
                .collect::<Result<Vec<_>>>()?;
            table.push(cells)?;
        }
        Ok(table)
    }
}

fn check_unique(columns: &[String]) -> Result<()> {
    let mut seen = std::collections::HashSet::new();
    match columns.iter().find(|c| !seen.insert(c.as_str())) {
        Some(c) => Err(Error::Parse(format!("duplicate column {c:?}"))),
        None => Ok(()),
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Columns of a simulation report with capacity `k`.
pub fn sim_columns(k: usize) -> Vec<String> {
    let mut cols = names(&[
        "k",
        "r_or_rule",
        "n",
        "trials",
        "seed",
        "mean_alg",
        "mean_prophet",
        "ratio",
        "stderr",
        "ci_lo",
        "ci_hi",
    ]);
    cols.extend((0..=k).map(|j| format!("picks_{j}")));
    cols
}

pub fn sim_row(report: &SimReport) -> Vec<Cell> {
    let mut row = vec![
        report.k.into(),
        report.rule.as_str().into(),
        report.n.into(),
        report.trials.into(),
        report.seed.into(),
        report.mean_alg.into(),
        report.mean_prophet.into(),
        report.ratio.into(),
        report.stderr_ratio.into(),
        report.ci_lo.into(),
        report.ci_hi.into(),
    ];
    row.extend(report.pick_histogram.iter().map(|&c| Cell::from(c)));
    row
}

/// One row per report; all reports must share `k`.
pub fn sim_table(flags: Vec<(String, String)>, reports: &[SimReport]) -> Result<Table> {
    let k = reports.first().map_or(0, |r| r.k);
    let mut table = Table::new(flags, sim_columns(k));
    for r in reports {
        table.push(sim_row(r))?;
    }
    Ok(table)
}

pub fn tightness_table(flags: Vec<(String, String)>, reports: &[TightnessReport]) -> Result<Table> {
    let k = reports.first().map_or(0, |r| r.k);
    let mut cols = sim_columns(k);
    cols.extend(names(&["s", "capacity_exhaust_prob"]));
    let mut table = Table::new(flags, cols);
    for r in reports {
        let mut row = sim_row(&r.report);
        row.push(r.s.into());
        row.push(r.capacity_exhaust_prob.into());
        table.push(row)?;
    }
    Ok(table)
}

pub fn bound_table_report(flags: Vec<(String, String)>, rows: &[BoundRow]) -> Result<Table> {
    let mut table = Table::new(
        flags,
        names(&[
            "k",
            "r",
            "bound",
            "asymptote",
            "gap",
            "vacuous",
            "unproven",
            "moderate_dev_estimate",
            "poisson_lambda",
            "poisson_ratio",
            "poisson_asymptote",
        ]),
    );
    for b in rows {
        table.push(vec![
            b.k.into(),
            b.r.into(),
            b.bound.into(),
            b.asymptote.into(),
            b.gap.into(),
            b.vacuous.into(),
            b.unproven_bound.into(),
            b.moderate_dev_estimate.into(),
            b.poisson_lambda.into(),
            b.poisson_ratio.into(),
            b.poisson_asymptote.into(),
        ])?;
    }
    Ok(table)
}

pub fn poisson_table(flags: Vec<(String, String)>, rows: &[PoissonFixedPoint]) -> Result<Table> {
    let mut table = Table::new(flags, names(&["k", "lambda", "ratio", "residual"]));
    for p in rows {
        table.push(vec![p.k.into(), p.lambda.into(), p.ratio.into(), p.residual.into()])?;
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(
            vec![("command".into(), "simulate".into()), ("seed".into(), "7".into())],
            names(&["k", "rule", "ratio", "note", "opt"]),
        );
        t.push(vec![3usize.into(), "fixed_price=0.5".into(), 0.66.into(), "a,b".into(), Cell::Empty])
            .unwrap();
        t.push(vec![1usize.into(), "3".into(), 1e-20.into(), "x".into(), 2.0.into()])
            .unwrap();
        t
    }

    #[test]
    fn csv_layout() {
        let text = sample().to_csv().unwrap();
        assert_eq!(
            text,
            "# command: simulate\n# seed: 7\nk,rule,ratio,note,opt\n3,fixed_price=0.5,0.66,\"a,b\",\n1,3,1e-20,x,2.0\n"
        );
    }

    #[test]
    fn csv_round_trip_is_byte_identical() {
        let text = sample().to_csv().unwrap();
        let parsed = Table::from_csv(&text).unwrap();
        assert_eq!(parsed.to_csv().unwrap(), text);
        assert_eq!(parsed.get(1, "ratio"), Some(&Cell::Float(1e-20)));
    }

    #[test]
    fn json_round_trip_is_byte_identical() {
        let text = sample().to_json();
        let parsed = Table::from_json(&text).unwrap();
        assert_eq!(parsed.to_json(), text);
    }

    #[test]
    fn cell_parsing() {
        assert_eq!(Cell::parse("12"), Cell::Int(12));
        assert_eq!(Cell::parse("1.5"), Cell::Float(1.5));
        assert_eq!(Cell::parse("inf"), Cell::Float(f64::INFINITY));
        assert_eq!(Cell::parse("007"), Cell::Text("007".into()));
        assert_eq!(Cell::parse(""), Cell::Empty);
    }

    #[test]
    fn ragged_rows_rejected() {
        let mut t = Table::new(vec![], names(&["a"]));
        assert!(t.push(vec![]).is_err());
        assert!(Table::from_csv("a,b\n1\n").is_err());
        assert!(Table::from_csv("#bad\na\n").is_err());
    }
}
