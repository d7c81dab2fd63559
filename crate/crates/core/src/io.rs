//! JSON loaders and deterministic CSV/JSON emitters.
//!
//! Loaders reject data that violates a type's invariants unless `normalize` is
//! set, in which case non-negative rows are rescaled to sum to one. Emitters
//! print every float with 12 significant digits, infinities as `"inf"`.

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::asymptotics::{ExponentSeries, SeriesTransform};
use crate::prob_core::{Channel, Dist, JointDist};
use crate::{Error, Result};

#[derive(Deserialize)]
struct RawDist {
    alphabet: Vec<String>,
    probs: Vec<f64>,
}

#[derive(Deserialize)]
struct RawChannel {
    input: Vec<String>,
    output: Vec<String>,
    rows: Vec<Vec<f64>>,
}

#[derive(Deserialize)]
struct RawJoint {
    rows: Vec<String>,
    cols: Vec<String>,
    mass: Vec<Vec<f64>>,
}

fn parse<T: DeserializeOwned>(text: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| match e.classify() {
        // invariant failures surface as serde "data" errors carrying our message
        serde_json::error::Category::Data => Error::InvalidDistribution(e.to_string()),
        _ => Error::InvalidParameter(format!("malformed JSON: {e}")),
    })
}

pub fn parse_dist(text: &str, normalize: bool) -> Result<Dist> {
    if normalize {
        let r: RawDist = parse(text)?;
        Dist::new_normalized(r.alphabet, r.probs)
    } else {
        parse(text)
    }
}

pub fn parse_channel(text: &str, normalize: bool) -> Result<Channel> {
    if normalize {
        let r: RawChannel = parse(text)?;
        Channel::new_normalized(r.input, r.output, r.rows)
    } else {
        parse(text)
    }
}

pub fn parse_joint(text: &str, normalize: bool) -> Result<JointDist> {
    if normalize {
        let r: RawJoint = parse(text)?;
        JointDist::new_normalized(r.rows, r.cols, r.mass)
    } else {
        parse(text)
    }
}

/// Any other record with a serde representation (cost matrices, setups, …).
pub fn parse_record<T: DeserializeOwned>(text: &str) -> Result<T> {
    parse(text)
}

/// Rounds to 12 significant digits; the shortest representation of the
/// rounded value is what gets printed.
pub fn round12(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.11e}").parse().unwrap_or(x)
}

pub fn fmt_num(x: f64) -> String {
    if x.is_nan() {
        "nan".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        let r = round12(x);
        if r == 0.0 { "0".into() } else { r.to_string() }
    }
}

fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) => match (n.is_f64(), n.as_f64()) {
            (true, Some(f)) => serde_json::Number::from_f64(round12(f)).map_or(Value::Number(n), Value::Number),
            _ => Value::Number(n),
        },
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Pretty JSON with every float rounded to 12 significant digits. Field order
/// follows the struct declaration.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let v = serde_json::to_value(value).map_err(|e| Error::InvalidParameter(e.to_string()))?;
    serde_json::to_string_pretty(&round_value(v)).map_err(|e| Error::InvalidParameter(e.to_string()))
}

/// A rectangular table of cells, emitted as CSV.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone)]
pub enum Cell {
    Int(i64),
    Num(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table { header: header.iter().map(|s| s.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        let err = |e: csv::Error| Error::InvalidParameter(e.to_string());
        w.write_record(&self.header).map_err(err)?;
        for row in &self.rows {
            let cells = row.iter().map(|c| match c {
                Cell::Int(i) => i.to_string(),
                Cell::Num(x) => fmt_num(*x),
                Cell::Text(s) => s.clone(),
                Cell::Missing => String::new(),
            });
            w.write_record(cells).map_err(err)?;
        }
        let bytes = w.into_inner().map_err(|e| Error::InvalidParameter(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::InvalidParameter(e.to_string()))
    }
}

fn parse_cell(s: &str) -> Result<f64> {
    match s.trim() {
        "inf" => Ok(f64::INFINITY),
        "-inf" => Ok(f64::NEG_INFINITY),
        t => t.parse().map_err(|_| Error::InvalidParameter(format!("not a number: {t:?}"))),
    }
}

/// Exponent-series CSV: columns `n,value[,transformed]`; the last column is
/// ignored on input since it is recomputed from the transform.
pub fn series_to_csv(series: &ExponentSeries) -> Result<String> {
    let mut t = Table::new(&["n", "value", "transformed"]);
    for &(n, v) in &series.points {
        t.push(vec![n.into(), v.into(), series.transformed(v).into()]);
    }
    t.to_csv()
}

pub fn parse_series_csv(text: &str, transform: SeriesTransform) -> Result<ExponentSeries> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut points = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::InvalidParameter(e.to_string()))?;
        let n = rec.get(0).unwrap_or("").parse::<usize>().map_err(|_| Error::InvalidParameter("bad n column".into()))?;
        let v = parse_cell(rec.get(1).unwrap_or(""))?;
        points.push((n, v));
    }
    ExponentSeries::new(points, transform)
}

/// Parses a numeric CSV back into rows of floats (header skipped, empty cells NaN).
pub fn parse_numeric_csv(text: &str) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::InvalidParameter(e.to_string()))?.iter().map(String::from).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| Error::InvalidParameter(e.to_string()))?;
        rows.push(rec.iter().map(|c| if c.is_empty() { Ok(f64::NAN) } else { parse_cell(c) }).collect::<Result<_>>()?);
    }
    Ok((header, rows))
}

/// Integer range flag: `a..b` (inclusive), `a..b:step`, a comma list, or a single value.
pub fn parse_range(s: &str) -> Result<Vec<usize>> {
    let bad = || Error::InvalidParameter(format!("bad range {s:?}"));
    if let Some((a, rest)) = s.split_once("..") {
        let (b, step) = rest.split_once(':').map_or((rest, "1"), |(b, st)| (b, st));
        let (a, b, step): (usize, usize, usize) =
            (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?, step.trim().parse().map_err(|_| bad())?);
        if step == 0 || a > b {
            return Err(bad());
        }
        Ok((a..=b).step_by(step).collect())
    } else {
        s.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect()
    }
}

/// Real list flag: comma-separated numbers.
pub fn parse_reals(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(|t| parse_cell(t)).collect()
}
