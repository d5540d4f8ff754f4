//! Result rows and their CSV/JSON encodings.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::Format;
use crate::error::CliError;

pub const CSV_HEADER: [&str; 8] = [
    "experiment",
    "group",
    "params",
    "measured",
    "ci",
    "bound_name",
    "bound",
    "verdict",
];

/// Rounds to 6 significant digits.
pub fn round6(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{x:.5e}").parse().unwrap_or(x)
}

/// A decimal (stored rounded) or an exact rational `"p/q"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Value {
    Decimal(f64),
    Exact(String),
}

impl Value {
    pub fn decimal(x: f64) -> Value {
        Value::Decimal(round6(x))
    }

    pub fn exact(numer: impl fmt::Display, denom: impl fmt::Display) -> Value {
        Value::Exact(format!("{numer}/{denom}"))
    }

    /// Decimal view; exact values are divided out.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Value::Decimal(x) => Some(*x),
            Value::Exact(s) => {
                let (p, q) = s.split_once('/')?;
                Some(p.trim().parse::<f64>().ok()? / q.trim().parse::<f64>().ok()?)
            }
        }
    }

    fn parse_cell(cell: &str) -> Result<Value, String> {
        if cell.contains('/') {
            Ok(Value::Exact(cell.to_string()))
        } else {
            cell.parse()
                .map(Value::Decimal)
                .map_err(|_| format!("not a number or rational: {cell:?}"))
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Decimal(x) => write!(f, "{x}"),
            Value::Exact(s) => f.write_str(s),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum RowVerdict {
    Pass,
    Fail,
    Info,
}

impl fmt::Display for RowVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RowVerdict::Pass => "PASS",
            RowVerdict::Fail => "FAIL",
            RowVerdict::Info => "INFO",
        })
    }
}

impl RowVerdict {
    fn from_bool(ok: bool) -> RowVerdict {
        if ok {
            RowVerdict::Pass
        } else {
            RowVerdict::Fail
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResultRow {
    pub experiment: String,
    pub group: String,
    pub params: String,
    pub measured: Value,
    pub ci: Option<f64>,
    pub bound_name: String,
    pub bound: Option<Value>,
    pub verdict: RowVerdict,
}

/// Shared columns for the rows of one run; `params` gets the metric name
/// prepended per row.
#[derive(Clone, Debug)]
pub struct RowContext {
    pub experiment: String,
    pub group: String,
    pub params: String,
}

impl RowContext {
    fn row(
        &self,
        metric: &str,
        measured: Value,
        ci: Option<f64>,
        bound_name: &str,
        bound: Option<Value>,
        verdict: RowVerdict,
    ) -> ResultRow {
        let params = if self.params.is_empty() {
            format!("metric={metric}")
        } else {
            format!("metric={metric} {}", self.params)
        };
        ResultRow {
            experiment: self.experiment.clone(),
            group: self.group.clone(),
            params,
            measured,
            ci: ci.map(round6),
            bound_name: bound_name.to_string(),
            bound,
            verdict,
        }
    }

    /// PASS iff `measured ≤ bound + ci`.
    pub fn upper(
        &self,
        metric: &str,
        measured: f64,
        ci: f64,
        bound_name: &str,
        bound: f64,
    ) -> ResultRow {
        let (m, c, b) = (round6(measured), round6(ci), round6(bound));
        let verdict = RowVerdict::from_bool(m <= b + c);
        self.row(
            metric,
            Value::Decimal(m),
            Some(c),
            bound_name,
            Some(Value::Decimal(b)),
            verdict,
        )
    }

    /// PASS iff `measured ≥ bound − ci`.
    pub fn lower(
        &self,
        metric: &str,
        measured: f64,
        ci: f64,
        bound_name: &str,
        bound: f64,
    ) -> ResultRow {
        let (m, c, b) = (round6(measured), round6(ci), round6(bound));
        let verdict = RowVerdict::from_bool(m >= b - c);
        self.row(
            metric,
            Value::Decimal(m),
            Some(c),
            bound_name,
            Some(Value::Decimal(b)),
            verdict,
        )
    }

    /// PASS iff `|measured − target| ≤ ci`.
    pub fn target(
        &self,
        metric: &str,
        measured: f64,
        ci: f64,
        bound_name: &str,
        target: f64,
    ) -> ResultRow {
        let (m, c, b) = (round6(measured), round6(ci), round6(target));
        let verdict = RowVerdict::from_bool((m - b).abs() <= c);
        self.row(
            metric,
            Value::Decimal(m),
            Some(c),
            bound_name,
            Some(Value::Decimal(b)),
            verdict,
        )
    }

    /// PASS only on literal equality.
    pub fn exact(
        &self,
        metric: &str,
        measured: Value,
        bound_name: &str,
        expected: Value,
    ) -> ResultRow {
        let verdict = RowVerdict::from_bool(measured == expected);
        self.row(metric, measured, None, bound_name, Some(expected), verdict)
    }

    pub fn info(
        &self,
        metric: &str,
        measured: Value,
        ci: Option<f64>,
        bound_name: &str,
        bound: Option<Value>,
    ) -> ResultRow {
        self.row(metric, measured, ci, bound_name, bound, RowVerdict::Info)
    }
}

pub fn to_csv(rows: &[ResultRow]) -> Result<String, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_HEADER)?;
    for r in rows {
        w.write_record([
            r.experiment.clone(),
            r.group.clone(),
            r.params.clone(),
            r.measured.to_string(),
            r.ci.map(|c| c.to_string()).unwrap_or_default(),
            r.bound_name.clone(),
            r.bound.as_ref().map(|b| b.to_string()).unwrap_or_default(),
            r.verdict.to_string(),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn from_csv(text: &str) -> Result<Vec<ResultRow>, CliError> {
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(CliError::Table(format!("unexpected CSV header {header:?}")));
    }
    let mut rows = vec![];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let bad = |msg: String| CliError::Table(format!("CSV record {}: {msg}", i + 1));
        let cell = |j: usize| rec.get(j).unwrap_or("").to_string();
        let optional = |j: usize| (!cell(j).is_empty()).then(|| cell(j));
        let verdict = match cell(7).as_str() {
            "PASS" => RowVerdict::Pass,
            "FAIL" => RowVerdict::Fail,
            "INFO" => RowVerdict::Info,
            other => return Err(bad(format!("unknown verdict {other:?}"))),
        };
        rows.push(ResultRow {
            experiment: cell(0),
            group: cell(1),
            params: cell(2),
            measured: Value::parse_cell(&cell(3)).map_err(bad)?,
            ci: optional(4)
                .map(|c| c.parse::<f64>().map_err(|_| bad(format!("bad ci {c:?}"))))
                .transpose()?,
            bound_name: cell(5),
            bound: optional(6)
                .map(|b| Value::parse_cell(&b))
                .transpose()
                .map_err(bad)?,
            verdict,
        });
    }
    Ok(rows)
}

pub fn to_json(rows: &[ResultRow]) -> Result<String, CliError> {
    let mut s = serde_json::to_string_pretty(rows)?;
    s.push('\n');
    Ok(s)
}

pub fn from_json(text: &str) -> Result<Vec<ResultRow>, CliError> {
    Ok(serde_json::from_str(text)?)
}

pub fn render(rows: &[ResultRow], format: Format) -> Result<String, CliError> {
    match format {
        Format::Csv => to_csv(rows),
        Format::Json => to_json(rows),
    }
}

/// Writes to `path`, or to stdout when absent.
pub fn emit(rows: &[ResultRow], format: Format, path: Option<&Path>) -> Result<(), CliError> {
    let text = render(rows, format)?;
    match path {
        Some(p) => fs::write(p, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}

/// Reads a result file written by `emit`, by content: JSON if it starts
/// with `[`, CSV otherwise.
pub fn read_rows(path: &Path) -> Result<Vec<ResultRow>, CliError> {
    let text = fs::read_to_string(path)?;
    if text.trim_start().starts_with('[') {
        from_json(&text)
    } else {
        from_csv(&text)
    }
}

/// Aligned plain-text table of all rows.
pub fn comparison_table(rows: &[ResultRow]) -> String {
    let mut cells: Vec<[String; 8]> = vec![CSV_HEADER.map(str::to_string)];
    for r in rows {
        cells.push([
            r.experiment.clone(),
            r.group.clone(),
            r.params.clone(),
            r.measured.to_string(),
            r.ci.map(|c| c.to_string()).unwrap_or_default(),
            r.bound_name.clone(),
            r.bound.as_ref().map(|b| b.to_string()).unwrap_or_default(),
            r.verdict.to_string(),
        ]);
    }
    let mut widths = [0usize; 8];
    for row in &cells {
        for (w, c) in widths.iter_mut().zip(row) {
            *w = (*w).max(c.chars().count());
        }
    }
    let mut out = String::new();
    for row in &cells {
        let line: Vec<String> = row
            .iter()
            .zip(widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        out.push_str(line.join("  ").trim_end());
        out.push('\n');
    }
    let pass = rows
        .iter()
        .filter(|r| r.verdict == RowVerdict::Pass)
        .count();
    let fail = rows
        .iter()
        .filter(|r| r.verdict == RowVerdict::Fail)
        .count();
    let info = rows.len() - pass - fail;
    out.push_str(&format!("{pass} PASS, {fail} FAIL, {info} INFO\n"));
    out
}
