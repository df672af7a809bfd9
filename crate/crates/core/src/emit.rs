//! CSV and JSON serialization of reports with fixed headers and field order.
//!
//! Floats are written in shortest round-trip form, so every emitted number
//! parses back to the exact value the library returned.

use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::eigen_bounds::GapReport;
use crate::error::{Error, Result};
use crate::frequency::{FrequencyCurve, MinkowskiReport};
use crate::ode_model::{ProfileResult, Trajectory};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            other => Err(Error::Unsupported(format!("output format {other:?}"))),
        }
    }
}

pub const TRAJECTORY_HEADER: &str = "t,w,v,phi,e";
pub const GAP_HEADER: &str = "p,n,k,d,lambda_bar";
pub const CURVE_HEADER: &str = "r,H,D,N,Hbar,Nbar";
pub const MINKOWSKI_HEADER: &str = "r,volume";

fn num(x: f64) -> String {
    format!("{x:?}")
}

fn opt(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

fn table<I: IntoIterator<Item = Vec<String>>>(header: &str, rows: I) -> String {
    let mut out = String::from(header);
    out.push('\n');
    for row in rows {
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn trajectory_csv(tr: &Trajectory) -> String {
    table(TRAJECTORY_HEADER, tr.samples.iter().map(|s| vec![num(s.t), num(s.w), num(s.v), num(s.phi), num(s.e)]))
}

pub fn gap_table_csv(rows: &[GapReport]) -> String {
    table(GAP_HEADER, rows.iter().map(|g| vec![num(g.p), num(g.n), num(g.k), num(g.d), num(g.lambda_bar)]))
}

pub fn frequency_curve_csv(curve: &FrequencyCurve) -> String {
    table(
        CURVE_HEADER,
        curve
            .samples
            .iter()
            .map(|s| vec![num(s.r), num(s.height), num(s.energy), num(s.frequency), num(s.height_bar), num(s.frequency_bar)]),
    )
}

pub fn minkowski_csv(report: &MinkowskiReport) -> String {
    table(MINKOWSKI_HEADER, report.volumes.iter().map(|v| vec![num(v.r), num(v.volume)]))
}

/// One profile row per `(input, result)` pair.
pub const PROFILE_HEADER: &str = "family,p,n,k,lambda,a,b,delta,m,status";

pub fn profile_table_csv(rows: &[ProfileResult]) -> String {
    table(
        PROFILE_HEADER,
        rows.iter().map(|r| {
            let pr = &r.trajectory.problem;
            let status = serde_json::to_value(r.status).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            vec![
                pr.family.name().to_owned(),
                num(pr.p),
                num(pr.n),
                num(pr.k),
                num(pr.lambda),
                num(pr.a),
                opt(r.b),
                opt(r.delta),
                opt(r.m),
                status,
            ]
        }),
    )
}

/// Pretty JSON with a trailing newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Error::Unsupported(format!("serialization failed: {e}")))?;
    s.push('\n');
    Ok(s)
}

fn flat_row(value: &serde_json::Value) -> Result<(Vec<String>, Vec<String>)> {
    let obj = value.as_object().ok_or_else(|| Error::Unsupported("CSV output needs a flat record".into()))?;
    let mut header = Vec::with_capacity(obj.len());
    let mut row = Vec::with_capacity(obj.len());
    for (k, val) in obj {
        let cell = match val {
            serde_json::Value::Null => String::new(),
            serde_json::Value::String(s) => s.clone(),
            serde_json::Value::Bool(b) => b.to_string(),
            serde_json::Value::Number(n) => n.to_string(),
            _ => return Err(Error::Unsupported(format!("field {k:?} is not scalar; use JSON"))),
        };
        header.push(k.clone());
        row.push(cell);
    }
    Ok((header, row))
}

/// CSV with one row per record; the header is the records' field names in declaration order.
pub fn records_csv<T: Serialize>(records: &[T]) -> Result<String> {
    let mut header: Option<Vec<String>> = None;
    let mut rows = Vec::with_capacity(records.len());
    for r in records {
        let v = serde_json::to_value(r).map_err(|e| Error::Unsupported(format!("serialization failed: {e}")))?;
        let (h, row) = flat_row(&v)?;
        match &header {
            None => header = Some(h),
            Some(prev) if *prev != h => return Err(Error::Unsupported("records have differing fields".into())),
            Some(_) => {}
        }
        rows.push(row);
    }
    let header = header.ok_or_else(|| Error::Unsupported("no records to write".into()))?;
    Ok(table(&header.join(","), rows))
}

/// Single-record CSV.
pub fn record_csv<T: Serialize>(value: &T) -> Result<String> {
    records_csv(std::slice::from_ref(value))
}
