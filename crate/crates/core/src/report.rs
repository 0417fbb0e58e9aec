//! Convergence table output: CSV for machines, aligned text for people.

use std::io;
use std::path::Path;

use thiserror::Error;

use crate::verification::{ConvergenceRow, ConvergenceTable};

pub const CSV_HEADER: [&str; 6] = ["level", "h", "n_elements", "dofs", "l2_error_density", "eoc"];

#[derive(Debug, Error)]
pub enum ReportError {
    #[error("I/O error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: io::Error,
    },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed table: {0}")]
    Malformed(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TableFormat {
    Csv,
    Console,
}

/// Scientific notation with three significant digits and a two-digit
/// exponent, e.g. `3.53e-07`.
pub fn sci3(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let s = format!("{x:.2e}");
    let (mant, exp) = s.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let sign = if exp < 0 { '-' } else { '+' };
    format!("{mant}e{sign}{:02}", exp.abs())
}

pub fn emit_table(table: &ConvergenceTable, format: TableFormat) -> Result<String, ReportError> {
    if table.rows.is_empty() {
        return Err(ReportError::Malformed("empty table".into()));
    }
    match format {
        TableFormat::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(CSV_HEADER)?;
            for r in &table.rows {
                w.write_record([
                    r.level.to_string(),
                    r.h.to_string(),
                    r.n_elements.to_string(),
                    r.dofs.to_string(),
                    r.l2_error_density.to_string(),
                    r.eoc.map(|e| e.to_string()).unwrap_or_default(),
                ])?;
            }
            let bytes = w.into_inner().map_err(|e| ReportError::Io {
                path: "<buffer>".into(),
                source: e.into_error(),
            })?;
            Ok(String::from_utf8(bytes).expect("ASCII output"))
        }
        TableFormat::Console => {
            let mut s = format!(
                "{:>7}  {:>10}  {:>9}  {:>10}  {:>10}  {:>5}\n",
                "mesh", "h", "elements", "dofs", "L2 error", "EOC"
            );
            for r in &table.rows {
                let eoc = r.eoc.map(|e| format!("{e:.2}")).unwrap_or_else(|| "-".into());
                s.push_str(&format!(
                    "{:>7}  {:>10.6}  {:>9}  {:>10}  {:>10}  {:>5}\n",
                    format!("h0/{}", 1usize << r.level),
                    r.h,
                    r.n_elements,
                    r.dofs,
                    sci3(r.l2_error_density),
                    eoc
                ));
            }
            Ok(s)
        }
    }
}

pub fn parse_csv_table(text: &str) -> Result<ConvergenceTable, ReportError> {
    let mut rd = csv::Reader::from_reader(text.as_bytes());
    let header: Vec<String> = rd.headers()?.iter().map(str::to_string).collect();
    if header != CSV_HEADER {
        return Err(ReportError::Malformed(format!("unexpected header {header:?}")));
    }
    let bad = |field: &str, v: &str| ReportError::Malformed(format!("bad {field} `{v}`"));
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        rows.push(ConvergenceRow {
            level: f(0).parse().map_err(|_| bad("level", f(0)))?,
            h: f(1).parse().map_err(|_| bad("h", f(1)))?,
            n_elements: f(2).parse().map_err(|_| bad("n_elements", f(2)))?,
            dofs: f(3).parse().map_err(|_| bad("dofs", f(3)))?,
            l2_error_density: f(4).parse().map_err(|_| bad("l2_error_density", f(4)))?,
            eoc: match f(5) {
                "" => None,
                v => Some(v.parse().map_err(|_| bad("eoc", v))?),
            },
        });
    }
    Ok(ConvergenceTable { rows })
}

/// Writes through a temporary file in the same directory and renames it,
/// so readers never see a partial table.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), ReportError> {
    let io_err = |source| ReportError::Io {
        path: path.display().to_string(),
        source,
    };
    let tmp = path.with_extension("csv.tmp");
    std::fs::write(&tmp, contents).map_err(io_err)?;
    std::fs::rename(&tmp, path).map_err(io_err)
}
