//! CSV, JSON and text serialization of cost tables.

use std::fs;
use std::path::Path;

use serde::Serialize;

use crate::cost::{render_pow2, AttackCostRow, TableReport, COLUMNS};
use crate::error::{Error, Result};

pub const CSV_HEADER: &str =
    "round,not,cnot,toff_c,h,toff_h,toff_s,cliff,t,t_depth,full_depth,qubits";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
    Text,
}

impl std::str::FromStr for Format {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            "text" => Ok(Format::Text),
            _ => Err(Error::InvalidParams(format!("unknown format `{s}`"))),
        }
    }
}

fn num(x: f64) -> String {
    if x.fract() == 0.0 && x.abs() < 2f64.powi(53) {
        format!("{}", x as i64)
    } else {
        format!("{x:e}")
    }
}

fn to_csv(header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io {
        path: "<csv>".into(),
        source: e.into_error(),
    })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

/// Rows keyed by a round label, in the fixed column order.
pub fn rows_csv(rows: &[(String, [f64; 11])]) -> Result<String> {
    let header: Vec<&str> = CSV_HEADER.split(',').collect();
    to_csv(
        &header,
        rows.iter().map(|(k, v)| {
            std::iter::once(k.clone())
                .chain(v.iter().map(|&x| num(x)))
                .collect()
        }),
    )
}

/// Computed values of a table; the first column holds the row key.
pub fn table_csv(t: &TableReport) -> Result<String> {
    let header: Vec<&str> = std::iter::once("round")
        .chain(t.columns.iter().copied())
        .collect();
    to_csv(
        &header,
        t.rows.iter().map(|r| {
            std::iter::once(r.key.clone())
                .chain(r.cells.iter().map(|c| num(c.computed)))
                .collect()
        }),
    )
}

pub fn table_json(t: &TableReport) -> Result<String> {
    Ok(serde_json::to_string_pretty(t)?)
}

#[derive(Serialize)]
struct AttackJson<'a> {
    #[serde(flatten)]
    row: &'a AttackCostRow,
    rendered: Vec<(&'static str, String)>,
}

pub fn attack_json(row: &AttackCostRow) -> Result<String> {
    let rendered = COLUMNS
        .iter()
        .zip(row.values)
        .map(|(&c, v)| (c, render_pow2(v)))
        .collect();
    Ok(serde_json::to_string_pretty(&AttackJson { row, rendered })?)
}

pub fn table_text(t: &TableReport) -> String {
    let mut out = format!("table {} ({}) mode={}\n", t.id, t.title, t.mode);
    for r in &t.rows {
        out.push_str(&format!("{}\n", r.key));
        for c in &r.cells {
            let reference = c.reference.map(render_pow2).unwrap_or_else(|| "-".into());
            let err = c
                .error
                .map(|e| format!("{e:.4}"))
                .unwrap_or_else(|| "-".into());
            let flag = if c.ok() { "ok" } else { "MISMATCH" };
            out.push_str(&format!(
                "  {:<11} {:>16} {:>16} {:>8} {}\n",
                c.column,
                render_pow2(c.computed),
                reference,
                err,
                flag
            ));
        }
    }
    for n in &t.notes {
        out.push_str(&format!("note: {n}\n"));
    }
    out
}

pub fn render_table(t: &TableReport, f: Format) -> Result<String> {
    match f {
        Format::Csv => table_csv(t),
        Format::Json => table_json(t),
        Format::Text => Ok(table_text(t)),
    }
}

pub fn write_file(path: &Path, contents: &str) -> Result<()> {
    let io = |source| Error::Io {
        path: path.display().to_string(),
        source,
    };
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(io)?;
    }
    fs::write(path, contents).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cost::{table_report, CostOptions};

    #[test]
    fn empty_csv_is_header_only() {
        assert_eq!(rows_csv(&[]).unwrap(), format!("{CSV_HEADER}\n"));
    }

    #[test]
    fn table4_csv_header() {
        let t = table_report(4, &CostOptions::default()).unwrap();
        let csv = table_csv(&t).unwrap();
        assert!(
            csv.starts_with(&format!("{CSV_HEADER}\n32/64 r32,448,2816,")),
            "{csv}"
        );
    }

    #[test]
    fn json_rows_carry_mode() {
        for opts in [CostOptions::default(), CostOptions::strict()] {
            let t = table_report(4, &opts).unwrap();
            let v: serde_json::Value = serde_json::from_str(&table_json(&t).unwrap()).unwrap();
            let rows = v["rows"].as_array().unwrap();
            assert!(!rows.is_empty());
            for r in rows {
                assert_eq!(r["mode"], opts.mode.to_string());
            }
        }
    }

    #[test]
    fn io_errors_name_the_path() {
        let e = write_file(Path::new("/proc/nonexistent/x.csv"), "").unwrap_err();
        assert!(e.to_string().contains("/proc/nonexistent"));
    }
}
