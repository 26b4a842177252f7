//! Tabular output. CSV floats carry 17 significant digits so that every
//! value round-trips; JSON uses the shortest round-trip representation.

use std::io::Write;
use std::path::Path;

use qudit_net::metrology::WitnessRecord;
use qudit_net::protocol::GidRecord;
use serde_json::{json, Map, Value};

use crate::config::Format;
use crate::CliError;

pub const BASE_COLUMNS: [&str; 7] = ["tau", "xi2_loc", "xi2_col", "gamma_loc", "f_col", "c1", "c2"];
pub const TILDE_COLUMNS: [&str; 3] = ["f_loc", "c1_tilde", "c2_tilde"];
pub const GID_COLUMNS: [&str; 4] = ["beta", "theta", "theta0", "purity"];

/// Named columns of optional floats, in output order.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Option<f64>>>,
}

fn witness_row(r: &WitnessRecord, tilde: bool) -> Vec<Option<f64>> {
    let mut row = vec![Some(r.tau), Some(r.xi2_loc), Some(r.xi2_col), Some(r.gamma_loc), Some(r.f_col), Some(r.c1), Some(r.c2)];
    if tilde {
        row.extend([r.f_loc, r.c1_tilde, r.c2_tilde]);
    }
    row
}

fn columns(tilde: bool, gid: bool) -> Vec<String> {
    let mut c: Vec<&str> = BASE_COLUMNS.to_vec();
    if tilde {
        c.extend(TILDE_COLUMNS);
    }
    if gid {
        c.extend(GID_COLUMNS);
    }
    c.into_iter().map(String::from).collect()
}

impl Table {
    pub fn gie(records: &[WitnessRecord], tilde: bool) -> Self {
        Self { columns: columns(tilde, false), rows: records.iter().map(|r| witness_row(r, tilde)).collect() }
    }

    pub fn gid(records: &[GidRecord], tilde: bool) -> Self {
        let rows = records
            .iter()
            .map(|r| {
                let mut row = witness_row(&r.witness, tilde);
                row.extend([Some(r.beta), Some(r.theta), Some(r.theta0), r.purity]);
                row
            })
            .collect();
        Self { columns: columns(tilde, true), rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }
}

pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.columns).map_err(CliError::io)?;
    for row in &table.rows {
        w.write_record(row.iter().map(|v| v.map(format_float).unwrap_or_default())).map_err(CliError::io)?;
    }
    w.flush().map_err(CliError::io)
}

fn number(v: Option<f64>) -> Value {
    match v {
        Some(x) if x.is_finite() => json!(x),
        _ => Value::Null,
    }
}

pub fn table_json(table: &Table, kind: &str, meta: Value) -> Value {
    let records: Vec<Value> = table
        .rows
        .iter()
        .map(|row| {
            let obj: Map<String, Value> = table.columns.iter().cloned().zip(row.iter().map(|v| number(*v))).collect();
            Value::Object(obj)
        })
        .collect();
    json!({ "kind": kind, "meta": meta, "columns": table.columns, "records": records })
}

/// Writes `value` (JSON) or `table` (CSV) to `path`, or to stdout when `path` is `None`.
pub fn emit(path: Option<&Path>, format: Format, table: &Table, kind: &str, meta: Value) -> Result<(), CliError> {
    let write = |out: &mut dyn Write| -> Result<(), CliError> {
        match format {
            Format::Csv => write_csv(table, out),
            Format::Json => write_json(&table_json(table, kind, meta.clone()), out),
        }
    };
    to_destination(path, write)
}

pub fn write_json<W: Write + ?Sized>(value: &Value, out: &mut W) -> Result<(), CliError> {
    serde_json::to_writer_pretty(&mut *out, value).map_err(CliError::io)?;
    writeln!(out).map_err(CliError::io)
}

pub fn to_destination(path: Option<&Path>, write: impl Fn(&mut dyn Write) -> Result<(), CliError>) -> Result<(), CliError> {
    match path {
        Some(p) => {
            if let Some(dir) = p.parent().filter(|d| !d.as_os_str().is_empty()) {
                std::fs::create_dir_all(dir).map_err(CliError::io)?;
            }
            let mut file = std::io::BufWriter::new(std::fs::File::create(p).map_err(CliError::io)?);
            write(&mut file)?;
            file.flush().map_err(CliError::io)
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write(&mut lock)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seventeen_digits_round_trip() {
        for v in [0.1, 1.0 / 3.0, 7.835_139_823_102_287e-11, -2.5e300, 5e-324] {
            let s = format_float(v);
            assert_eq!(s.parse::<f64>().unwrap(), v, "{s}");
            let digits = s.split('e').next().unwrap().chars().filter(|c| c.is_ascii_digit()).count();
            assert_eq!(digits, 17);
        }
    }

    #[test]
    fn header_is_exact() {
        let t = Table { columns: columns(true, true), rows: vec![] };
        let mut buf = vec![];
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap().trim(),
            "tau,xi2_loc,xi2_col,gamma_loc,f_col,c1,c2,f_loc,c1_tilde,c2_tilde,beta,theta,theta0,purity"
        );
    }
}
