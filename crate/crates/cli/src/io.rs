//! CSV and JSON files. Floats are written with 17 significant digits so
//! they parse back to the same bits.

use std::fs;
use std::path::{Path, PathBuf};

use decopoles_core::Complex;
use serde::Serialize;

use crate::error::CliError;

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub struct Table {
    header: Vec<&'static str>,
    rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Table {
            header: header.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let werr = |e: csv::Error| CliError::Write {
            path: path.to_owned(),
            source: e.into(),
        };
        let mut w = csv::Writer::from_path(path).map_err(werr)?;
        w.write_record(&self.header).map_err(werr)?;
        for r in &self.rows {
            w.write_record(r).map_err(werr)?;
        }
        w.flush().map_err(|source| CliError::Write {
            path: path.to_owned(),
            source,
        })
    }
}

pub fn write_signal(path: &Path, times: &[f64], values: &[Complex]) -> Result<(), CliError> {
    let mut t = Table::new(&["t", "re", "im"]);
    for (&x, v) in times.iter().zip(values) {
        t.push(vec![num(x), num(v.re), num(v.im)]);
    }
    t.write(path)
}

fn read_columns(path: &Path, names: &[&str]) -> Result<Vec<Vec<f64>>, CliError> {
    let cerr = |source| CliError::Csv {
        path: path.to_owned(),
        source,
    };
    let mut r = csv::Reader::from_path(path).map_err(cerr)?;
    let header = r.headers().map_err(cerr)?.clone();
    let idx = names
        .iter()
        .map(|n| {
            header
                .iter()
                .position(|h| h.trim() == *n)
                .ok_or_else(|| CliError::Config(format!("{}: missing column `{n}`", path.display())))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut cols = vec![Vec::new(); names.len()];
    for (line, rec) in r.records().enumerate() {
        let rec = rec.map_err(cerr)?;
        for (c, &i) in idx.iter().enumerate() {
            let field = rec.get(i).unwrap_or("");
            let v = field.trim().parse::<f64>().map_err(|_| {
                CliError::Config(format!(
                    "{}: row {}: `{field}` is not a number",
                    path.display(),
                    line + 2
                ))
            })?;
            cols[c].push(v);
        }
    }
    Ok(cols)
}

pub fn read_signal(path: &Path) -> Result<(Vec<f64>, Vec<Complex>), CliError> {
    let mut cols = read_columns(path, &["t", "re", "im"])?;
    let im = cols.pop().unwrap_or_default();
    let re = cols.pop().unwrap_or_default();
    let t = cols.pop().unwrap_or_default();
    Ok((t, re.into_iter().zip(im).map(|(a, b)| Complex::new(a, b)).collect()))
}

pub fn read_pairs(path: &Path, x: &str, y: &str) -> Result<(Vec<f64>, Vec<f64>), CliError> {
    let mut cols = read_columns(path, &[x, y])?;
    let ys = cols.pop().unwrap_or_default();
    Ok((cols.pop().unwrap_or_default(), ys))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("serialisable");
    text.push('\n');
    write_text(path, &text)
}

pub fn write_text(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Write {
        path: path.to_owned(),
        source,
    })
}

pub fn ensure_dir(dir: &Path) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Write {
        path: dir.to_owned(),
        source,
    })?;
    Ok(dir.to_owned())
}
