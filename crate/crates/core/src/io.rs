//! File formats used by the command-line front end.
//!
//! | file | columns |
//! |---|---|
//! | wave function | `x,re,im` |
//! | phase-space field | `X,P,re,im`, rows ordered by `X` then `P`, plus a JSON sidecar |
//! | matrix nonzeros | `n,m,re,im` |
//!
//! Floats are written in shortest round-trip form.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::basis::BasisFamily;
use crate::error::{Error, Result};
use crate::transform::{PhaseSpaceField, PhaseSpaceGrid};

fn read_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Read {
        path: path.to_path_buf(),
        source,
    }
}

fn write_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Write {
        path: path.to_path_buf(),
        source,
    }
}

fn format_err(path: &Path, message: impl std::fmt::Display) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        message: message.to_string(),
    }
}

fn csv_read_err(path: &Path, e: csv::Error) -> Error {
    if !e.is_io_error() {
        return format_err(path, e);
    }
    match e.into_kind() {
        csv::ErrorKind::Io(source) => Error::Read {
            path: path.to_path_buf(),
            source,
        },
        other => format_err(path, format!("{other:?}")),
    }
}

fn open_csv(path: &Path) -> Result<csv::Reader<File>> {
    let file = File::open(path).map_err(read_err(path))?;
    Ok(csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(file))
}

fn check_header(path: &Path, reader: &mut csv::Reader<File>, want: &[&str]) -> Result<()> {
    let header = reader.headers().map_err(|e| csv_read_err(path, e))?;
    if header.iter().ne(want.iter().copied()) {
        return Err(format_err(
            path,
            format!(
                "expected header `{}`, found `{}`",
                want.join(","),
                header.iter().collect::<Vec<_>>().join(",")
            ),
        ));
    }
    Ok(())
}

fn csv_text<R: Serialize>(header: &[&str], rows: impl IntoIterator<Item = R>) -> String {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(Vec::new());
    // writing plain numbers into memory cannot fail
    w.write_record(header).expect("in-memory csv");
    for row in rows {
        w.serialize(row).expect("in-memory csv");
    }
    String::from_utf8(w.into_inner().expect("in-memory csv")).expect("csv output is ASCII")
}

/// Reads `x,re,im` samples.
pub fn read_wave_csv(path: &Path) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let mut reader = open_csv(path)?;
    check_header(path, &mut reader, &["x", "re", "im"])?;
    let mut xs = Vec::new();
    let mut values = Vec::new();
    for row in reader.deserialize::<(f64, f64, f64)>() {
        let (x, re, im) = row.map_err(|e| csv_read_err(path, e))?;
        xs.push(x);
        values.push(Complex64::new(re, im));
    }
    Ok((xs, values))
}

/// `x,re,im` text.
pub fn wave_csv(xs: &[f64], values: &[Complex64]) -> Result<String> {
    if xs.len() != values.len() {
        return Err(Error::SizeMismatch {
            left: xs.len(),
            right: values.len(),
        });
    }
    Ok(csv_text(&["x", "re", "im"], xs.iter().zip(values).map(|(x, v)| (x, v.re, v.im))))
}

/// Writes `x,re,im` samples.
pub fn write_wave_csv(path: &Path, xs: &[f64], values: &[Complex64]) -> Result<()> {
    write_text(path, &wave_csv(xs, values)?)
}

/// Metadata stored next to a field CSV.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldSidecar {
    pub n: usize,
    pub grid: PhaseSpaceGrid,
    pub family: BasisFamily,
    pub truncated_support: bool,
    pub max_abs: f64,
}

/// `field.csv` → `field.json`.
pub fn sidecar_path(csv_path: &Path) -> PathBuf {
    csv_path.with_extension("json")
}

/// Writes `X,P,re,im` rows and the JSON sidecar.
pub fn write_field(path: &Path, field: &PhaseSpaceField) -> Result<()> {
    let g = field.grid;
    let rows = (0..g.nx).flat_map(|i| (0..g.np).map(move |j| (i, j))).map(|(i, j)| {
        let v = field.values[(i, j)];
        (g.x(i), g.p(j), v.re, v.im)
    });
    write_text(path, &csv_text(&["X", "P", "re", "im"], rows))?;
    let sidecar = FieldSidecar {
        n: field.n,
        grid: g,
        family: field.family,
        truncated_support: field.truncated_support,
        max_abs: field.max_abs(),
    };
    write_json(&sidecar_path(path), &sidecar)
}

/// Reads a field written by [`write_field`].
pub fn read_field(path: &Path) -> Result<PhaseSpaceField> {
    let side_path = sidecar_path(path);
    let side: FieldSidecar = read_json(&side_path)?;
    side.grid.validate().map_err(|e| format_err(&side_path, e))?;
    side.family.validate().map_err(|e| format_err(&side_path, e))?;
    let g = side.grid;
    let mut reader = open_csv(path)?;
    check_header(path, &mut reader, &["X", "P", "re", "im"])?;
    let mut values = Vec::with_capacity(g.nx * g.np);
    for row in reader.deserialize::<(f64, f64, f64, f64)>() {
        let (_, _, re, im) = row.map_err(|e| csv_read_err(path, e))?;
        values.push(Complex64::new(re, im));
    }
    if values.len() != g.nx * g.np {
        return Err(format_err(
            path,
            format!("expected {} rows for a {}×{} grid, found {}", g.nx * g.np, g.nx, g.np, values.len()),
        ));
    }
    Ok(PhaseSpaceField {
        grid: g,
        n: side.n,
        family: side.family,
        // rows are X-major, so the row-major iterator fills (i, j) in order
        values: DMatrix::from_row_iterator(g.nx, g.np, values),
        truncated_support: side.truncated_support,
    })
}

/// `n,m,re,im` text.
pub fn matrix_csv(nonzeros: &[(usize, usize, Complex64)]) -> String {
    csv_text(&["n", "m", "re", "im"], nonzeros.iter().map(|(n, m, v)| (n, m, v.re, v.im)))
}

/// Writes `n,m,re,im` rows.
pub fn write_matrix_csv(path: &Path, nonzeros: &[(usize, usize, Complex64)]) -> Result<()> {
    write_text(path, &matrix_csv(nonzeros))
}

/// Reads `n,m,re,im` rows.
pub fn read_matrix_csv(path: &Path) -> Result<Vec<(usize, usize, Complex64)>> {
    let mut reader = open_csv(path)?;
    check_header(path, &mut reader, &["n", "m", "re", "im"])?;
    reader
        .deserialize::<(usize, usize, f64, f64)>()
        .map(|row| {
            row.map(|(n, m, re, im)| (n, m, Complex64::new(re, im)))
                .map_err(|e| csv_read_err(path, e))
        })
        .collect()
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path).map_err(read_err(path))?;
    serde_json::from_str(&text).map_err(|e| format_err(path, e))
}

/// Pretty-printed JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| format_err(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(write_err(path))
}

/// Writes plain text, creating or truncating the file.
pub fn write_text(path: &Path, text: &str) -> Result<()> {
    let mut f = BufWriter::new(File::create(path).map_err(write_err(path))?);
    f.write_all(text.as_bytes()).and_then(|_| f.flush()).map_err(write_err(path))
}
