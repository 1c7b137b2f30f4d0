//! Matrix exchange formats: row-major CSV and the JSON record
//! `{"rows": r, "cols": c, "data": [...]}`.
//!
//! Values are written with `Display`, which for `f64` is the shortest string
//! that parses back to the same bits, so both formats round-trip exactly.

use std::io::{Read, Write};

use serde::{de::DeserializeOwned, Serialize};

use crate::error::{Error, Result};
use crate::linalg::matrix::Matrix;
use crate::scalar::Scalar;

pub fn write_csv<S: Scalar, W: Write>(m: &Matrix<S>, out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(out);
    for i in 0..m.rows() {
        w.write_record(m.row(i).iter().map(ToString::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn to_csv_string<S: Scalar>(m: &Matrix<S>) -> String {
    let mut buf = Vec::new();
    write_csv(m, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("csv output is utf-8")
}

pub fn read_csv<S: Scalar, R: Read>(input: R) -> Result<Matrix<S>> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_reader(input);
    let mut rows = Vec::new();
    for (i, rec) in r.records().enumerate() {
        let rec = rec?;
        let row = rec
            .iter()
            .enumerate()
            .map(|(j, field)| {
                field.parse::<S>().map_err(|_| {
                    Error::Parse(format!(
                        "row {}, column {}: bad number {:?}",
                        i + 1,
                        j + 1,
                        field
                    ))
                })
            })
            .collect::<Result<Vec<S>>>()?;
        rows.push(row);
    }
    Matrix::from_rows(&rows).map_err(|e| Error::Parse(e.to_string()))
}

pub fn from_csv_str<S: Scalar>(s: &str) -> Result<Matrix<S>> {
    read_csv(s.as_bytes())
}

pub fn to_json_string<S: Scalar + Serialize>(m: &Matrix<S>) -> Result<String> {
    Ok(serde_json::to_string(m)?)
}

pub fn from_json_str<S: Scalar + DeserializeOwned>(s: &str) -> Result<Matrix<S>> {
    Ok(serde_json::from_str(s)?)
}
