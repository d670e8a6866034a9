//! JSON forms of complex matrices and matrix tuples:
//! `{"rows": [[{"re": 1.0, "im": 0.0}, …], …]}`; a tuple is a JSON array of
//! such matrices. Plain numbers are accepted as real entries.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ComplexJson {
    pub re: f64,
    #[serde(default)]
    pub im: f64,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
enum EntryJson {
    Complex(ComplexJson),
    Real(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MatrixJson {
    pub rows: Vec<Vec<ComplexJson>>,
}

#[derive(Deserialize)]
struct MatrixJsonIn {
    rows: Vec<Vec<EntryJson>>,
}

impl From<Complex64> for ComplexJson {
    fn from(z: Complex64) -> Self {
        ComplexJson { re: z.re, im: z.im }
    }
}

pub fn matrix_to_json(m: &CMatrix) -> MatrixJson {
    MatrixJson {
        rows: (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| m[(r, c)].into()).collect())
            .collect(),
    }
}

fn matrix_from_in(doc: MatrixJsonIn) -> Result<CMatrix> {
    let rows = doc.rows.len();
    let cols = doc.rows.first().map_or(0, Vec::len);
    if doc.rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Format("matrix rows have unequal lengths".into()));
    }
    let mut m = CMatrix::zeros(rows, cols);
    for (r, row) in doc.rows.into_iter().enumerate() {
        for (c, e) in row.into_iter().enumerate() {
            m[(r, c)] = match e {
                EntryJson::Complex(z) => Complex64::new(z.re, z.im),
                EntryJson::Real(x) => Complex64::new(x, 0.0),
            };
        }
    }
    Ok(m)
}

pub fn matrix_from_json_str(text: &str) -> Result<CMatrix> {
    let doc: MatrixJsonIn = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    matrix_from_in(doc)
}

pub fn tuple_from_json_str(text: &str) -> Result<Vec<CMatrix>> {
    let docs: Vec<MatrixJsonIn> = serde_json::from_str(text).map_err(|e| Error::Format(e.to_string()))?;
    docs.into_iter().map(matrix_from_in).collect()
}

pub fn tuple_to_json(t: &[CMatrix]) -> Vec<MatrixJson> {
    t.iter().map(matrix_to_json).collect()
}
