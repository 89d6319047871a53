//! JSON encoding of states, witnesses and reports.
//!
//! State file: `{"k": 3, "N": 2, "a": [[[re, im], ...], ...]}` with the
//! coefficient matrix stored row-major. Floats are always written with 17
//! significant digits so a parse/emit cycle reproduces the input bytes.

use std::io;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::ser::Formatter;

use crate::error::{Error, Result};
use crate::oracle::DenseMatrix;
use crate::separability::Witness;
use crate::state::{SCState, Tolerances};

/// Compact output with fixed-width exponent floats. Non-finite values are
/// written as `null`.
#[derive(Debug, Clone, Copy, Default)]
pub struct CanonicalFormatter;

impl Formatter for CanonicalFormatter {
    fn write_f64<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + io::Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, f64::from(value))
    }
}

/// Serializes with [`CanonicalFormatter`] and appends a newline.
pub fn to_canonical_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, CanonicalFormatter);
    value.serialize(&mut ser).map_err(|e| Error::Parse(e.to_string()))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| Error::Parse(e.to_string()))
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct StateFile {
    k: usize,
    #[serde(rename = "N")]
    n: usize,
    a: Vec<Vec<[f64; 2]>>,
}

pub fn state_to_json(state: &SCState) -> Result<String> {
    let n = state.local_dim();
    let a = (0..n)
        .map(|r| {
            (0..n)
                .map(|c| {
                    let z = state.coeffs().entry(r, c);
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    to_canonical_string(&StateFile {
        k: state.parties(),
        n,
        a,
    })
}

/// Parses and validates a state file. Syntax errors carry line and column.
pub fn state_from_json(text: &str, tol: Tolerances) -> Result<SCState> {
    let file: StateFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.a.len() != file.n {
        return Err(Error::Parse(format!(
            "\"a\" has {} rows, expected N = {}",
            file.a.len(),
            file.n
        )));
    }
    let mut data = Vec::with_capacity(file.n * file.n);
    for (r, row) in file.a.iter().enumerate() {
        if row.len() != file.n {
            return Err(Error::Parse(format!(
                "row {r} of \"a\" has {} entries, expected N = {}",
                row.len(),
                file.n
            )));
        }
        for (c, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(Error::NonFinite { row: r, col: c });
            }
            data.push(Complex64::new(re, im));
        }
    }
    let matrix = DenseMatrix::from_row_major(file.n, file.n, data)?;
    SCState::new(file.k, file.n, matrix, tol)
}

#[derive(Serialize)]
struct WitnessFile {
    dims: Vec<usize>,
    terms: Vec<(u64, u64, [f64; 2])>,
}

/// `{"dims": [N, ...], "terms": [[row, col, [re, im]], ...]}`; row and
/// column are flattened multi-indices with party 1 most significant.
pub fn witness_to_json(w: &Witness) -> Result<String> {
    to_canonical_string(&WitnessFile {
        dims: vec![w.local_dim(); w.parties()],
        terms: w
            .terms()
            .iter()
            .map(|t| (t.row, t.col, [t.value.re, t.value.im]))
            .collect(),
    })
}
