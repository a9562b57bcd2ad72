//! Dense float32 matrix files.
//!
//! Layout: the magic bytes `SPEM`, `rows: u32`, `cols: u32`, then
//! `rows × cols` row-major float32 values. All integers and floats are
//! little-endian.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

pub const MAGIC: &[u8; 4] = b"SPEM";

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    cols: usize,
    data: Vec<f32>,
}

impl Matrix {
    pub fn rows(&self) -> usize {
        self.data.len().checked_div(self.cols).unwrap_or(0)
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> Option<&[f32]> {
        (i < self.rows()).then(|| &self.data[i * self.cols..(i + 1) * self.cols])
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f32]> {
        self.data.chunks_exact(self.cols.max(1))
    }
}

pub fn write_matrix<R: AsRef<[f32]>>(path: impl AsRef<Path>, cols: usize, rows: &[R]) -> Result<()> {
    let path = path.as_ref();
    let mut bytes = Vec::with_capacity(12 + 4 * cols * rows.len());
    bytes.extend_from_slice(MAGIC);
    let to_u32 = |n: usize| u32::try_from(n).map_err(|_| Error::invalid("matrix dimension exceeds u32"));
    bytes.extend_from_slice(&to_u32(rows.len())?.to_le_bytes());
    bytes.extend_from_slice(&to_u32(cols)?.to_le_bytes());
    for row in rows {
        let row = row.as_ref();
        if row.len() != cols {
            return Err(Error::invalid(format!("row of {} values in a {cols}-column matrix", row.len())));
        }
        for x in row {
            bytes.extend_from_slice(&x.to_le_bytes());
        }
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<Matrix> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(Error::format(path, "missing SPEM header"));
    }
    let word = |at: usize| u32::from_le_bytes([bytes[at], bytes[at + 1], bytes[at + 2], bytes[at + 3]]) as usize;
    let (rows, cols) = (word(4), word(8));
    let expected = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(4))
        .and_then(|n| n.checked_add(12))
        .ok_or_else(|| Error::format(path, "matrix dimensions overflow"))?;
    if bytes.len() != expected {
        return Err(Error::format(
            path,
            format!("{rows}×{cols} matrix needs {expected} bytes, file has {}", bytes.len()),
        ));
    }
    let data = bytes[12..]
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]))
        .collect();
    Ok(Matrix { cols, data })
}
