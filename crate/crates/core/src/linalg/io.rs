//! Matrix and vector files.
//!
//! Text matrices are one row per line with whitespace-separated entries;
//! blank lines and lines starting with `#` are skipped. Binary matrices start
//! with the magic bytes `NSTM`, then `u32` rows and `u32` cols, then the
//! entries as little-endian `f64` in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use super::DenseMatrix;
use crate::error::{NstError, Result};

const MAGIC: &[u8; 4] = b"NSTM";

/// Reads a matrix, detecting the binary format by its magic bytes.
pub fn read_matrix(path: impl AsRef<Path>) -> Result<DenseMatrix> {
    let bytes = fs::read(path)?;
    if bytes.starts_with(MAGIC) {
        decode_binary(&bytes)
    } else {
        let text = String::from_utf8(bytes).map_err(|e| NstError::Parse(e.to_string()))?;
        parse_text(&text)
    }
}

fn decode_binary(bytes: &[u8]) -> Result<DenseMatrix> {
    if bytes.len() < 12 {
        return Err(NstError::Parse("truncated matrix header".into()));
    }
    let rows = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let cols = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let body = &bytes[12..];
    if body.len() != rows * cols * 8 {
        return Err(NstError::Parse(format!(
            "expected {} payload bytes for {rows}x{cols}, found {}",
            rows * cols * 8,
            body.len()
        )));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    DenseMatrix::new(rows, cols, data)
}

fn parse_text(text: &str) -> Result<DenseMatrix> {
    let mut rows = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<f64>()
                    .map_err(|e| NstError::Parse(format!("line {}: {tok:?}: {e}", lineno + 1)))
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(NstError::Parse("empty matrix file".into()));
    }
    DenseMatrix::from_rows(&rows)
}

pub fn write_matrix_text(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let mut out = String::new();
    for i in 0..m.rows() {
        let line: Vec<String> = m.row(i).iter().map(|v| format!("{v:.17e}")).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    fs::write(path, out)?;
    Ok(())
}

pub fn write_matrix_binary(path: impl AsRef<Path>, m: &DenseMatrix) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(MAGIC)?;
    f.write_all(&(m.rows() as u32).to_le_bytes())?;
    f.write_all(&(m.cols() as u32).to_le_bytes())?;
    for v in m.as_slice() {
        f.write_all(&v.to_le_bytes())?;
    }
    Ok(())
}

/// Reads whitespace-separated reals (any line layout) as one vector.
pub fn read_vector(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let text = fs::read_to_string(path)?;
    text.lines()
        .filter(|l| !l.trim_start().starts_with('#'))
        .flat_map(str::split_whitespace)
        .map(|tok| tok.parse::<f64>().map_err(|e| NstError::Parse(format!("{tok:?}: {e}"))))
        .collect()
}

pub fn write_vector(path: impl AsRef<Path>, v: &[f64]) -> Result<()> {
    let mut out = String::new();
    for x in v {
        out.push_str(&format!("{x:.17e}\n"));
    }
    fs::write(path, out)?;
    Ok(())
}
