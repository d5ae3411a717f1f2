//! Point-set files.
//!
//! Binary layout: the 4 bytes `FWPS`, little-endian `u32` n, `u32` d, then
//! `n * d` little-endian `f64` values in row-major order.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::geometry::PointSet;

const MAGIC: &[u8; 4] = b"FWPS";

pub fn encode(set: &PointSet) -> Vec<u8> {
    let mut out = Vec::with_capacity(12 + 8 * set.as_flat().len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(set.len() as u32).to_le_bytes());
    out.extend_from_slice(&(set.dim() as u32).to_le_bytes());
    for x in set.as_flat() {
        out.extend_from_slice(&x.to_le_bytes());
    }
    out
}

pub fn decode(bytes: &[u8], path: &Path) -> Result<PointSet> {
    if bytes.len() < 12 || &bytes[..4] != MAGIC {
        return Err(Error::format(path, "missing FWPS header"));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().unwrap()) as usize;
    let d = u32::from_le_bytes(bytes[8..12].try_into().unwrap()) as usize;
    let body = &bytes[12..];
    if body.len() != n * d * 8 {
        return Err(Error::format(
            path,
            format!("header says {n}x{d} but body holds {} bytes", body.len()),
        ));
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    PointSet::from_flat(d, data).map_err(|e| Error::format(path, e.to_string()))
}

pub fn write_fwps(path: &Path, set: &PointSet) -> Result<()> {
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(&encode(set)).map_err(|e| Error::io(path, e))
}

pub fn read_fwps(path: &Path) -> Result<PointSet> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode(&bytes, path)
}

/// One point per line, comma separated, no header.
pub fn read_csv(path: &Path) -> Result<PointSet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| Error::format(path, e.to_string()))?;
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| Error::format(path, e.to_string()))?;
        let row = rec
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<std::result::Result<Vec<f64>, _>>()
            .map_err(|e| Error::format(path, format!("line {}: {e}", line + 1)))?;
        rows.push(row);
    }
    PointSet::from_rows(&rows).map_err(|e| Error::format(path, e.to_string()))
}

/// Reads `.csv` files as text and anything else as binary.
pub fn read_any(path: &Path) -> Result<PointSet> {
    match path.extension().and_then(|e| e.to_str()) {
        Some("csv") => read_csv(path),
        _ => read_fwps(path),
    }
}
