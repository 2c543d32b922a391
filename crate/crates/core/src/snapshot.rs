//! `OSN1` snapshot files.
//!
//! Layout, all little-endian:
//!
//! ```text
//! b"OSN1" | n: u32 | L: f64 | t: f64 (NaN = untagged) | alpha: f64 (NaN = n/a) | n² × f64 row-major
//! ```

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::fields::{GridSpec, ScalarField};

pub const MAGIC: &[u8; 4] = b"OSN1";
const HEADER_LEN: usize = 4 + 4 + 8 + 8 + 8;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub field: ScalarField,
    pub alpha: Option<f64>,
}

fn opt(v: Option<f64>) -> f64 {
    v.unwrap_or(f64::NAN)
}

fn unopt(v: f64) -> Option<f64> {
    if v.is_nan() {
        None
    } else {
        Some(v)
    }
}

pub fn encode(field: &ScalarField, alpha: Option<f64>) -> Vec<u8> {
    let g = field.grid();
    let mut out = Vec::with_capacity(HEADER_LEN + 8 * g.len());
    out.extend_from_slice(MAGIC);
    out.extend_from_slice(&(g.n() as u32).to_le_bytes());
    out.extend_from_slice(&g.half_width().to_le_bytes());
    out.extend_from_slice(&opt(field.time_tag()).to_le_bytes());
    out.extend_from_slice(&opt(alpha).to_le_bytes());
    for v in field.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

fn f64_at(bytes: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(bytes[at..at + 8].try_into().expect("8-byte slice"))
}

pub fn decode(bytes: &[u8]) -> Result<Snapshot> {
    if bytes.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "file too short for header ({} bytes)",
            bytes.len()
        )));
    }
    if &bytes[..4] != MAGIC {
        return Err(Error::Format("bad magic, expected OSN1".into()));
    }
    let n = u32::from_le_bytes(bytes[4..8].try_into().expect("4-byte slice")) as usize;
    let half_width = f64_at(bytes, 8);
    let t = unopt(f64_at(bytes, 16));
    let alpha = unopt(f64_at(bytes, 24));
    let expected = HEADER_LEN + 8 * n * n;
    if bytes.len() != expected {
        return Err(Error::Format(format!(
            "expected {expected} bytes for n = {n}, found {}",
            bytes.len()
        )));
    }
    let grid = GridSpec::new(half_width, n)?;
    let values = bytes[HEADER_LEN..]
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8-byte chunk")))
        .collect();
    let field = ScalarField::new(grid, values, t)?;
    Ok(Snapshot { field, alpha })
}

pub fn write_snapshot(path: impl AsRef<Path>, field: &ScalarField, alpha: Option<f64>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(&encode(field, alpha))?;
    Ok(())
}

pub fn read_snapshot(path: impl AsRef<Path>) -> Result<Snapshot> {
    decode(&fs::read(path)?)
}
