//! CSV (`r,z,value`) and CYLF binary field files.
//!
//! CYLF layout, little-endian: magic `CYLF`, version `u32`, then `Nr`, `Nz`,
//! `r0`, `r1`, `Lz` as `f64`, then `Nr * Nz` row-major `f64` values.

use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use super::{AnnulusGrid, GridError, ScalarField2D};

pub const CYLF_MAGIC: &[u8; 4] = b"CYLF";
pub const CYLF_VERSION: u32 = 1;

pub fn write_cylf<W: Write>(f: &ScalarField2D, mut w: W) -> Result<(), GridError> {
    let g = f.grid();
    let mut buf = Vec::with_capacity(48 + 8 * g.len());
    buf.extend_from_slice(CYLF_MAGIC);
    buf.extend_from_slice(&CYLF_VERSION.to_le_bytes());
    for x in [g.nr as f64, g.nz as f64, g.r0, g.r1, g.lz] {
        buf.extend_from_slice(&x.to_le_bytes());
    }
    for v in f.values() {
        buf.extend_from_slice(&v.to_le_bytes());
    }
    w.write_all(&buf)?;
    Ok(())
}

pub fn read_cylf<R: Read>(mut r: R) -> Result<ScalarField2D, GridError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 48 || &bytes[..4] != CYLF_MAGIC {
        return Err(GridError::Format("missing CYLF header".into()));
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != CYLF_VERSION {
        return Err(GridError::Format(format!(
            "unsupported CYLF version {version}"
        )));
    }
    let f64_at = |k: usize| f64::from_le_bytes(bytes[8 + 8 * k..16 + 8 * k].try_into().unwrap());
    let (nr, nz) = (f64_at(0), f64_at(1));
    if nr.fract() != 0.0 || nz.fract() != 0.0 || nr < 0.0 || nz < 0.0 {
        return Err(GridError::Format(format!("non-integer shape {nr} x {nz}")));
    }
    let grid = AnnulusGrid::new(f64_at(2), f64_at(3), f64_at(4), nr as usize, nz as usize)?;
    let body = &bytes[48..];
    if body.len() != 8 * grid.len() {
        return Err(GridError::Format(format!(
            "expected {} value bytes, found {}",
            8 * grid.len(),
            body.len()
        )));
    }
    let values = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    ScalarField2D::from_values(grid, values)
}

/// Writes `r,z,value` rows using shortest round-trip formatting.
pub fn write_csv<W: Write>(f: &ScalarField2D, w: W) -> Result<(), GridError> {
    let g = f.grid();
    let mut w = BufWriter::new(w);
    writeln!(w, "r,z,value")?;
    for i in 0..g.nr {
        for j in 0..g.nz {
            writeln!(w, "{},{},{}", g.r(i), g.z(j), f[(i, j)])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// Reads a CSV written by [`write_csv`] onto a known grid.
pub fn read_csv<R: Read>(grid: AnnulusGrid, r: R) -> Result<ScalarField2D, GridError> {
    let mut lines = BufReader::new(r).lines();
    match lines.next() {
        Some(Ok(h)) if h.trim() == "r,z,value" => {}
        _ => return Err(GridError::Format("missing `r,z,value` header".into())),
    }
    let mut values = Vec::with_capacity(grid.len());
    for (n, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let v = line
            .rsplit(',')
            .next()
            .and_then(|s| s.trim().parse::<f64>().ok())
            .ok_or_else(|| GridError::Format(format!("bad value on data line {}", n + 1)))?;
        values.push(v);
    }
    ScalarField2D::from_values(grid, values)
}

impl ScalarField2D {
    pub fn save_cylf(&self, path: &Path) -> Result<(), GridError> {
        write_cylf(self, BufWriter::new(fs::File::create(path)?))
    }

    pub fn load_cylf(path: &Path) -> Result<Self, GridError> {
        read_cylf(BufReader::new(fs::File::open(path)?))
    }

    pub fn save_csv(&self, path: &Path) -> Result<(), GridError> {
        write_csv(self, fs::File::create(path)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cylf_round_trip() {
        let g = AnnulusGrid::new(0.5, 1.5, 2.0, 4, 6).unwrap();
        let f = ScalarField2D::from_fn(g, |r, z| r.sin() * z.exp() + 1e-300);
        let mut buf = Vec::new();
        write_cylf(&f, &mut buf).unwrap();
        assert_eq!(buf.len(), 48 + 8 * 24);
        assert_eq!(&buf[..4], b"CYLF");
        let back = read_cylf(&buf[..]).unwrap();
        assert_eq!(back, f);
        assert!(read_cylf(&buf[..buf.len() - 1]).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let g = AnnulusGrid::new(0.5, 1.5, 2.0, 4, 5).unwrap();
        let f = ScalarField2D::from_fn(g, |r, z| r / 3.0 - z * 7.1);
        let mut buf = Vec::new();
        write_csv(&f, &mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("r,z,value\n"));
        assert_eq!(read_csv(g, &buf[..]).unwrap(), f);
    }
}
