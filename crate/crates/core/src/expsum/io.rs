//! Flat binary caching format: `N` and `M` as u64 little-endian, then interleaved
//! re/im f64 little-endian values. Coefficient vectors are written with `M = 0` and
//! N values; grids carry M values.

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

use num_complex::Complex64;

use super::{CoefficientVector, ExpSumGrid};
use crate::error::{Error, Result};

fn write_raw(path: &Path, n: u64, m: u64, values: &[Complex64]) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(&n.to_le_bytes())?;
    w.write_all(&m.to_le_bytes())?;
    for v in values {
        w.write_all(&v.re.to_le_bytes())?;
        w.write_all(&v.im.to_le_bytes())?;
    }
    w.flush()?;
    Ok(())
}

fn read_raw(path: &Path) -> Result<(u64, u64, Vec<Complex64>)> {
    let mut r = BufReader::new(File::open(path)?);
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    if bytes.len() < 16 || (bytes.len() - 16) % 16 != 0 {
        return Err(Error::Parse {
            offset: bytes.len(),
            message: "truncated header or value block".into(),
        });
    }
    let word = |i: usize| <[u8; 8]>::try_from(&bytes[i..i + 8]).expect("slice of 8 bytes");
    let n = u64::from_le_bytes(word(0));
    let m = u64::from_le_bytes(word(8));
    let values: Vec<Complex64> = bytes[16..]
        .chunks_exact(16)
        .enumerate()
        .map(|(i, _)| {
            let o = 16 + 16 * i;
            Complex64::new(f64::from_le_bytes(word(o)), f64::from_le_bytes(word(o + 8)))
        })
        .collect();
    let expected = if m == 0 { n } else { m };
    if values.len() as u64 != expected {
        return Err(Error::Parse {
            offset: 16,
            message: format!("header announces {expected} values, file holds {}", values.len()),
        });
    }
    Ok((n, m, values))
}

pub fn write_coefficients(path: &Path, a: &CoefficientVector) -> Result<()> {
    write_raw(path, a.len() as u64, 0, a.values())
}

pub fn read_coefficients(path: &Path) -> Result<CoefficientVector> {
    let (_, m, values) = read_raw(path)?;
    if m != 0 {
        return Err(Error::Parse {
            offset: 8,
            message: "file holds a grid, not a coefficient vector".into(),
        });
    }
    CoefficientVector::weighted(values)
}

pub fn write_grid(path: &Path, g: &ExpSumGrid) -> Result<()> {
    write_raw(path, g.n() as u64, g.m() as u64, g.values())
}

pub fn read_grid(path: &Path) -> Result<ExpSumGrid> {
    let (n, m, values) = read_raw(path)?;
    if m == 0 {
        return Err(Error::Parse {
            offset: 8,
            message: "file holds a coefficient vector, not a grid".into(),
        });
    }
    ExpSumGrid::from_values(n as usize, values)
}
