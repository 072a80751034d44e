//! AMPH accumulator files.
//!
//! Layout, little-endian: the bytes `AMPH`, a `u16` version, four axis
//! descriptors `(f64 min, f64 max, u32 count)` in `(x0, y0, s, theta)` order,
//! then one `(f64 re, f64 im)` pair per cell in row-major order. Version 1
//! marks a geometric scale axis and version 2 a linear one.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::group::{AmplitudeAccumulator, ParamLattice, ScaleSpacing};

pub const AMPH_MAGIC: &[u8; 4] = b"AMPH";

const HEADER_LEN: usize = 4 + 2 + 4 * (8 + 8 + 4);

fn version(spacing: ScaleSpacing) -> u16 {
    match spacing {
        ScaleSpacing::Geometric => 1,
        ScaleSpacing::Linear => 2,
    }
}

pub fn write_amph(acc: &AmplitudeAccumulator) -> Vec<u8> {
    let lattice = acc.lattice();
    let mut out = Vec::with_capacity(HEADER_LEN + 16 * acc.cells().len());
    out.extend_from_slice(AMPH_MAGIC);
    out.extend_from_slice(&version(lattice.scale_spacing()).to_le_bytes());
    for a in lattice.axes() {
        out.extend_from_slice(&a.min.to_le_bytes());
        out.extend_from_slice(&a.max.to_le_bytes());
        out.extend_from_slice(&(a.count as u32).to_le_bytes());
    }
    for c in acc.cells() {
        out.extend_from_slice(&c.re.to_le_bytes());
        out.extend_from_slice(&c.im.to_le_bytes());
    }
    out
}

fn f64_at(data: &[u8], at: usize) -> f64 {
    f64::from_le_bytes(data[at..at + 8].try_into().expect("8 bytes"))
}

pub fn read_amph(data: &[u8]) -> Result<AmplitudeAccumulator> {
    if data.len() < HEADER_LEN {
        return Err(Error::Format(format!(
            "{} bytes is shorter than the AMPH header",
            data.len()
        )));
    }
    if &data[..4] != AMPH_MAGIC {
        return Err(Error::Format("missing AMPH magic".into()));
    }
    let spacing = match u16::from_le_bytes([data[4], data[5]]) {
        1 => ScaleSpacing::Geometric,
        2 => ScaleSpacing::Linear,
        v => return Err(Error::Format(format!("unsupported AMPH version {v}"))),
    };
    let mut axes = [(0.0, 0.0, 0usize); 4];
    let mut at = 6;
    for axis in axes.iter_mut() {
        let count = u32::from_le_bytes(data[at + 16..at + 20].try_into().expect("4 bytes"));
        *axis = (f64_at(data, at), f64_at(data, at + 8), count as usize);
        at += 20;
    }
    let lattice = ParamLattice::new(axes[0], axes[1], axes[2], axes[3], spacing)?;
    let expected = lattice
        .len()
        .checked_mul(16)
        .and_then(|n| n.checked_add(HEADER_LEN))
        .ok_or_else(|| Error::Format("cell count overflows".into()))?;
    if data.len() != expected {
        return Err(Error::Format(format!("{} bytes, {expected} expected", data.len())));
    }
    let cells = data[HEADER_LEN..]
        .chunks_exact(16)
        .map(|c| Complex64::new(f64_at(c, 0), f64_at(c, 8)))
        .collect();
    AmplitudeAccumulator::new(lattice, cells)
}
