//! `DODM` device profile files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic        4 bytes "DODM"
//! version      u16
//! id_len       u32, then id_len bytes of UTF-8 device id
//! n_rows       u64
//! words_per_row u64
//! device_seed  u64
//! spread       f64
//! n_cells      u64
//! cells        n_cells × (u64 word | u8 bit | u8 discharge | f64 retention)
//! ```

use std::io::{Read, Write};

use super::{DimmProfile, SimError, WeakCell};
use crate::geometry::Geometry;

pub const DIMM_MAGIC: [u8; 4] = *b"DODM";
pub const DIMM_VERSION: u16 = 1;

pub fn write_dimm<W: Write>(dimm: &DimmProfile, mut sink: W) -> Result<u64, SimError> {
    let mut buf = Vec::with_capacity(64 + dimm.weak_cells.len() * 18);
    buf.extend_from_slice(&DIMM_MAGIC);
    buf.extend_from_slice(&DIMM_VERSION.to_le_bytes());
    buf.extend_from_slice(&(dimm.device_id.len() as u32).to_le_bytes());
    buf.extend_from_slice(dimm.device_id.as_bytes());
    buf.extend_from_slice(&dimm.geometry.n_rows.to_le_bytes());
    buf.extend_from_slice(&dimm.geometry.words_per_row.to_le_bytes());
    buf.extend_from_slice(&dimm.device_seed.to_le_bytes());
    buf.extend_from_slice(&dimm.spread.to_le_bytes());
    buf.extend_from_slice(&(dimm.weak_cells.len() as u64).to_le_bytes());
    for c in &dimm.weak_cells {
        buf.extend_from_slice(&c.word.to_le_bytes());
        buf.push(c.bit);
        buf.push(c.discharge);
        buf.extend_from_slice(&c.retention.to_le_bytes());
    }
    sink.write_all(&buf)?;
    sink.flush()?;
    Ok(buf.len() as u64)
}

fn take<R: Read, const N: usize>(src: &mut R, what: &'static str) -> Result<[u8; N], SimError> {
    let mut b = [0u8; N];
    src.read_exact(&mut b).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => SimError::Truncated(what),
        _ => SimError::Io(e),
    })?;
    Ok(b)
}

pub fn read_dimm<R: Read>(mut src: R) -> Result<DimmProfile, SimError> {
    let magic: [u8; 4] = take(&mut src, "magic")?;
    if magic != DIMM_MAGIC {
        return Err(SimError::BadMagic(magic));
    }
    let version = u16::from_le_bytes(take(&mut src, "version")?);
    if version != DIMM_VERSION {
        return Err(SimError::UnsupportedVersion(version));
    }
    let id_len = u32::from_le_bytes(take(&mut src, "device id length")?) as usize;
    let mut id = vec![0u8; id_len];
    src.read_exact(&mut id).map_err(|_| SimError::Truncated("device id"))?;
    let device_id = String::from_utf8(id).map_err(|e| SimError::Corrupt(e.to_string()))?;
    let n_rows = u64::from_le_bytes(take(&mut src, "geometry")?);
    let words_per_row = u64::from_le_bytes(take(&mut src, "geometry")?);
    let device_seed = u64::from_le_bytes(take(&mut src, "device seed")?);
    let spread = f64::from_le_bytes(take(&mut src, "spread")?);
    let n_cells = u64::from_le_bytes(take(&mut src, "cell count")?);
    let geometry = Geometry::new(n_rows, words_per_row);

    let mut weak_cells = Vec::with_capacity(n_cells.min(1 << 24) as usize);
    for i in 0..n_cells {
        let rec: [u8; 18] = take(&mut src, "weak cell")?;
        let cell = WeakCell {
            word: u64::from_le_bytes(rec[0..8].try_into().unwrap()),
            bit: rec[8],
            discharge: rec[9],
            retention: f64::from_le_bytes(rec[10..18].try_into().unwrap()),
        };
        if cell.bit >= 64 || cell.discharge > 1 || !(cell.retention > 0.0) || cell.word >= geometry.capacity_words() {
            return Err(SimError::Corrupt(format!("weak cell {i} out of range")));
        }
        weak_cells.push(cell);
    }
    Ok(DimmProfile { device_id, geometry, weak_cells, device_seed, spread })
}
