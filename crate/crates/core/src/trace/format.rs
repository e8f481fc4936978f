//! `DOTR` trace files.
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! magic      4 bytes  "DOTR"
//! version    u16
//! n_meta     u32      number of metadata entries
//! entries    n_meta × (u32 length, UTF-8 "key=value")
//! n_records  u64
//! records    n_records × 24 bytes:
//!            u64 instr_index | u64 address | u8 kind (0 read, 1 write) | u32 value | 3 pad
//! ```

use std::io::{Read, Write};

use super::{AccessKind, MemoryAccess, MemoryTrace, ReuseProfile, TraceError, WorkloadSpec};

pub const TRACE_MAGIC: [u8; 4] = *b"DOTR";
pub const TRACE_VERSION: u16 = 1;
pub const RECORD_BYTES: usize = 24;
/// Header bytes excluding the metadata entries: magic, version, entry count, record count.
pub const HEADER_FIXED_BYTES: usize = 4 + 2 + 4 + 8;

fn metadata(spec: &WorkloadSpec) -> Vec<(&'static str, String)> {
    vec![
        ("name", spec.name.clone()),
        ("n_instructions", spec.n_instructions.to_string()),
        ("footprint_words", spec.footprint_words.to_string()),
        ("target_access_rate", spec.target_access_rate.to_string()),
        ("cpi", spec.cpi.to_string()),
        ("write_fraction", spec.write_fraction.to_string()),
        ("value_alphabet_size", spec.value_alphabet_size.to_string()),
        ("reuse_profile", spec.reuse_profile.to_string()),
        ("threads", spec.threads.to_string()),
        ("seed", spec.seed.to_string()),
    ]
}

/// Writes `trace` to `sink`, returning the number of bytes written.
pub fn write_trace<W: Write>(trace: &MemoryTrace, mut sink: W) -> Result<u64, TraceError> {
    let mut header = Vec::new();
    header.extend_from_slice(&TRACE_MAGIC);
    header.extend_from_slice(&TRACE_VERSION.to_le_bytes());
    let meta = metadata(&trace.spec);
    header.extend_from_slice(&(meta.len() as u32).to_le_bytes());
    for (k, v) in meta {
        let entry = format!("{k}={v}");
        header.extend_from_slice(&(entry.len() as u32).to_le_bytes());
        header.extend_from_slice(entry.as_bytes());
    }
    header.extend_from_slice(&(trace.accesses.len() as u64).to_le_bytes());
    sink.write_all(&header)?;

    let mut buf = Vec::with_capacity(RECORD_BYTES * 4096);
    for chunk in trace.accesses.chunks(4096) {
        buf.clear();
        for a in chunk {
            buf.extend_from_slice(&a.instr_index.to_le_bytes());
            buf.extend_from_slice(&a.address.to_le_bytes());
            let (kind, value) = match a.kind {
                AccessKind::Read => (0u8, 0u32),
                AccessKind::Write(v) => (1u8, v),
            };
            buf.push(kind);
            buf.extend_from_slice(&value.to_le_bytes());
            buf.extend_from_slice(&[0u8; 3]);
        }
        sink.write_all(&buf)?;
    }
    sink.flush()?;
    Ok((header.len() + RECORD_BYTES * trace.accesses.len()) as u64)
}

fn read_exact<R: Read>(src: &mut R, buf: &mut [u8], what: &'static str) -> Result<(), TraceError> {
    src.read_exact(buf).map_err(|e| match e.kind() {
        std::io::ErrorKind::UnexpectedEof => TraceError::Truncated(what),
        _ => TraceError::Io(e),
    })
}

fn read_u16<R: Read>(src: &mut R, what: &'static str) -> Result<u16, TraceError> {
    let mut b = [0u8; 2];
    read_exact(src, &mut b, what)?;
    Ok(u16::from_le_bytes(b))
}

fn read_u32<R: Read>(src: &mut R, what: &'static str) -> Result<u32, TraceError> {
    let mut b = [0u8; 4];
    read_exact(src, &mut b, what)?;
    Ok(u32::from_le_bytes(b))
}

fn read_u64<R: Read>(src: &mut R, what: &'static str) -> Result<u64, TraceError> {
    let mut b = [0u8; 8];
    read_exact(src, &mut b, what)?;
    Ok(u64::from_le_bytes(b))
}

fn field<T: std::str::FromStr>(meta: &[(String, String)], key: &str) -> Result<T, TraceError> {
    let raw = meta
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v)
        .ok_or_else(|| TraceError::Metadata(format!("missing key `{key}`")))?;
    raw.parse().map_err(|_| TraceError::Metadata(format!("bad value `{raw}` for `{key}`")))
}

pub fn read_trace<R: Read>(mut source: R) -> Result<MemoryTrace, TraceError> {
    let mut magic = [0u8; 4];
    read_exact(&mut source, &mut magic, "magic")?;
    if magic != TRACE_MAGIC {
        return Err(TraceError::BadMagic(magic));
    }
    let version = read_u16(&mut source, "version")?;
    if version != TRACE_VERSION {
        return Err(TraceError::UnsupportedVersion(version));
    }
    let n_meta = read_u32(&mut source, "metadata count")?;
    let mut meta = Vec::with_capacity(n_meta as usize);
    for _ in 0..n_meta {
        let len = read_u32(&mut source, "metadata length")? as usize;
        let mut bytes = vec![0u8; len];
        read_exact(&mut source, &mut bytes, "metadata entry")?;
        let entry = String::from_utf8(bytes).map_err(|e| TraceError::Metadata(e.to_string()))?;
        let (k, v) = entry.split_once('=').ok_or_else(|| TraceError::Metadata(format!("entry `{entry}` lacks '='")))?;
        meta.push((k.to_string(), v.to_string()));
    }
    let reuse_profile: String = field(&meta, "reuse_profile")?;
    let spec = WorkloadSpec {
        name: field(&meta, "name")?,
        n_instructions: field(&meta, "n_instructions")?,
        footprint_words: field(&meta, "footprint_words")?,
        target_access_rate: field(&meta, "target_access_rate")?,
        cpi: field(&meta, "cpi")?,
        write_fraction: field(&meta, "write_fraction")?,
        value_alphabet_size: field(&meta, "value_alphabet_size")?,
        reuse_profile: reuse_profile.parse::<ReuseProfile>().map_err(TraceError::Metadata)?,
        threads: field(&meta, "threads")?,
        seed: field(&meta, "seed")?,
    };

    let n_records = read_u64(&mut source, "record count")?;
    let mut accesses = Vec::with_capacity(n_records.min(1 << 26) as usize);
    let mut rec = [0u8; RECORD_BYTES];
    for index in 0..n_records {
        read_exact(&mut source, &mut rec, "access record")?;
        let instr_index = u64::from_le_bytes(rec[0..8].try_into().unwrap());
        let address = u64::from_le_bytes(rec[8..16].try_into().unwrap());
        let value = u32::from_le_bytes(rec[17..21].try_into().unwrap());
        let kind = match rec[16] {
            0 if value == 0 => AccessKind::Read,
            0 => {
                return Err(TraceError::Record { index, reason: "read record carries a value".into() });
            }
            1 => AccessKind::Write(value),
            k => return Err(TraceError::Record { index, reason: format!("unknown kind tag {k}") }),
        };
        accesses.push(MemoryAccess { instr_index, address, kind });
    }
    Ok(MemoryTrace::new(spec, accesses))
}
