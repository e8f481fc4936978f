//! Memory-access traces: the data model, a synthetic workload generator and
//! the binary `DOTR` trace file format.

mod format;
mod generate;
mod spec_file;
mod stats;

pub use format::{read_trace, write_trace, HEADER_FIXED_BYTES, RECORD_BYTES, TRACE_MAGIC, TRACE_VERSION};
pub use generate::generate_trace;
pub use stats::{trace_stats, TraceStats};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

/// Bytes per addressable memory word (ECC granularity).
pub const WORD_BYTES: u64 = 8;

#[derive(Debug, Error)]
pub enum TraceError {
    #[error("footprint of {footprint} words exceeds device capacity of {capacity} words")]
    FootprintTooLarge { footprint: u64, capacity: u64 },
    #[error("target access rate {0} outside (0, 1]")]
    BadAccessRate(f64),
    #[error("invalid workload spec field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },
    #[error("bad magic number {0:?}, expected \"DOTR\"")]
    BadMagic([u8; 4]),
    #[error("unsupported trace format version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated trace file: {0}")]
    Truncated(&'static str),
    #[error("malformed trace metadata: {0}")]
    Metadata(String),
    #[error("malformed access record {index}: {reason}")]
    Record { index: u64, reason: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// What a single access did. Writes carry the 32-bit value stored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AccessKind {
    Read,
    Write(u32),
}

impl AccessKind {
    pub fn is_write(&self) -> bool {
        matches!(self, AccessKind::Write(_))
    }

    pub fn value(&self) -> Option<u32> {
        match self {
            AccessKind::Read => None,
            AccessKind::Write(v) => Some(*v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MemoryAccess {
    pub instr_index: u64,
    /// Byte address, always a multiple of [`WORD_BYTES`].
    pub address: u64,
    pub kind: AccessKind,
}

impl MemoryAccess {
    pub fn read(instr_index: u64, address: u64) -> Self {
        MemoryAccess { instr_index, address, kind: AccessKind::Read }
    }

    pub fn write(instr_index: u64, address: u64, value: u32) -> Self {
        MemoryAccess { instr_index, address, kind: AccessKind::Write(value) }
    }

    /// Index of the 64-bit word this access touches.
    pub fn word(&self) -> u64 {
        self.address / WORD_BYTES
    }
}

/// Popularity profile for the generator's address stream.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReuseProfile {
    Uniform,
    /// Zipf-distributed word popularity with exponent `s`.
    Zipfian(f64),
    /// Sequential sweeps over the footprint.
    Streaming,
}

impl fmt::Display for ReuseProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReuseProfile::Uniform => write!(f, "uniform"),
            ReuseProfile::Zipfian(s) => write!(f, "zipfian:{s}"),
            ReuseProfile::Streaming => write!(f, "streaming"),
        }
    }
}

impl FromStr for ReuseProfile {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "uniform" => Ok(ReuseProfile::Uniform),
            "streaming" => Ok(ReuseProfile::Streaming),
            other => {
                let exp = other
                    .strip_prefix("zipfian:")
                    .or_else(|| other.strip_prefix("zipfian(").and_then(|r| r.strip_suffix(')')))
                    .ok_or_else(|| format!("unknown reuse profile `{other}`"))?;
                let s: f64 = exp.parse().map_err(|_| format!("bad zipf exponent `{exp}`"))?;
                if !(s.is_finite() && s > 0.0) {
                    return Err(format!("zipf exponent must be positive, got {s}"));
                }
                Ok(ReuseProfile::Zipfian(s))
            }
        }
    }
}

/// Parameters of a synthetic workload.
#[derive(Debug, Clone, PartialEq)]
pub struct WorkloadSpec {
    pub name: String,
    pub n_instructions: u64,
    /// Distinct 64-bit words the workload touches.
    pub footprint_words: u64,
    /// Memory accesses per cycle.
    pub target_access_rate: f64,
    pub cpi: f64,
    pub write_fraction: f64,
    pub value_alphabet_size: u32,
    pub reuse_profile: ReuseProfile,
    pub threads: u32,
    pub seed: u64,
}

impl WorkloadSpec {
    pub fn total_cycles(&self) -> f64 {
        self.n_instructions as f64 * self.cpi
    }

    pub fn validate(&self, capacity_words: u64) -> Result<(), TraceError> {
        if !(self.target_access_rate > 0.0 && self.target_access_rate <= 1.0) {
            return Err(TraceError::BadAccessRate(self.target_access_rate));
        }
        if self.footprint_words > capacity_words {
            return Err(TraceError::FootprintTooLarge { footprint: self.footprint_words, capacity: capacity_words });
        }
        let invalid = |field, reason: &str| TraceError::InvalidSpec { field, reason: reason.to_string() };
        if self.footprint_words == 0 {
            return Err(invalid("footprint_words", "must be at least 1"));
        }
        if !(self.cpi.is_finite() && self.cpi > 0.0) {
            return Err(invalid("cpi", "must be positive"));
        }
        if !(0.0..=1.0).contains(&self.write_fraction) {
            return Err(invalid("write_fraction", "must lie in [0, 1]"));
        }
        if self.value_alphabet_size == 0 {
            return Err(invalid("value_alphabet_size", "must be at least 1"));
        }
        if self.threads == 0 {
            return Err(invalid("threads", "must be at least 1"));
        }
        if self.target_access_rate * self.cpi > 1.0 {
            return Err(invalid(
                "target_access_rate",
                "more than one access per instruction cannot keep instruction indices strictly increasing",
            ));
        }
        Ok(())
    }
}

/// An ordered record of memory accesses plus the workload that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct MemoryTrace {
    pub spec: WorkloadSpec,
    pub accesses: Vec<MemoryAccess>,
}

impl MemoryTrace {
    pub fn new(spec: WorkloadSpec, accesses: Vec<MemoryAccess>) -> Self {
        MemoryTrace { spec, accesses }
    }

    pub fn total_cycles(&self) -> f64 {
        self.spec.total_cycles()
    }

    pub fn len(&self) -> usize {
        self.accesses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.accesses.is_empty()
    }

    /// Checks word alignment and strict ordering of instruction indices.
    pub fn check_invariants(&self) -> Result<(), TraceError> {
        let mut prev: Option<u64> = None;
        for (i, a) in self.accesses.iter().enumerate() {
            if a.address % WORD_BYTES != 0 {
                return Err(TraceError::Record {
                    index: i as u64,
                    reason: format!("address {:#x} is not word aligned", a.address),
                });
            }
            if let Some(p) = prev {
                if a.instr_index <= p {
                    return Err(TraceError::Record {
                        index: i as u64,
                        reason: format!("instruction index {} not after {}", a.instr_index, p),
                    });
                }
            }
            prev = Some(a.instr_index);
        }
        Ok(())
    }
}
