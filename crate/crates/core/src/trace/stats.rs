use std::collections::{HashMap, HashSet};

use super::{AccessKind, MemoryTrace};
use crate::geometry::Geometry;

#[derive(Debug, Clone, PartialEq, Default)]
pub struct TraceStats {
    pub reads: u64,
    pub writes: u64,
    pub distinct_words: u64,
    /// Last value written to each byte address; read-only addresses are absent.
    pub final_values: HashMap<u64, u32>,
    /// Access count per DRAM row, present when a geometry was supplied.
    pub row_counts: Option<Vec<u64>>,
}

impl TraceStats {
    pub fn total(&self) -> u64 {
        self.reads + self.writes
    }
}

pub fn trace_stats(trace: &MemoryTrace, geometry: Option<&Geometry>) -> TraceStats {
    let mut stats = TraceStats::default();
    let mut seen = HashSet::new();
    let mut rows = geometry.map(|g| vec![0u64; g.n_rows as usize]);
    for a in &trace.accesses {
        match a.kind {
            AccessKind::Read => stats.reads += 1,
            AccessKind::Write(v) => {
                stats.writes += 1;
                stats.final_values.insert(a.address, v);
            }
        }
        seen.insert(a.word());
        if let (Some(g), Some(rows)) = (geometry, rows.as_mut()) {
            let r = g.row_of(a.word()) as usize;
            if r >= rows.len() {
                rows.resize(r + 1, 0);
            }
            rows[r] += 1;
        }
    }
    stats.distinct_words = seen.len() as u64;
    stats.row_counts = rows;
    stats
}
