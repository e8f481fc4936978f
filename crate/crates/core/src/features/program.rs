use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{FeatureError, NEVER_REUSED_SECONDS};
use crate::trace::MemoryTrace;

/// Mean time between successive accesses to the same word.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ReuseTime {
    Seconds(f64),
    NeverReused,
}

impl ReuseTime {
    /// Finite value used as a model input; never-reused maps to a cap far
    /// beyond the longest refresh period.
    pub fn model_value(&self) -> f64 {
        match self {
            ReuseTime::Seconds(s) => *s,
            ReuseTime::NeverReused => NEVER_REUSED_SECONDS,
        }
    }
}

impl fmt::Display for ReuseTime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReuseTime::Seconds(s) => write!(f, "{s}"),
            ReuseTime::NeverReused => write!(f, "never"),
        }
    }
}

impl FromStr for ReuseTime {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "never" => Ok(ReuseTime::NeverReused),
            v => v
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite() && *x > 0.0)
                .map(ReuseTime::Seconds)
                .ok_or_else(|| format!("bad reuse time `{v}`")),
        }
    }
}

/// Per-word "last seen" table. Dense when the address range is small.
pub(crate) enum LastSeen {
    Dense(Vec<u64>),
    Sparse(HashMap<u64, u64>),
}

const DENSE_LIMIT: u64 = 1 << 26;

impl LastSeen {
    pub(crate) fn for_trace(trace: &MemoryTrace) -> Self {
        let max_word = trace.accesses.iter().map(|a| a.word()).max().unwrap_or(0);
        if max_word < DENSE_LIMIT {
            LastSeen::Dense(vec![u64::MAX; max_word as usize + 1])
        } else {
            LastSeen::Sparse(HashMap::new())
        }
    }

    /// Records `instr` for `word`, returning the previous instruction index.
    #[inline]
    pub(crate) fn swap(&mut self, word: u64, instr: u64) -> Option<u64> {
        match self {
            LastSeen::Dense(v) => {
                let prev = std::mem::replace(&mut v[word as usize], instr);
                (prev != u64::MAX).then_some(prev)
            }
            LastSeen::Sparse(m) => m.insert(word, instr),
        }
    }
}

/// Mean over re-referencing accesses of `cpi * instruction distance / f_clk`.
/// First touches are excluded from the mean.
pub fn reuse_time(trace: &MemoryTrace, f_clk: f64) -> Result<ReuseTime, FeatureError> {
    if trace.is_empty() {
        return Err(FeatureError::EmptyTrace);
    }
    let mut last = LastSeen::for_trace(trace);
    let mut sum: u128 = 0;
    let mut n: u64 = 0;
    for a in &trace.accesses {
        if let Some(prev) = last.swap(a.word(), a.instr_index) {
            sum += (a.instr_index - prev) as u128;
            n += 1;
        }
    }
    if n == 0 {
        return Ok(ReuseTime::NeverReused);
    }
    let mean_distance = sum as f64 / n as f64;
    Ok(ReuseTime::Seconds(trace.spec.cpi * mean_distance / f_clk))
}

/// Shannon entropy, in bits, of the values written by the trace.
pub fn data_entropy(trace: &MemoryTrace) -> Result<f64, FeatureError> {
    let mut counts: HashMap<u32, u64> = HashMap::new();
    for v in trace.accesses.iter().filter_map(|a| a.kind.value()) {
        *counts.entry(v).or_insert(0) += 1;
    }
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(FeatureError::NoWrites);
    }
    // fixed summation order keeps the result bit-identical across runs
    let mut sorted: Vec<u64> = counts.into_values().collect();
    sorted.sort_unstable();
    Ok(entropy_of_counts(sorted.into_iter(), total))
}

pub(crate) fn entropy_of_counts(counts: impl Iterator<Item = u64>, total: u64) -> f64 {
    let total = total as f64;
    let h: f64 = counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / total;
            -p * p.log2()
        })
        .sum();
    // -0.0 for single-symbol inputs
    h.max(0.0)
}

/// Memory accesses per cycle.
pub fn access_rate(trace: &MemoryTrace) -> Result<f64, FeatureError> {
    let cycles = trace.total_cycles();
    if cycles <= 0.0 {
        return Err(FeatureError::ZeroCycles);
    }
    Ok(trace.len() as f64 / cycles)
}

/// Fraction of cycles stalled on memory under a fixed per-access stall cost.
pub fn wait_cycles_ratio(trace: &MemoryTrace, stall_cycles: f64) -> Result<f64, FeatureError> {
    if trace.is_empty() {
        return Ok(0.0);
    }
    let cycles = trace.total_cycles();
    if cycles <= 0.0 {
        return Err(FeatureError::ZeroCycles);
    }
    Ok((trace.len() as f64 * stall_cycles / cycles).min(1.0))
}
