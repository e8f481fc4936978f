//! Retention-error simulator: weak-cell device profiles, the per-run flip
//! rule with implicit refresh and row interference, SECDED classification,
//! and the WER / P_UE labels.

mod config;
mod dimm;
mod format;
mod simulate;

pub use config::{ReuseMode, SimConfig};
pub use dimm::{build_dimm, retention_at, DimmProfile, WeakCell};
pub use format::{read_dimm, write_dimm, DIMM_MAGIC, DIMM_VERSION};
pub use simulate::{
    estimate_pue, estimate_pue_system, measure_wer, pue_from_outcomes, run_seeds, simulate_run, simulate_usage,
    splitmix64, RunOutcome, TraceUsage,
};

use std::fmt;

use thiserror::Error;

pub const MIN_T_REFP: f64 = 0.064;
pub const MAX_T_REFP: f64 = 2.283;
pub const MIN_V_DD: f64 = 1.428;
pub const MAX_V_DD: f64 = 1.5;
pub const MIN_TEMP: f64 = 50.0;
pub const MAX_TEMP: f64 = 70.0;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("environment field `{field}` = {value} outside [{min}, {max}]")]
    Env { field: &'static str, value: f64, min: f64, max: f64 },
    #[error("invalid simulator config `{key}`: {reason}")]
    Config { key: String, reason: String },
    #[error("trace footprint of {footprint} words exceeds device capacity of {capacity} words")]
    FootprintOverflow { footprint: u64, capacity: u64 },
    #[error("memory size is zero words")]
    ZeroMemory,
    #[error("at least one experiment is required")]
    ZeroExperiments,
    #[error("bad magic number {0:?}, expected \"DODM\"")]
    BadMagic([u8; 4]),
    #[error("unsupported device profile version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated device profile: {0}")]
    Truncated(&'static str),
    #[error("corrupt device profile: {0}")]
    Corrupt(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// Operating point: refresh period (s), supply voltage (V), DRAM temperature (°C).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvPoint {
    pub t_refp: f64,
    pub v_dd: f64,
    pub temp: f64,
}

impl EnvPoint {
    pub fn new(t_refp: f64, v_dd: f64, temp: f64) -> Self {
        EnvPoint { t_refp, v_dd, temp }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let check = |field, value: f64, min, max| {
            if value.is_finite() && (min..=max).contains(&value) {
                Ok(())
            } else {
                Err(SimError::Env { field, value, min, max })
            }
        };
        check("t_refp", self.t_refp, MIN_T_REFP, MAX_T_REFP)?;
        check("v_dd", self.v_dd, MIN_V_DD, MAX_V_DD)?;
        check("temp", self.temp, MIN_TEMP, MAX_TEMP)
    }
}

impl Default for EnvPoint {
    /// Nominal refresh and voltage at the reference temperature.
    fn default() -> Self {
        EnvPoint { t_refp: MIN_T_REFP, v_dd: MAX_V_DD, temp: MIN_TEMP }
    }
}

impl fmt::Display for EnvPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} s / {} V / {} °C", self.t_refp, self.v_dd, self.temp)
    }
}
