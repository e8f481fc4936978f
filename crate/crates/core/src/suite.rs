//! The default desk-scale study: 13 synthetic workloads modeled on the
//! compute, caching and analytics benchmarks, four DIMM/rank devices and
//! the refresh/temperature grid.

use crate::dramsim::{build_dimm, DimmProfile, SimConfig, SimError};
use crate::trace::{ReuseProfile, WorkloadSpec};

pub const DEFAULT_T_REFP: [f64; 4] = [0.618, 1.173, 1.727, 2.283];
pub const DEFAULT_TEMPS: [f64; 3] = [50.0, 60.0, 70.0];
/// Lowered supply voltage used throughout the study.
pub const DEFAULT_V_DD: f64 = 1.428;
/// Weak-cell mass ratio between the weakest and strongest default device.
pub const DEVICE_SPREAD_TARGET: f64 = 188.0;

/// A device to build: identifier, profile seed and weak-cell spread.
#[derive(Debug, Clone, PartialEq)]
pub struct DeviceSpec {
    pub id: String,
    pub seed: u64,
    pub spread: f64,
}

impl DeviceSpec {
    pub fn build(&self, cfg: &SimConfig) -> Result<DimmProfile, SimError> {
        build_dimm(cfg, &self.id, self.seed, self.spread)
    }
}

pub fn default_devices() -> Vec<DeviceSpec> {
    let spreads = [0.0, 1.2, 2.9, DEVICE_SPREAD_TARGET.ln()];
    ["dimm0/rank0", "dimm0/rank1", "dimm1/rank0", "dimm1/rank1"]
        .iter()
        .zip(spreads)
        .enumerate()
        .map(|(i, (id, spread))| DeviceSpec { id: id.to_string(), seed: 0xD1A0_0000 + i as u64, spread })
        .collect()
}

struct Shape {
    name: &'static str,
    /// Share of the device the workload touches.
    footprint: f64,
    rate: f64,
    cpi: f64,
    profile: ReuseProfile,
    threads: u32,
    write_fraction: f64,
    alphabet: u32,
}

/// Length of the profiled window in cycles (2 s at 2.4 GHz).
const WINDOW_CYCLES: f64 = 4.8e9;

#[rustfmt::skip]
const SHAPES: [Shape; 13] = [
    Shape { name: "backprop", footprint: 0.40, rate: 2.100e-04, cpi: 1.0, profile: ReuseProfile::Zipfian(1.1), threads: 1, write_fraction: 0.45, alphabet: 256 },
    Shape { name: "backprop_par", footprint: 0.40, rate: 2.100e-04, cpi: 0.9, profile: ReuseProfile::Zipfian(1.1), threads: 8, write_fraction: 0.45, alphabet: 256 },
    Shape { name: "nw", footprint: 0.45, rate: 2.060e-04, cpi: 1.1, profile: ReuseProfile::Streaming, threads: 1, write_fraction: 0.5, alphabet: 128 },
    Shape { name: "srad", footprint: 0.35, rate: 1.220e-03, cpi: 1.0, profile: ReuseProfile::Uniform, threads: 1, write_fraction: 0.3, alphabet: 1024 },
    Shape { name: "srad_par", footprint: 0.35, rate: 1.250e-03, cpi: 0.8, profile: ReuseProfile::Uniform, threads: 8, write_fraction: 0.3, alphabet: 1024 },
    Shape { name: "kmeans", footprint: 0.30, rate: 1.510e-04, cpi: 0.7, profile: ReuseProfile::Zipfian(1.3), threads: 1, write_fraction: 0.2, alphabet: 64 },
    Shape { name: "kmeans_par", footprint: 0.30, rate: 1.510e-04, cpi: 0.8, profile: ReuseProfile::Zipfian(1.2), threads: 8, write_fraction: 0.2, alphabet: 64 },
    Shape { name: "fmm", footprint: 0.35, rate: 1.680e-04, cpi: 1.2, profile: ReuseProfile::Zipfian(1.0), threads: 1, write_fraction: 0.35, alphabet: 512 },
    Shape { name: "fmm_par", footprint: 0.35, rate: 1.680e-04, cpi: 1.0, profile: ReuseProfile::Zipfian(1.0), threads: 8, write_fraction: 0.35, alphabet: 512 },
    Shape { name: "memcached", footprint: 0.60, rate: 2.100e-03, cpi: 1.5, profile: ReuseProfile::Uniform, threads: 4, write_fraction: 0.1, alphabet: 256 },
    Shape { name: "pagerank", footprint: 0.60, rate: 2.150e-03, cpi: 1.3, profile: ReuseProfile::Uniform, threads: 8, write_fraction: 0.25, alphabet: 256 },
    Shape { name: "bfs", footprint: 0.35, rate: 1.910e-04, cpi: 1.4, profile: ReuseProfile::Zipfian(0.9), threads: 8, write_fraction: 0.15, alphabet: 32 },
    Shape { name: "bc", footprint: 0.35, rate: 1.840e-04, cpi: 1.3, profile: ReuseProfile::Zipfian(1.0), threads: 8, write_fraction: 0.2, alphabet: 128 },
];

/// The 13 default workloads. Each owns the whole simulated device but only
/// touches its footprint; the rest keeps the reset pattern.
pub fn default_workloads(cfg: &SimConfig) -> Vec<WorkloadSpec> {
    let capacity = cfg.geometry.capacity_words();
    SHAPES
        .iter()
        .enumerate()
        .map(|(i, s)| WorkloadSpec {
            name: s.name.to_string(),
            n_instructions: (WINDOW_CYCLES / s.cpi).round() as u64,
            footprint_words: ((s.footprint * capacity as f64).round() as u64).clamp(1, capacity),
            target_access_rate: s.rate,
            cpi: s.cpi,
            write_fraction: s.write_fraction,
            value_alphabet_size: s.alphabet,
            reuse_profile: s.profile,
            threads: s.threads,
            seed: 1000 + i as u64,
        })
        .collect()
}
