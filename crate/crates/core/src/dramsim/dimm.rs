use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use statrs::distribution::{ContinuousCDF, Normal};

use super::{EnvPoint, SimConfig, SimError};
use crate::geometry::Geometry;

/// A cell whose retention can fall below a supported refresh interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakCell {
    pub word: u64,
    /// Bit position within the 64-bit word.
    pub bit: u8,
    /// Retention at the reference temperature and nominal voltage (s).
    pub retention: f64,
    /// Value the cell reads once discharged: 0 for a true cell, 1 for an anti cell.
    pub discharge: u8,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DimmProfile {
    pub device_id: String,
    pub geometry: Geometry,
    /// Sorted by (word, bit), at most one entry per bit.
    pub weak_cells: Vec<WeakCell>,
    pub device_seed: u64,
    /// Weak-cell mass reduction on a log scale: a device with spread `s`
    /// holds `e^-s` times the reference density at every retention quantile.
    pub spread: f64,
}

impl DimmProfile {
    pub fn capacity_words(&self) -> u64 {
        self.geometry.capacity_words()
    }
}

/// Samples a device: a Poisson field of sub-ceiling weak cells with
/// truncated log-normal base retention and fair-coin orientation.
pub fn build_dimm(cfg: &SimConfig, device_id: &str, device_seed: u64, spread: f64) -> Result<DimmProfile, SimError> {
    cfg.validate()?;
    if !spread.is_finite() {
        return Err(SimError::Config { key: "spread".into(), reason: "must be finite".into() });
    }
    let capacity = cfg.geometry.capacity_words();
    let mu = cfg.retention_mu;
    let sigma = cfg.retention_sigma;
    let normal = Normal::standard();
    let below_ceiling = if sigma > 0.0 {
        normal.cdf((cfg.retention_ceiling.ln() - mu) / sigma)
    } else if mu.exp() <= cfg.retention_ceiling {
        1.0
    } else {
        0.0
    };
    let expected = cfg.weak_cell_density * capacity as f64 * 64.0 * below_ceiling * (-spread).exp();

    let mut rng = ChaCha8Rng::seed_from_u64(device_seed);
    let count = if expected > 0.0 {
        Poisson::new(expected)
            .map_err(|e| SimError::Config { key: "weak_cell_density".into(), reason: e.to_string() })?
            .sample(&mut rng) as u64
    } else {
        0
    };

    let mut cells = Vec::with_capacity(count as usize);
    for _ in 0..count {
        let word = rng.random_range(0..capacity);
        let bit = rng.random_range(0..64u8);
        let discharge = rng.random_bool(0.5) as u8;
        let retention = if sigma > 0.0 {
            // inverse CDF of the log-normal restricted to (0, ceiling]
            let u: f64 = rng.random_range(f64::MIN_POSITIVE..1.0);
            (mu + sigma * normal.inverse_cdf(u * below_ceiling)).exp().min(cfg.retention_ceiling)
        } else {
            mu.exp()
        };
        cells.push(WeakCell { word, bit, retention, discharge });
    }
    cells.sort_by_key(|c| (c.word, c.bit));
    cells.dedup_by(|a, b| a.word == b.word && a.bit == b.bit);

    Ok(DimmProfile { device_id: device_id.to_string(), geometry: cfg.geometry, weak_cells: cells, device_seed, spread })
}

/// Retention at `env` of a cell with base retention `base`.
pub fn retention_at(base: f64, env: &EnvPoint, cfg: &SimConfig) -> f64 {
    base * (-cfg.alpha * (env.temp - cfg.t0)).exp() * (env.v_dd / cfg.v_nom).powf(cfg.beta)
}
