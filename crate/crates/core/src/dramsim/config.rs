use std::fmt;
use std::str::FromStr;

use super::SimError;
use crate::geometry::Geometry;
use crate::kv::{parse_kv, render_kv};

/// How a word's reuse interval is summarized for implicit refresh.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReuseMode {
    /// Mean gap between successive accesses (matches the reuse-time feature).
    Mean,
    /// Shortest gap; a sensitivity setting.
    MinGap,
}

impl fmt::Display for ReuseMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReuseMode::Mean => "mean",
            ReuseMode::MinGap => "min-gap",
        })
    }
}

impl FromStr for ReuseMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "mean" => Ok(ReuseMode::Mean),
            "min-gap" | "min" => Ok(ReuseMode::MinGap),
            other => Err(format!("unknown reuse mode `{other}` (expected mean or min-gap)")),
        }
    }
}

/// Simulator constants. Every field has a default; see [`SimConfig::KEYS`]
/// for the text-file keys.
#[derive(Debug, Clone, PartialEq)]
pub struct SimConfig {
    pub geometry: Geometry,
    /// Core clock used to convert instruction distances to seconds (Hz).
    pub f_clk: f64,
    /// Cells per bit drawn from the retention distribution (before the ceiling cut).
    pub weak_cell_density: f64,
    /// Log-normal location of base retention at the reference temperature, ln(s).
    pub retention_mu: f64,
    /// Log-normal scale of base retention.
    pub retention_sigma: f64,
    /// Cells with base retention above this (s) are never materialized.
    pub retention_ceiling: f64,
    /// Temperature coefficient (1/°C); ln 2 / 10 ≈ 0.0693 halves retention every 10 °C.
    pub alpha: f64,
    /// Voltage exponent.
    pub beta: f64,
    /// Reference temperature of base retention (°C).
    pub t0: f64,
    /// Nominal supply voltage (V).
    pub v_nom: f64,
    /// Log-normal run-to-run retention noise.
    pub sigma_vrt: f64,
    /// Row access rate (accesses/s) above which neighbouring rows are disturbed.
    pub hammer_threshold: f64,
    /// Retention multiplier for cells in disturbed rows.
    pub interference_factor: f64,
    /// Content of words the trace never writes.
    pub reset_pattern: u64,
    pub reuse_mode: ReuseMode,
    /// Repetitions per P_UE estimate.
    pub n_exp: u32,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            geometry: Geometry::default(),
            f_clk: 2.4e9,
            weak_cell_density: 1.0,
            retention_mu: 6.8,
            retention_sigma: 1.2,
            retention_ceiling: 24.0,
            alpha: std::f64::consts::LN_2 / 10.0,
            beta: 0.5,
            t0: 50.0,
            v_nom: 1.5,
            sigma_vrt: 0.2,
            hammer_threshold: 1e4,
            interference_factor: 0.5,
            reset_pattern: 0,
            reuse_mode: ReuseMode::Mean,
            n_exp: 10,
        }
    }
}

fn parse_num<T: FromStr>(key: &str, v: &str) -> Result<T, SimError> {
    v.parse().map_err(|_| SimError::Config { key: key.to_string(), reason: format!("cannot parse `{v}`") })
}

impl SimConfig {
    pub const KEYS: [&'static str; 17] = [
        "n_rows",
        "words_per_row",
        "f_clk",
        "weak_cell_density",
        "retention_mu",
        "retention_sigma",
        "retention_ceiling",
        "alpha",
        "beta",
        "t0",
        "v_nom",
        "sigma_vrt",
        "hammer_threshold",
        "interference_factor",
        "reset_pattern",
        "reuse_mode",
        "n_exp",
    ];

    /// Sets one field from its text form. Returns `Ok(false)` for keys this
    /// config does not own so callers can layer other settings on top.
    pub fn set(&mut self, key: &str, v: &str) -> Result<bool, SimError> {
        match key {
            "n_rows" => self.geometry.n_rows = parse_num(key, v)?,
            "words_per_row" => self.geometry.words_per_row = parse_num(key, v)?,
            "f_clk" => self.f_clk = parse_num(key, v)?,
            "weak_cell_density" => self.weak_cell_density = parse_num(key, v)?,
            "retention_mu" => self.retention_mu = parse_num(key, v)?,
            "retention_sigma" => self.retention_sigma = parse_num(key, v)?,
            "retention_ceiling" => self.retention_ceiling = parse_num(key, v)?,
            "alpha" => self.alpha = parse_num(key, v)?,
            "beta" => self.beta = parse_num(key, v)?,
            "t0" => self.t0 = parse_num(key, v)?,
            "v_nom" => self.v_nom = parse_num(key, v)?,
            "sigma_vrt" => self.sigma_vrt = parse_num(key, v)?,
            "hammer_threshold" => self.hammer_threshold = parse_num(key, v)?,
            "interference_factor" => self.interference_factor = parse_num(key, v)?,
            "reset_pattern" => {
                let parsed = match v.strip_prefix("0x") {
                    Some(hex) => u64::from_str_radix(hex, 16).ok(),
                    None => v.parse().ok(),
                };
                self.reset_pattern = parsed
                    .ok_or_else(|| SimError::Config { key: key.to_string(), reason: format!("cannot parse `{v}`") })?;
            }
            "reuse_mode" => {
                self.reuse_mode = v.parse().map_err(|reason| SimError::Config { key: key.to_string(), reason })?
            }
            "n_exp" => self.n_exp = parse_num(key, v)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "n_rows" => self.geometry.n_rows.to_string(),
            "words_per_row" => self.geometry.words_per_row.to_string(),
            "f_clk" => self.f_clk.to_string(),
            "weak_cell_density" => self.weak_cell_density.to_string(),
            "retention_mu" => self.retention_mu.to_string(),
            "retention_sigma" => self.retention_sigma.to_string(),
            "retention_ceiling" => self.retention_ceiling.to_string(),
            "alpha" => self.alpha.to_string(),
            "beta" => self.beta.to_string(),
            "t0" => self.t0.to_string(),
            "v_nom" => self.v_nom.to_string(),
            "sigma_vrt" => self.sigma_vrt.to_string(),
            "hammer_threshold" => self.hammer_threshold.to_string(),
            "interference_factor" => self.interference_factor.to_string(),
            "reset_pattern" => format!("{:#x}", self.reset_pattern),
            "reuse_mode" => self.reuse_mode.to_string(),
            "n_exp" => self.n_exp.to_string(),
            _ => return None,
        })
    }

    /// Parses a config file; absent keys keep their defaults.
    pub fn from_kv_text(text: &str) -> Result<SimConfig, SimError> {
        let map = parse_kv(text).map_err(|reason| SimError::Config { key: "<file>".into(), reason })?;
        let mut cfg = SimConfig::default();
        for (k, v) in &map {
            if !cfg.set(k, v)? {
                return Err(SimError::Config { key: k.clone(), reason: "unknown key".into() });
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_kv_text(&self) -> String {
        render_kv(Self::KEYS.iter().map(|k| (*k, self.get(k).expect("every key renders"))))
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |key: &str, reason: &str| Err(SimError::Config { key: key.to_string(), reason: reason.to_string() });
        if self.geometry.n_rows == 0 || self.geometry.words_per_row == 0 {
            return bad("n_rows", "geometry must be non-empty");
        }
        if !(self.f_clk > 0.0) {
            return bad("f_clk", "must be positive");
        }
        if !(self.weak_cell_density >= 0.0 && self.weak_cell_density <= 1.0) {
            return bad("weak_cell_density", "must lie in [0, 1]");
        }
        if !self.retention_mu.is_finite() {
            return bad("retention_mu", "must be finite");
        }
        if !(self.retention_sigma >= 0.0 && self.retention_sigma.is_finite()) {
            return bad("retention_sigma", "must be non-negative");
        }
        if !(self.retention_ceiling > 0.0) {
            return bad("retention_ceiling", "must be positive");
        }
        if !(self.alpha >= 0.0) || !(self.beta >= 0.0) {
            return bad("alpha", "temperature and voltage coefficients must be non-negative");
        }
        if !(self.v_nom > 0.0) {
            return bad("v_nom", "must be positive");
        }
        if !(self.sigma_vrt >= 0.0) {
            return bad("sigma_vrt", "must be non-negative");
        }
        if !(self.hammer_threshold > 0.0) {
            return bad("hammer_threshold", "must be positive");
        }
        if !(self.interference_factor > 0.0 && self.interference_factor <= 1.0) {
            return bad("interference_factor", "must lie in (0, 1]");
        }
        if self.n_exp == 0 {
            return bad("n_exp", "must be at least 1");
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut c = SimConfig::default();
        c.retention_mu = 2.75;
        c.reset_pattern = 0xdead_beef_0000_0001;
        c.reuse_mode = ReuseMode::MinGap;
        let back = SimConfig::from_kv_text(&c.to_kv_text()).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn partial_file_keeps_defaults() {
        let c = SimConfig::from_kv_text("# tweak\nsigma_vrt = 0\n").unwrap();
        assert_eq!(c.sigma_vrt, 0.0);
        assert_eq!(c.alpha, SimConfig::default().alpha);
    }

    #[test]
    fn rejects_unknown_and_invalid() {
        assert!(matches!(SimConfig::from_kv_text("bogus = 1"), Err(SimError::Config { key, .. }) if key == "bogus"));
        assert!(SimConfig::from_kv_text("retention_sigma = -1").is_err());
        assert!(SimConfig::from_kv_text("weak_cell_density = -0.1").is_err());
        assert!(SimConfig::from_kv_text("n_exp = 0").is_err());
        assert!(SimConfig::from_kv_text("alpha = x").is_err());
    }
}
