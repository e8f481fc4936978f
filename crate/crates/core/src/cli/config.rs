use std::path::PathBuf;
use std::str::FromStr;

use super::CliError;
use crate::dramsim::{EnvPoint, SimConfig};
use crate::features::FeatureSetId;
use crate::kv::{parse_kv, render_kv};
use crate::models::{ModelConfig, ModelKind, RdfParams, TargetKind};
use crate::suite::{DEFAULT_TEMPS, DEFAULT_T_REFP, DEFAULT_V_DD};

/// Settings shared by every subcommand.
///
/// Layers, lowest first: built-in defaults, the file named by
/// `DRAM_ORACLE_CONFIG`, the file given with `--config`, then flags.
/// Simulator constants ride along under their own keys (see [`SimConfig::KEYS`]).
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    /// Grid seed for simulator repetitions and RDF bootstraps. Default 1.
    pub seed: u64,
    /// Refresh periods in seconds. Default 0.618, 1.173, 1.727, 2.283.
    pub t_refp: Vec<f64>,
    /// DRAM temperatures in °C. Default 50, 60, 70.
    pub temps: Vec<f64>,
    /// Supply voltage in volts. Default 1.428.
    pub v_dd: f64,
    /// Device ids or device profile paths. Empty means the four suite devices.
    pub devices: Vec<String>,
    /// Suite workloads to include. Empty means all 13.
    pub workloads: Vec<String>,
    /// Default knn.
    pub models: Vec<ModelKind>,
    /// Default set1.
    pub feature_sets: Vec<FeatureSetId>,
    /// Default wer.
    pub target: TargetKind,
    /// KNN neighbours. `None` trains with 5 and lets crossval sweep 1, 3, 5, 7.
    pub k: Option<usize>,
    /// RDF trees. Default 100.
    pub trees: usize,
    /// Output path; each command has its own default.
    pub out: Option<PathBuf>,
    pub sim: SimConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            seed: 1,
            t_refp: DEFAULT_T_REFP.to_vec(),
            temps: DEFAULT_TEMPS.to_vec(),
            v_dd: DEFAULT_V_DD,
            devices: Vec::new(),
            workloads: Vec::new(),
            models: vec![ModelKind::Knn],
            feature_sets: vec![FeatureSetId::Set1],
            target: TargetKind::Wer,
            k: None,
            trees: RdfParams::default().n_trees,
            out: None,
            sim: SimConfig::default(),
        }
    }
}

fn invalid(key: &str, reason: impl std::fmt::Display) -> CliError {
    CliError::Validation(format!("config `{key}`: {reason}"))
}

fn one<T: FromStr>(key: &str, v: &str) -> Result<T, CliError> {
    v.trim().parse().map_err(|_| invalid(key, format!("cannot parse `{v}`")))
}

fn list<T: FromStr>(key: &str, v: &str) -> Result<Vec<T>, CliError>
where
    T::Err: std::fmt::Display,
{
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| s.parse().map_err(|e| invalid(key, e))).collect()
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(", ")
}

impl RunConfig {
    pub const KEYS: [&'static str; 12] = [
        "seed",
        "t_refp",
        "temp",
        "v_dd",
        "devices",
        "workloads",
        "model",
        "feature_set",
        "target",
        "k",
        "trees",
        "out",
    ];

    pub fn set(&mut self, key: &str, v: &str) -> Result<(), CliError> {
        match key {
            "seed" => self.seed = one(key, v)?,
            "t_refp" => self.t_refp = list(key, v)?,
            "temp" => self.temps = list(key, v)?,
            "v_dd" => self.v_dd = one(key, v)?,
            "devices" => self.devices = list(key, v)?,
            "workloads" => self.workloads = list(key, v)?,
            "model" => self.models = list(key, v)?,
            "feature_set" => self.feature_sets = list(key, v)?,
            "target" => self.target = v.trim().parse().map_err(|e| invalid(key, e))?,
            "k" => self.k = if v.trim() == "auto" { None } else { Some(one(key, v)?) },
            "trees" => self.trees = one(key, v)?,
            "out" => self.out = (!v.trim().is_empty()).then(|| PathBuf::from(v.trim())),
            _ => {
                if !self.sim.set(key, v)? {
                    return Err(invalid(key, "unknown key"));
                }
            }
        }
        Ok(())
    }

    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "seed" => self.seed.to_string(),
            "t_refp" => join(&self.t_refp),
            "temp" => join(&self.temps),
            "v_dd" => self.v_dd.to_string(),
            "devices" => self.devices.join(", "),
            "workloads" => self.workloads.join(", "),
            "model" => join(&self.models),
            "feature_set" => join(&self.feature_sets.iter().map(|s| s.tag()).collect::<Vec<_>>()),
            "target" => self.target.to_string(),
            "k" => self.k.map_or("auto".to_string(), |k| k.to_string()),
            "trees" => self.trees.to_string(),
            "out" => self.out.as_ref().map(|p| p.display().to_string()).unwrap_or_default(),
            other => return self.sim.get(other),
        })
    }

    /// Applies a config file on top of the current values.
    pub fn apply_kv_text(&mut self, text: &str) -> Result<(), CliError> {
        let map = parse_kv(text).map_err(|e| invalid("<file>", e))?;
        for (k, v) in &map {
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn from_kv_text(text: &str) -> Result<RunConfig, CliError> {
        let mut c = RunConfig::default();
        c.apply_kv_text(text)?;
        c.validate()?;
        Ok(c)
    }

    pub fn to_kv_text(&self) -> String {
        let keys = Self::KEYS.iter().chain(SimConfig::KEYS.iter());
        render_kv(keys.map(|k| (*k, self.get(k).expect("every key renders"))))
    }

    /// Checks every grid point and model setting, naming the offending field.
    pub fn validate(&self) -> Result<(), CliError> {
        self.sim.validate()?;
        if self.t_refp.is_empty() {
            return Err(invalid("t_refp", "at least one refresh period is required"));
        }
        if self.temps.is_empty() {
            return Err(invalid("temp", "at least one temperature is required"));
        }
        for env in self.points() {
            env.validate()?;
        }
        if self.models.is_empty() {
            return Err(invalid("model", "at least one model is required"));
        }
        if self.feature_sets.is_empty() {
            return Err(invalid("feature_set", "at least one feature set is required"));
        }
        if self.k == Some(0) {
            return Err(invalid("k", "must be at least 1"));
        }
        if self.trees == 0 {
            return Err(invalid("trees", "must be at least 1"));
        }
        Ok(())
    }

    /// Grid points, temperature-major.
    pub fn points(&self) -> Vec<EnvPoint> {
        self.temps
            .iter()
            .flat_map(|&temp| self.t_refp.iter().map(move |&t| EnvPoint::new(t, self.v_dd, temp)))
            .collect()
    }

    /// Model settings for one kind and feature set; `k` falls back to 5.
    pub fn model_config(&self, kind: ModelKind, set: FeatureSetId) -> ModelConfig {
        let mut c = ModelConfig::new(kind, set);
        if let Some(k) = self.k {
            c.k = k;
        }
        c.rdf.n_trees = self.trees;
        c.rdf.seed = self.seed;
        c
    }
}
