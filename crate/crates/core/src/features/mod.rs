//! Program-inherent features of a memory trace and the feature vectors the
//! models consume.

mod extract;
mod program;
mod ranking;
mod spearman;

pub use extract::{extract_features, FeatureConfig, NUISANCE_NAMES};
pub use program::{access_rate, data_entropy, reuse_time, wait_cycles_ratio, ReuseTime};
pub use ranking::rank_features;
pub use spearman::{fractional_ranks, spearman};

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::dramsim::MAX_T_REFP;

/// Modeling value of a never-reused trace: far beyond any refresh period.
pub const NEVER_REUSED_SECONDS: f64 = 10.0 * MAX_T_REFP;

/// Program features present in every feature vector, in CSV order.
pub const CORE_FEATURES: [&str; 4] = ["t_reuse", "h_dp", "mem_accesses_per_cycle", "wait_cycles_ratio"];

#[derive(Debug, Error, PartialEq)]
pub enum FeatureError {
    #[error("trace has no accesses")]
    EmptyTrace,
    #[error("trace has no writes, data entropy is undefined")]
    NoWrites,
    #[error("trace spans zero cycles")]
    ZeroCycles,
    #[error("sequence lengths differ ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error("ranks have zero variance, correlation undefined")]
    ZeroVariance,
    #[error("target is constant across the dataset")]
    ConstantTarget,
    #[error("invalid environment: {0}")]
    Env(String),
    #[error("missing feature column `{0}`")]
    MissingColumn(String),
}

/// Which columns a model sees.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum FeatureSetId {
    /// Temperature, refresh period, wait cycles, access rate, entropy, reuse time.
    Set1,
    /// Set1 without entropy and reuse time.
    Set2,
    /// Temperature, refresh period and every program feature.
    Set3,
}

impl FeatureSetId {
    pub const ALL: [FeatureSetId; 3] = [FeatureSetId::Set1, FeatureSetId::Set2, FeatureSetId::Set3];

    pub fn tag(self) -> u8 {
        match self {
            FeatureSetId::Set1 => 1,
            FeatureSetId::Set2 => 2,
            FeatureSetId::Set3 => 3,
        }
    }

    pub fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            1 => Some(FeatureSetId::Set1),
            2 => Some(FeatureSetId::Set2),
            3 => Some(FeatureSetId::Set3),
            _ => None,
        }
    }
}

impl fmt::Display for FeatureSetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "set{}", self.tag())
    }
}

impl FromStr for FeatureSetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim().trim_start_matches("set").trim_start_matches("Set");
        t.parse::<u8>()
            .ok()
            .and_then(FeatureSetId::from_tag)
            .ok_or_else(|| format!("unknown feature set `{s}` (expected 1, 2 or 3)"))
    }
}

/// Model inputs for one (workload, device, environment) sample.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    pub workload: String,
    pub device: String,
    pub temp: f64,
    pub t_refp: f64,
    pub v_dd: f64,
    pub t_reuse: ReuseTime,
    pub h_dp: f64,
    pub mem_accesses_per_cycle: f64,
    pub wait_cycles_ratio: f64,
    /// Auxiliary trace statistics, named, in a fixed order.
    pub nuisance: Vec<(String, f64)>,
}

impl FeatureVector {
    /// Numeric value of a named column, if this vector has it.
    pub fn column(&self, name: &str) -> Option<f64> {
        match name {
            "temp" => Some(self.temp),
            "t_refp" => Some(self.t_refp),
            "v_dd" => Some(self.v_dd),
            "t_reuse" => Some(self.t_reuse.model_value()),
            "h_dp" => Some(self.h_dp),
            "mem_accesses_per_cycle" => Some(self.mem_accesses_per_cycle),
            "wait_cycles_ratio" => Some(self.wait_cycles_ratio),
            other => self.nuisance.iter().find(|(n, _)| n == other).map(|(_, v)| *v),
        }
    }

    /// Names of all program features (core then nuisance).
    pub fn program_feature_names(&self) -> Vec<String> {
        CORE_FEATURES.iter().map(|s| s.to_string()).chain(self.nuisance.iter().map(|(n, _)| n.clone())).collect()
    }

    /// Same program features under a different device and environment.
    pub fn with_env(&self, device: &str, temp: f64, t_refp: f64, v_dd: f64) -> FeatureVector {
        FeatureVector { device: device.to_string(), temp, t_refp, v_dd, ..self.clone() }
    }
}

/// Columns a feature set feeds to a model, checked against `schema` (the
/// program feature names of the data, core then nuisance).
pub fn select_features(set: FeatureSetId, schema: &[String]) -> Result<Vec<String>, FeatureError> {
    let env = ["temp", "t_refp"].map(String::from);
    let program: Vec<String> = match set {
        FeatureSetId::Set1 => {
            ["wait_cycles_ratio", "mem_accesses_per_cycle", "h_dp", "t_reuse"].map(String::from).to_vec()
        }
        FeatureSetId::Set2 => ["wait_cycles_ratio", "mem_accesses_per_cycle"].map(String::from).to_vec(),
        FeatureSetId::Set3 => schema.to_vec(),
    };
    if let Some(missing) = program.iter().find(|c| !schema.contains(c)) {
        return Err(FeatureError::MissingColumn(missing.clone()));
    }
    Ok(env.into_iter().chain(program).collect())
}
