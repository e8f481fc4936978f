//! Command-line front end. Each subcommand reads and writes files only.
//!
//! Exit codes: 0 success, 1 usage, 2 I/O, 3 validation, 4 numerical.

mod commands;
mod config;

pub use config::RunConfig;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::dramsim::SimError;
use crate::eval::EvalError;
use crate::features::{FeatureError, FeatureSetId};
use crate::models::{ModelError, ModelKind, TargetKind};
use crate::pipeline::PipelineError;
use crate::trace::TraceError;

/// Names the default config file.
pub const CONFIG_ENV: &str = "DRAM_ORACLE_CONFIG";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("I/O: {0}")]
    Io(String),
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Validation(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }

    pub(crate) fn io(path: &std::path::Path, e: impl std::fmt::Display) -> CliError {
        CliError::Io(format!("{}: {e}", path.display()))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<TraceError> for CliError {
    fn from(e: TraceError) -> Self {
        match e {
            TraceError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Io(_) => CliError::Io(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<FeatureError> for CliError {
    fn from(e: FeatureError) -> Self {
        match e {
            FeatureError::ZeroVariance | FeatureError::ConstantTarget => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match &e {
            ModelError::Io(_) => CliError::Io(e.to_string()),
            ModelError::Csv(c) if c.is_io_error() => CliError::Io(e.to_string()),
            ModelError::NonConvergence { .. } => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<EvalError> for CliError {
    fn from(e: EvalError) -> Self {
        match e {
            EvalError::Model(m) => m.into(),
            EvalError::Io(_) => CliError::Io(e.to_string()),
            EvalError::Csv(ref c) if c.is_io_error() => CliError::Io(e.to_string()),
            EvalError::AllZero => CliError::Numerical(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

impl From<PipelineError> for CliError {
    fn from(e: PipelineError) -> Self {
        match e {
            PipelineError::Trace(e) => e.into(),
            PipelineError::Feature(e) => e.into(),
            PipelineError::Sim(e) => e.into(),
            PipelineError::Model(e) => e.into(),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "dram-oracle", version, about = "Workload-aware DRAM error prediction")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags accepted by every subcommand. Unset flags leave the config value alone.
#[derive(Debug, Args, Default)]
pub struct Common {
    /// Config file of `key = value` lines (overrides $DRAM_ORACLE_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Refresh period in seconds; repeatable.
    #[arg(long = "trefp", global = true, value_name = "S")]
    pub t_refp: Vec<f64>,
    /// DRAM temperature in °C; repeatable.
    #[arg(long, global = true, value_name = "C")]
    pub temp: Vec<f64>,
    /// Supply voltage in volts.
    #[arg(long, global = true, value_name = "V")]
    pub vdd: Option<f64>,
    /// Device id or device profile file; repeatable.
    #[arg(long, global = true)]
    pub device: Vec<String>,
    /// knn, rdf, svr or baseline; repeatable for crossval.
    #[arg(long, global = true)]
    pub model: Vec<ModelKind>,
    /// 1, 2 or 3; repeatable for crossval.
    #[arg(long = "feature-set", global = true, value_name = "N")]
    pub feature_set: Vec<FeatureSetId>,
    /// wer or p_ue.
    #[arg(long, global = true)]
    pub target: Option<TargetKind>,
    #[arg(long, global = true)]
    pub k: Option<usize>,
    #[arg(long, global = true)]
    pub trees: Option<usize>,
    #[arg(long = "n-exp", global = true, value_name = "N")]
    pub n_exp: Option<u32>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate DOTR trace files from a spec file or the built-in suite.
    GenTrace {
        /// Workload spec file (`key = value`).
        #[arg(long, conflicts_with = "workload")]
        spec: Option<PathBuf>,
        /// Suite workload to generate; repeatable. Default: all of them.
        #[arg(long)]
        workload: Vec<String>,
        /// Print the spec(s) instead of generating traces.
        #[arg(long)]
        print_spec: bool,
    },
    /// Profile traces and label them over the device × environment grid.
    BuildDataset {
        /// Directory of .dotr files. Default: generate the suite in memory.
        #[arg(long, value_name = "DIR")]
        traces: Option<PathBuf>,
        /// Suite workload to include; repeatable.
        #[arg(long)]
        workload: Vec<String>,
        /// Also write machine-level P_UE per workload and grid point.
        #[arg(long, value_name = "CSV")]
        system: Option<PathBuf>,
    },
    /// Rank features by |Spearman r| against the target.
    Correlate { dataset: PathBuf },
    /// Train one model and save it.
    Train { dataset: PathBuf },
    /// Leave-one-workload-out cross-validation with CSV and SVG reports.
    Crossval {
        dataset: PathBuf,
        /// Every model kind on every feature set.
        #[arg(long)]
        all: bool,
    },
    /// Predict WER or P_UE with a saved model.
    Predict {
        model_file: PathBuf,
        /// Feature rows in the dataset CSV schema (labels optional).
        #[arg(long, value_name = "CSV", conflicts_with = "trace")]
        features: Option<PathBuf>,
        /// Trace to profile; predicted on every device × --trefp × --temp.
        #[arg(long, value_name = "DOTR")]
        trace: Option<PathBuf>,
    },
    /// Print the effective configuration.
    Config,
}

/// Builds the effective config: defaults, `$DRAM_ORACLE_CONFIG`, `--config`, flags.
pub fn resolve_config(common: &Common, env_file: Option<PathBuf>) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::default();
    for path in env_file.iter().chain(common.config.iter()) {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        cfg.apply_kv_text(&text).map_err(|e| match e {
            CliError::Validation(m) => CliError::Validation(format!("{}: {m}", path.display())),
            other => other,
        })?;
    }
    if let Some(s) = common.seed {
        cfg.seed = s;
    }
    if common.out.is_some() {
        cfg.out = common.out.clone();
    }
    if !common.t_refp.is_empty() {
        cfg.t_refp = common.t_refp.clone();
    }
    if !common.temp.is_empty() {
        cfg.temps = common.temp.clone();
    }
    if let Some(v) = common.vdd {
        cfg.v_dd = v;
    }
    if !common.device.is_empty() {
        cfg.devices = common.device.clone();
    }
    if !common.model.is_empty() {
        cfg.models = common.model.clone();
    }
    if !common.feature_set.is_empty() {
        cfg.feature_sets = common.feature_set.clone();
    }
    if let Some(t) = common.target {
        cfg.target = t;
    }
    if common.k.is_some() {
        cfg.k = common.k;
    }
    if let Some(t) = common.trees {
        cfg.trees = t;
    }
    if let Some(n) = common.n_exp {
        cfg.sim.n_exp = n;
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let env_file = std::env::var_os(CONFIG_ENV).filter(|v| !v.is_empty()).map(PathBuf::from);
    let result = resolve_config(&cli.common, env_file).and_then(|cfg| commands::dispatch(&cli.command, &cfg));
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("dram-oracle: {e}");
            e.exit_code()
        }
    }
}
