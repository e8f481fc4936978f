//! Regressors over feature vectors: KNN, random forest, SVR and the
//! workload-unaware baseline, plus scaling, datasets and model files.

mod baseline;
mod dataset;
mod design;
mod format;
mod knn;
mod rdf;
mod scaler;
mod svr;
mod trained;

pub use baseline::Baseline;
pub use dataset::{read_dataset_csv, write_dataset_csv, Dataset, LabeledRow, TargetKind};
pub use design::{decode_target, encode_target, Design, DeviceEncoding, WER_LOG_FLOOR};
pub use format::{load_model, load_model_as, save_model, MODEL_MAGIC, MODEL_VERSION};
pub use knn::Knn;
pub use rdf::{Forest, Node, RdfParams, Tree, LEAF};
pub use scaler::Scaler;
pub use svr::{rbf, Svr, SvrParams};
pub use trained::{
    standardize, train, train_baseline, train_knn, train_rdf, train_svr, ModelConfig, ModelKind, Params, TrainedModel,
};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("dataset is empty")]
    EmptyDataset,
    #[error("schema mismatch: {0}")]
    Schema(String),
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("k = {k} outside [1, {n}]")]
    KOutOfRange { k: usize, n: usize },
    #[error("SMO did not converge after {iterations} iterations (duality gap {gap:.3e})")]
    NonConvergence { iterations: usize, gap: f64 },
    #[error("device `{0}` was not seen in training")]
    UnknownDevice(String),
    #[error("no training samples for cell {0} and no fallback")]
    EmptyCell(String),
    #[error("bad magic number {0:?}, expected \"DOML\"")]
    BadMagic([u8; 4]),
    #[error("unsupported model file version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated model file: {0}")]
    Truncated(&'static str),
    #[error("corrupt model file: {0}")]
    Corrupt(String),
    #[error("model file holds a {found} model, expected {expected}")]
    KindMismatch { expected: String, found: String },
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
