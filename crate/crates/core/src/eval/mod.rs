//! Evaluation protocol: error metrics, leave-one-workload-out validation,
//! model comparison, grid trend summaries and SVG charts.

mod crossval;
mod report;
pub mod svg;
pub mod trends;

pub use crate::features::select_features;
pub use crossval::{
    best_knn, compare_models, loo_by_workload, mpe, predict_latency, CrossValReport, GroupMpe, Prediction, K_SWEEP,
};
pub use report::{summary, write_comparison_csv, write_predictions_csv, write_report_csv};

use thiserror::Error;

use crate::models::ModelError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("predictions and actuals differ in length ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("nothing to evaluate")]
    Empty,
    #[error("every actual value is zero, percentage error is undefined")]
    AllZero,
    #[error("leave-one-out needs at least 2 workloads, dataset has {0}")]
    SingleWorkload(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}
