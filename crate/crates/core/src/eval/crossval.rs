use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use super::EvalError;
use crate::features::{FeatureSetId, FeatureVector};
use crate::models::{train, Dataset, ModelConfig, ModelKind, TargetKind, TrainedModel};

/// Mean percentage error over samples with a non-zero actual value.
pub fn mpe(predictions: &[f64], actuals: &[f64]) -> Result<f64, EvalError> {
    if predictions.len() != actuals.len() {
        return Err(EvalError::LengthMismatch(predictions.len(), actuals.len()));
    }
    if predictions.is_empty() {
        return Err(EvalError::Empty);
    }
    let (sum, n) = predictions
        .iter()
        .zip(actuals)
        .filter(|(_, a)| **a != 0.0)
        .fold((0.0, 0usize), |(s, n), (p, a)| (s + ((p - a) / a).abs(), n + 1));
    if n == 0 {
        return Err(EvalError::AllZero);
    }
    Ok(100.0 * sum / n as f64)
}

/// One held-out prediction.
#[derive(Debug, Clone, PartialEq)]
pub struct Prediction {
    pub workload: String,
    pub device: String,
    pub temp: f64,
    pub t_refp: f64,
    pub actual: f64,
    pub predicted: f64,
}

impl Prediction {
    /// Percentage error, or `None` when the actual value is zero.
    pub fn percent_error(&self) -> Option<f64> {
        (self.actual != 0.0).then(|| 100.0 * ((self.predicted - self.actual) / self.actual).abs())
    }
}

/// MPE of a group plus how many samples it covers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupMpe {
    /// `None` when every actual in the group is zero.
    pub mpe: Option<f64>,
    pub scored: usize,
    pub excluded_zero: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValReport {
    pub label: String,
    pub kind: ModelKind,
    pub feature_set: FeatureSetId,
    pub target: TargetKind,
    pub per_workload: BTreeMap<String, GroupMpe>,
    pub per_device: BTreeMap<String, GroupMpe>,
    /// Mean of per-sample percentage errors.
    pub overall_mpe: f64,
    /// Mean of the per-device MPEs, the other reading of a per-device figure.
    pub device_mean_mpe: f64,
    pub scored: usize,
    pub excluded_zero: usize,
    pub predictions: Vec<Prediction>,
    pub folds: usize,
    pub train_time: Duration,
    /// Median wall-clock time of one prediction.
    pub predict_median: Duration,
}

fn group(preds: &[&Prediction]) -> GroupMpe {
    let errs: Vec<f64> = preds.iter().filter_map(|p| p.percent_error()).collect();
    GroupMpe {
        mpe: (!errs.is_empty()).then(|| errs.iter().sum::<f64>() / errs.len() as f64),
        scored: errs.len(),
        excluded_zero: preds.len() - errs.len(),
    }
}

/// Leave-one-workload-out: each fold trains on every other workload and
/// predicts all samples of the held-out one.
pub fn loo_by_workload(ds: &Dataset, cfg: &ModelConfig) -> Result<CrossValReport, EvalError> {
    let index = ds.workload_index();
    if index.len() < 2 {
        return Err(EvalError::SingleWorkload(index.len()));
    }
    let mut predictions = Vec::with_capacity(ds.len());
    let mut train_time = Duration::ZERO;
    let mut query_times = Vec::with_capacity(ds.len());
    for test in index.values() {
        let train_idx: Vec<usize> = (0..ds.len()).filter(|i| !test.contains(i)).collect();
        let t0 = Instant::now();
        let model = train(&ds.subset(&train_idx), cfg)?;
        train_time += t0.elapsed();
        for &i in test {
            let (fv, actual) = &ds.samples[i];
            let t1 = Instant::now();
            let predicted = model.predict(fv)?;
            query_times.push(t1.elapsed());
            predictions.push(Prediction {
                workload: fv.workload.clone(),
                device: fv.device.clone(),
                temp: fv.temp,
                t_refp: fv.t_refp,
                actual: *actual,
                predicted,
            });
        }
    }
    query_times.sort();
    let report = summarize(cfg, ds.target, predictions, index.len(), train_time, query_times[query_times.len() / 2])?;
    Ok(report)
}

fn summarize(
    cfg: &ModelConfig,
    target: TargetKind,
    predictions: Vec<Prediction>,
    folds: usize,
    train_time: Duration,
    predict_median: Duration,
) -> Result<CrossValReport, EvalError> {
    let mut by_w: BTreeMap<String, Vec<&Prediction>> = BTreeMap::new();
    let mut by_d: BTreeMap<String, Vec<&Prediction>> = BTreeMap::new();
    for p in &predictions {
        by_w.entry(p.workload.clone()).or_default().push(p);
        by_d.entry(p.device.clone()).or_default().push(p);
    }
    let per_workload: BTreeMap<String, GroupMpe> = by_w.into_iter().map(|(k, v)| (k, group(&v))).collect();
    let per_device: BTreeMap<String, GroupMpe> = by_d.into_iter().map(|(k, v)| (k, group(&v))).collect();
    let all: Vec<&Prediction> = predictions.iter().collect();
    let g = group(&all);
    let overall_mpe = g.mpe.ok_or(EvalError::AllZero)?;
    let dev: Vec<f64> = per_device.values().filter_map(|g| g.mpe).collect();
    let device_mean_mpe = dev.iter().sum::<f64>() / dev.len() as f64;
    Ok(CrossValReport {
        label: cfg.label(),
        kind: cfg.kind,
        feature_set: cfg.feature_set,
        target,
        per_workload,
        per_device,
        overall_mpe,
        device_mean_mpe,
        scored: g.scored,
        excluded_zero: g.excluded_zero,
        predictions,
        folds,
        train_time,
        predict_median,
    })
}

/// Runs the cross-validation for every configuration.
pub fn compare_models(ds: &Dataset, configs: &[ModelConfig]) -> Result<Vec<CrossValReport>, EvalError> {
    configs.iter().map(|c| loo_by_workload(ds, c)).collect()
}

/// KNN neighbour counts swept by the evaluation harness.
pub const K_SWEEP: [usize; 4] = [1, 3, 5, 7];

/// Cross-validates KNN for each `k` and returns the lowest-MPE report.
pub fn best_knn(ds: &Dataset, base: &ModelConfig, ks: &[usize]) -> Result<CrossValReport, EvalError> {
    let mut best: Option<CrossValReport> = None;
    for &k in ks {
        let r = loo_by_workload(ds, &ModelConfig { kind: ModelKind::Knn, k, ..base.clone() })?;
        if best.as_ref().is_none_or(|b| r.overall_mpe < b.overall_mpe) {
            best = Some(r);
        }
    }
    best.ok_or(EvalError::Empty)
}

/// Median wall-clock time of `repeats` single-query predictions.
pub fn predict_latency(model: &TrainedModel, query: &FeatureVector, repeats: usize) -> Result<Duration, EvalError> {
    let mut times = Vec::with_capacity(repeats.max(1));
    for _ in 0..repeats.max(1) {
        let t = Instant::now();
        std::hint::black_box(model.predict(std::hint::black_box(query))?);
        times.push(t.elapsed());
    }
    times.sort();
    Ok(times[times.len() / 2])
}
