use std::fmt;
use std::str::FromStr;

use super::baseline::Baseline;
use super::design::{decode_target, encode_target, Design, DeviceEncoding};
use super::knn::Knn;
use super::rdf::{Forest, RdfParams};
use super::scaler::Scaler;
use super::svr::{Svr, SvrParams};
use super::{Dataset, ModelError, TargetKind};
use crate::features::{FeatureSetId, FeatureVector};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelKind {
    Knn,
    Rdf,
    Svr,
    Baseline,
}

impl ModelKind {
    pub const ALL: [ModelKind; 4] = [ModelKind::Knn, ModelKind::Rdf, ModelKind::Svr, ModelKind::Baseline];

    pub fn tag(self) -> u8 {
        match self {
            ModelKind::Knn => 0,
            ModelKind::Rdf => 1,
            ModelKind::Svr => 2,
            ModelKind::Baseline => 3,
        }
    }

    pub fn from_tag(t: u8) -> Option<Self> {
        ModelKind::ALL.into_iter().find(|k| k.tag() == t)
    }
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.pad(match self {
            ModelKind::Knn => "knn",
            ModelKind::Rdf => "rdf",
            ModelKind::Svr => "svr",
            ModelKind::Baseline => "baseline",
        })
    }
}

impl FromStr for ModelKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "knn" => Ok(ModelKind::Knn),
            "rdf" | "rf" => Ok(ModelKind::Rdf),
            "svr" | "svm" => Ok(ModelKind::Svr),
            "baseline" => Ok(ModelKind::Baseline),
            other => Err(format!("unknown model `{other}` (expected knn, rdf, svr or baseline)")),
        }
    }
}

/// Everything needed to train one model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub kind: ModelKind,
    pub feature_set: FeatureSetId,
    pub encoding: DeviceEncoding,
    pub k: usize,
    pub rdf: RdfParams,
    pub svr: SvrParams,
}

impl Default for ModelConfig {
    fn default() -> Self {
        ModelConfig {
            kind: ModelKind::Knn,
            feature_set: FeatureSetId::Set1,
            encoding: DeviceEncoding::Ordinal,
            k: 5,
            rdf: RdfParams::default(),
            svr: SvrParams::default(),
        }
    }
}

impl ModelConfig {
    pub fn new(kind: ModelKind, feature_set: FeatureSetId) -> Self {
        ModelConfig { kind, feature_set, ..ModelConfig::default() }
    }

    /// Short label such as `knn/set1/k=5`.
    pub fn label(&self) -> String {
        match self.kind {
            ModelKind::Knn => format!("knn/{}/k={}", self.feature_set, self.k),
            ModelKind::Baseline => "baseline".to_string(),
            k => format!("{k}/{}", self.feature_set),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Params {
    Knn(Knn),
    Rdf(Forest),
    Svr(Svr),
    Baseline(Baseline),
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    pub target: TargetKind,
    pub design: Design,
    pub scaler: Scaler,
    pub params: Params,
}

impl TrainedModel {
    pub fn kind(&self) -> ModelKind {
        match self.params {
            Params::Knn(_) => ModelKind::Knn,
            Params::Rdf(_) => ModelKind::Rdf,
            Params::Svr(_) => ModelKind::Svr,
            Params::Baseline(_) => ModelKind::Baseline,
        }
    }

    pub fn feature_set(&self) -> FeatureSetId {
        self.design.feature_set
    }

    /// Prediction in model space (log10 WER or raw P_UE).
    pub fn predict_raw(&self, fv: &FeatureVector) -> Result<f64, ModelError> {
        if let Params::Baseline(b) = &self.params {
            return b.predict(&fv.device, fv.t_refp, fv.temp);
        }
        let x = self.scaler.scale(&self.design.row(fv)?);
        Ok(match &self.params {
            Params::Knn(m) => m.predict(&x),
            Params::Rdf(m) => m.predict(&x),
            Params::Svr(m) => m.predict(&x),
            Params::Baseline(_) => unreachable!(),
        })
    }

    /// Predicted WER or P_UE, within [0, 1].
    pub fn predict(&self, fv: &FeatureVector) -> Result<f64, ModelError> {
        Ok(decode_target(self.target, self.predict_raw(fv)?))
    }
}

/// Standardized design matrix of `ds` under a feature set, with its scaler.
pub fn standardize(
    ds: &Dataset,
    set: FeatureSetId,
    encoding: DeviceEncoding,
) -> Result<(Design, Scaler, Vec<Vec<f64>>), ModelError> {
    let design = Design::for_dataset(ds, set, encoding)?;
    let raw = design.matrix(ds)?;
    let scaler = Scaler::fit(&raw)?;
    let scaled = raw.iter().map(|r| scaler.scale(r)).collect();
    Ok((design, scaler, scaled))
}

pub fn train(ds: &Dataset, cfg: &ModelConfig) -> Result<TrainedModel, ModelError> {
    if ds.is_empty() {
        return Err(ModelError::EmptyDataset);
    }
    let z: Vec<f64> = ds.samples.iter().map(|(_, y)| encode_target(ds.target, *y)).collect();
    if cfg.kind == ModelKind::Baseline {
        let design = Design::for_dataset(ds, cfg.feature_set, cfg.encoding)?;
        let b = Baseline::fit(ds.samples.iter().zip(&z).map(|((f, _), z)| (f.device.as_str(), f.t_refp, f.temp, *z)))?;
        let scaler = Scaler::identity(0);
        return Ok(TrainedModel { target: ds.target, design, scaler, params: Params::Baseline(b) });
    }
    let (design, scaler, x) = standardize(ds, cfg.feature_set, cfg.encoding)?;
    let params = match cfg.kind {
        ModelKind::Knn => Params::Knn(Knn::fit(x, z, cfg.k)?),
        ModelKind::Rdf => Params::Rdf(Forest::fit(&x, &z, &cfg.rdf)?),
        ModelKind::Svr => Params::Svr(Svr::fit(&x, &z, &cfg.svr)?),
        ModelKind::Baseline => unreachable!(),
    };
    Ok(TrainedModel { target: ds.target, design, scaler, params })
}

pub fn train_knn(ds: &Dataset, set: FeatureSetId, k: usize) -> Result<TrainedModel, ModelError> {
    train(ds, &ModelConfig { k, ..ModelConfig::new(ModelKind::Knn, set) })
}

pub fn train_rdf(ds: &Dataset, set: FeatureSetId, params: RdfParams) -> Result<TrainedModel, ModelError> {
    train(ds, &ModelConfig { rdf: params, ..ModelConfig::new(ModelKind::Rdf, set) })
}

pub fn train_svr(ds: &Dataset, set: FeatureSetId, params: SvrParams) -> Result<TrainedModel, ModelError> {
    train(ds, &ModelConfig { svr: params, ..ModelConfig::new(ModelKind::Svr, set) })
}

pub fn train_baseline(ds: &Dataset) -> Result<TrainedModel, ModelError> {
    train(ds, &ModelConfig::new(ModelKind::Baseline, FeatureSetId::Set1))
}
