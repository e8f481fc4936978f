//! Turning feature vectors into numeric rows and targets into model space.

use std::fmt;
use std::str::FromStr;

use super::{Dataset, ModelError, TargetKind};
use crate::features::{select_features, FeatureSetId, FeatureVector};

/// Floor added before taking log10 of a WER target.
pub const WER_LOG_FLOOR: f64 = 1e-12;

/// How the device identity becomes numeric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DeviceEncoding {
    /// One column holding the device's index in sorted id order.
    #[default]
    Ordinal,
    /// One indicator column per device.
    OneHot,
}

impl DeviceEncoding {
    pub fn tag(self) -> u8 {
        match self {
            DeviceEncoding::Ordinal => 0,
            DeviceEncoding::OneHot => 1,
        }
    }

    pub fn from_tag(t: u8) -> Option<Self> {
        match t {
            0 => Some(DeviceEncoding::Ordinal),
            1 => Some(DeviceEncoding::OneHot),
            _ => None,
        }
    }
}

impl fmt::Display for DeviceEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DeviceEncoding::Ordinal => "ordinal",
            DeviceEncoding::OneHot => "one-hot",
        })
    }
}

impl FromStr for DeviceEncoding {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ordinal" => Ok(DeviceEncoding::Ordinal),
            "one-hot" | "onehot" => Ok(DeviceEncoding::OneHot),
            other => Err(format!("unknown device encoding `{other}`")),
        }
    }
}

/// Column layout of a model's input rows.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    pub feature_set: FeatureSetId,
    /// Feature columns, before the device columns.
    pub columns: Vec<String>,
    /// Known devices in sorted order.
    pub devices: Vec<String>,
    pub encoding: DeviceEncoding,
}

impl Design {
    pub fn for_dataset(ds: &Dataset, set: FeatureSetId, encoding: DeviceEncoding) -> Result<Design, ModelError> {
        let (first, _) = ds.samples.first().ok_or(ModelError::EmptyDataset)?;
        let columns =
            select_features(set, &first.program_feature_names()).map_err(|e| ModelError::Schema(e.to_string()))?;
        let mut devices: Vec<String> = ds.samples.iter().map(|(f, _)| f.device.clone()).collect();
        devices.sort();
        devices.dedup();
        Ok(Design { feature_set: set, columns, devices, encoding })
    }

    pub fn width(&self) -> usize {
        self.columns.len()
            + match self.encoding {
                DeviceEncoding::Ordinal => 1,
                DeviceEncoding::OneHot => self.devices.len(),
            }
    }

    /// Raw (unscaled) input row for one feature vector.
    pub fn row(&self, fv: &FeatureVector) -> Result<Vec<f64>, ModelError> {
        let mut row = Vec::with_capacity(self.width());
        for c in &self.columns {
            let v = fv.column(c).ok_or_else(|| ModelError::Schema(format!("query lacks column `{c}`")))?;
            if !v.is_finite() {
                return Err(ModelError::Invalid(format!("column `{c}` is {v}")));
            }
            row.push(v);
        }
        let idx = self.devices.binary_search(&fv.device).map_err(|_| ModelError::UnknownDevice(fv.device.clone()))?;
        match self.encoding {
            DeviceEncoding::Ordinal => row.push(idx as f64),
            DeviceEncoding::OneHot => row.extend((0..self.devices.len()).map(|i| (i == idx) as u8 as f64)),
        }
        Ok(row)
    }

    pub fn matrix(&self, ds: &Dataset) -> Result<Vec<Vec<f64>>, ModelError> {
        ds.samples.iter().map(|(f, _)| self.row(f)).collect()
    }
}

/// Target in the space models are fit in: log10 for WER, raw for P_UE.
pub fn encode_target(kind: TargetKind, y: f64) -> f64 {
    match kind {
        TargetKind::Wer => (y + WER_LOG_FLOOR).log10(),
        TargetKind::Pue => y,
    }
}

/// Back to a rate, clamped to [0, 1].
pub fn decode_target(kind: TargetKind, z: f64) -> f64 {
    let y = match kind {
        TargetKind::Wer => 10f64.powf(z) - WER_LOG_FLOOR,
        TargetKind::Pue => z,
    };
    if y.is_nan() {
        0.0
    } else {
        y.clamp(0.0, 1.0)
    }
}
