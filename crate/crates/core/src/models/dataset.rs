//! Labeled samples and their CSV form.
//!
//! Column order: `workload, device, temp, t_refp, v_dd, t_reuse, h_dp,
//! mem_accesses_per_cycle, wait_cycles_ratio, <nuisance...>, wer, p_ue`.
//! Either target column may be absent in files from other sources.

use std::collections::BTreeMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use super::ModelError;
use crate::features::{FeatureVector, ReuseTime, CORE_FEATURES};

/// Which error metric a dataset or model targets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TargetKind {
    Wer,
    Pue,
}

impl TargetKind {
    pub fn column(self) -> &'static str {
        match self {
            TargetKind::Wer => "wer",
            TargetKind::Pue => "p_ue",
        }
    }

    pub fn tag(self) -> u8 {
        match self {
            TargetKind::Wer => 0,
            TargetKind::Pue => 1,
        }
    }

    pub fn from_tag(t: u8) -> Option<Self> {
        match t {
            0 => Some(TargetKind::Wer),
            1 => Some(TargetKind::Pue),
            _ => None,
        }
    }
}

impl fmt::Display for TargetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.column())
    }
}

impl FromStr for TargetKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "wer" => Ok(TargetKind::Wer),
            "p_ue" | "pue" => Ok(TargetKind::Pue),
            other => Err(format!("unknown target `{other}` (expected wer or p_ue)")),
        }
    }
}

/// One CSV row: features plus whichever labels are known.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledRow {
    pub features: FeatureVector,
    pub wer: Option<f64>,
    pub p_ue: Option<f64>,
}

impl LabeledRow {
    pub fn target(&self, kind: TargetKind) -> Option<f64> {
        match kind {
            TargetKind::Wer => self.wer,
            TargetKind::Pue => self.p_ue,
        }
    }
}

/// Samples with one target, grouped by workload for leave-one-out folds.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub samples: Vec<(FeatureVector, f64)>,
    pub target: TargetKind,
}

impl Dataset {
    /// Validates schema and target ranges.
    pub fn new(samples: Vec<(FeatureVector, f64)>, target: TargetKind) -> Result<Dataset, ModelError> {
        if let Some((first, _)) = samples.first() {
            let schema = first.program_feature_names();
            for (i, (fv, y)) in samples.iter().enumerate() {
                if fv.program_feature_names() != schema {
                    return Err(ModelError::Schema(format!("sample {i} has a different column set")));
                }
                let ok = y.is_finite() && *y >= 0.0 && *y <= 1.0;
                if !ok {
                    return Err(ModelError::Invalid(format!("sample {i}: {target} target {y} outside [0, 1]")));
                }
            }
        }
        Ok(Dataset { samples, target })
    }

    pub fn from_rows(rows: &[LabeledRow], target: TargetKind) -> Result<Dataset, ModelError> {
        let samples = rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                r.target(target)
                    .map(|y| (r.features.clone(), y))
                    .ok_or_else(|| ModelError::Schema(format!("row {i} lacks a `{target}` value")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Dataset::new(samples, target)
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn targets(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.1).collect()
    }

    /// Sample indices per workload, in name order.
    pub fn workload_index(&self) -> BTreeMap<String, Vec<usize>> {
        let mut m: BTreeMap<String, Vec<usize>> = BTreeMap::new();
        for (i, (fv, _)) in self.samples.iter().enumerate() {
            m.entry(fv.workload.clone()).or_default().push(i);
        }
        m
    }

    /// Subset by sample index, preserving order.
    pub fn subset(&self, idx: &[usize]) -> Dataset {
        Dataset { samples: idx.iter().map(|&i| self.samples[i].clone()).collect(), target: self.target }
    }
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Writes rows as CSV; all rows must share the first row's nuisance columns.
pub fn write_dataset_csv<W: Write>(rows: &[LabeledRow], sink: W) -> Result<(), ModelError> {
    let mut w = csv::Writer::from_writer(sink);
    let nuisance: Vec<String> =
        rows.first().map(|r| r.features.nuisance.iter().map(|(n, _)| n.clone()).collect()).unwrap_or_default();
    let mut header: Vec<String> =
        ["workload", "device", "temp", "t_refp", "v_dd"].iter().map(|s| s.to_string()).collect();
    header.extend(CORE_FEATURES.iter().map(|s| s.to_string()));
    header.extend(nuisance.iter().cloned());
    header.push("wer".into());
    header.push("p_ue".into());
    w.write_record(&header)?;
    for (i, r) in rows.iter().enumerate() {
        let f = &r.features;
        if f.nuisance.len() != nuisance.len() || f.nuisance.iter().zip(&nuisance).any(|((a, _), b)| a != b) {
            return Err(ModelError::Schema(format!("row {i} nuisance columns differ from the header")));
        }
        let mut rec = vec![
            f.workload.clone(),
            f.device.clone(),
            f.temp.to_string(),
            f.t_refp.to_string(),
            f.v_dd.to_string(),
            f.t_reuse.to_string(),
            f.h_dp.to_string(),
            f.mem_accesses_per_cycle.to_string(),
            f.wait_cycles_ratio.to_string(),
        ];
        rec.extend(f.nuisance.iter().map(|(_, v)| v.to_string()));
        rec.push(fmt_opt(r.wer));
        rec.push(fmt_opt(r.p_ue));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_dataset_csv<R: Read>(source: R) -> Result<Vec<LabeledRow>, ModelError> {
    let mut rdr = csv::Reader::from_reader(source);
    let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    let pos = |name: &str| header.iter().position(|h| h == name);
    let need = |name: &str| pos(name).ok_or_else(|| ModelError::Schema(format!("missing column `{name}`")));
    let fixed = ["workload", "device", "temp", "t_refp", "v_dd"];
    let mut idx = Vec::new();
    for name in fixed.iter().chain(CORE_FEATURES.iter()) {
        idx.push(need(name)?);
    }
    let wer_col = pos("wer");
    let pue_col = pos("p_ue");
    let known: Vec<usize> = idx.iter().copied().chain(wer_col).chain(pue_col).collect();
    let nuisance_cols: Vec<usize> = (0..header.len()).filter(|i| !known.contains(i)).collect();

    let mut rows = Vec::new();
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let raw = |i: usize| rec.get(i).unwrap_or("");
        let cell = |i: usize| raw(i).trim();
        let num = |i: usize| -> Result<f64, ModelError> {
            cell(i).parse::<f64>().map_err(|_| {
                ModelError::Schema(format!("row {}: column `{}` has non-numeric `{}`", line + 1, header[i], cell(i)))
            })
        };
        let opt = |col: Option<usize>| -> Result<Option<f64>, ModelError> {
            match col {
                Some(i) if !cell(i).is_empty() => num(i).map(Some),
                _ => Ok(None),
            }
        };
        let t_reuse: ReuseTime =
            cell(idx[5]).parse().map_err(|e: String| ModelError::Schema(format!("row {}: {e}", line + 1)))?;
        let features = FeatureVector {
            workload: raw(idx[0]).to_string(),
            device: raw(idx[1]).to_string(),
            temp: num(idx[2])?,
            t_refp: num(idx[3])?,
            v_dd: num(idx[4])?,
            t_reuse,
            h_dp: num(idx[6])?,
            mem_accesses_per_cycle: num(idx[7])?,
            wait_cycles_ratio: num(idx[8])?,
            nuisance: nuisance_cols
                .iter()
                .map(|&i| Ok((header[i].clone(), num(i)?)))
                .collect::<Result<_, ModelError>>()?,
        };
        rows.push(LabeledRow { features, wer: opt(wer_col)?, p_ue: opt(pue_col)? });
    }
    Ok(rows)
}
