//! Profiling then characterization: turns traces into labeled dataset rows
//! over a (device × temperature × refresh period) grid.

use thiserror::Error;

use crate::dramsim::{
    measure_wer, pue_from_outcomes, run_seeds, simulate_usage, DimmProfile, EnvPoint, SimConfig, SimError, TraceUsage,
};
use crate::features::{extract_features, FeatureConfig, FeatureError};
use crate::models::{LabeledRow, ModelError};
use crate::suite::{DEFAULT_TEMPS, DEFAULT_T_REFP, DEFAULT_V_DD};
use crate::trace::{generate_trace, MemoryTrace, TraceError, WorkloadSpec};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Trace(#[from] TraceError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Operating points to characterize and the repetition protocol.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    pub t_refp: Vec<f64>,
    pub temps: Vec<f64>,
    pub v_dd: f64,
    pub n_exp: u32,
    pub seed: u64,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { t_refp: DEFAULT_T_REFP.to_vec(), temps: DEFAULT_TEMPS.to_vec(), v_dd: DEFAULT_V_DD, n_exp: 10, seed: 1 }
    }
}

impl Grid {
    /// Environment points in row order: temperature-major, then refresh period.
    pub fn points(&self) -> Vec<EnvPoint> {
        self.temps
            .iter()
            .flat_map(|&temp| self.t_refp.iter().map(move |&t| EnvPoint::new(t, self.v_dd, temp)))
            .collect()
    }
}

/// P_UE of the whole machine (all devices together) for one workload and point.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemPue {
    pub workload: String,
    pub env: EnvPoint,
    pub p_ue: f64,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Labeled {
    pub rows: Vec<LabeledRow>,
    pub system: Vec<SystemPue>,
}

impl Labeled {
    pub fn extend(&mut self, other: Labeled) {
        self.rows.extend(other.rows);
        self.system.extend(other.system);
    }
}

/// Labels one trace on every device and grid point. WER is the mean over
/// the `n_exp` runs; per-device and machine-level P_UE come from the same runs.
/// Run seeds derive from the grid seed alone, so repetition `i` draws the
/// same retention noise for every workload, device and operating point.
pub fn label_trace(
    trace: &MemoryTrace,
    devices: &[DimmProfile],
    grid: &Grid,
    sim: &SimConfig,
    feat: &FeatureConfig,
) -> Result<Labeled, PipelineError> {
    if grid.n_exp == 0 {
        return Err(SimError::ZeroExperiments.into());
    }
    let usage = TraceUsage::from_trace(trace, sim)?;
    let points = grid.points();
    let base = extract_features(trace, points.first().unwrap_or(&EnvPoint::default()), "", feat)?;
    let seeds = run_seeds(grid.seed, grid.n_exp);

    // One thread per device; each walks every point with the shared usage.
    let per_device: Vec<Vec<(f64, f64, Vec<bool>)>> = std::thread::scope(|scope| {
        let handles: Vec<_> = devices
            .iter()
            .map(|d| {
                let (usage, points, seeds) = (&usage, &points, &seeds);
                scope.spawn(move || -> Result<Vec<(f64, f64, Vec<bool>)>, SimError> {
                    points
                        .iter()
                        .map(|env| {
                            let outcomes = seeds
                                .iter()
                                .map(|&s| simulate_usage(usage, d, env, s, sim))
                                .collect::<Result<Vec<_>, _>>()?;
                            let mut wer = 0.0;
                            for o in &outcomes {
                                wer += measure_wer(o)?;
                            }
                            let failed = outcomes.iter().map(|o| o.has_uncorrectable()).collect();
                            Ok((wer / outcomes.len() as f64, pue_from_outcomes(&outcomes)?, failed))
                        })
                        .collect()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("device worker panicked")).collect::<Result<_, _>>()
    })?;

    let mut out = Labeled::default();
    for (p, env) in points.iter().enumerate() {
        let mut machine_failed = vec![false; seeds.len()];
        for (d, cells) in devices.iter().zip(&per_device) {
            let (wer, p_ue, failed) = &cells[p];
            for (m, f) in machine_failed.iter_mut().zip(failed) {
                *m |= f;
            }
            out.rows.push(LabeledRow {
                features: base.with_env(&d.device_id, env.temp, env.t_refp, env.v_dd),
                wer: Some(*wer),
                p_ue: Some(*p_ue),
            });
        }
        let failed = machine_failed.iter().filter(|&&f| f).count();
        out.system.push(SystemPue {
            workload: trace.spec.name.clone(),
            env: *env,
            p_ue: failed as f64 / seeds.len() as f64,
        });
    }
    Ok(out)
}

/// Generates each workload's trace, labels it, and drops it before the next.
pub fn build_dataset(
    workloads: &[WorkloadSpec],
    devices: &[DimmProfile],
    grid: &Grid,
    sim: &SimConfig,
    feat: &FeatureConfig,
) -> Result<Labeled, PipelineError> {
    let mut all = Labeled::default();
    for spec in workloads {
        let trace = generate_trace(spec, sim.geometry.capacity_words())?;
        all.extend(label_trace(&trace, devices, grid, sim, feat)?);
    }
    Ok(all)
}
