//! Spearman ranking of every program feature against WER, then the
//! feature-set columns the ranking motivates.
//!
//!     cargo run --release --example correlate [dataset.csv]

use std::fs::File;

use dram_oracle::dramsim::SimConfig;
use dram_oracle::eval::select_features;
use dram_oracle::features::{rank_features, FeatureConfig, FeatureSetId, FeatureVector};
use dram_oracle::models::{read_dataset_csv, Dataset, LabeledRow, TargetKind};
use dram_oracle::pipeline::{build_dataset, Grid};
use dram_oracle::suite::{default_devices, default_workloads};

fn small_dataset() -> Result<Vec<LabeledRow>, Box<dyn std::error::Error>> {
    let sim = SimConfig::default();
    let feat = FeatureConfig { f_clk: sim.f_clk, geometry: sim.geometry, ..FeatureConfig::default() };
    let devices: Vec<_> = default_devices().iter().map(|d| d.build(&sim)).collect::<Result<_, _>>()?;
    let workloads: Vec<_> =
        default_workloads(&sim).into_iter().filter(|w| w.threads > 1 && w.target_access_rate < 1e-3).collect();
    let grid = Grid { temps: vec![70.0], n_exp: 3, ..Grid::default() };
    Ok(build_dataset(&workloads, &devices, &grid, &sim, &feat)?.rows)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rows = match std::env::args().nth(1) {
        Some(p) => read_dataset_csv(File::open(p)?)?,
        None => small_dataset()?,
    };
    let ds = Dataset::from_rows(&rows, TargetKind::Wer)?;
    let samples: Vec<FeatureVector> = ds.samples.iter().map(|(f, _)| f.clone()).collect();
    let ranked = rank_features(&samples, &ds.targets())?;
    println!("{} samples; features by |r_s| with WER:", ds.len());
    for (name, r) in &ranked {
        println!("  {name:<26} {r:+.3}");
    }
    let schema = samples[0].program_feature_names();
    for set in FeatureSetId::ALL {
        println!(
            "{set}: {} columns {:?}",
            select_features(set, &schema)?.len(),
            select_features(set, &schema)?.iter().take(6).collect::<Vec<_>>()
        );
    }
    Ok(())
}
