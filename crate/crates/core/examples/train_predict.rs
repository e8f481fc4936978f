//! Trains each model kind on a labeled dataset, saves and reloads it, and
//! predicts WER for a workload the models never saw.
//!
//!     cargo run --release --example train_predict

use std::io::Cursor;

use dram_oracle::dramsim::{EnvPoint, SimConfig};
use dram_oracle::eval::predict_latency;
use dram_oracle::features::{extract_features, FeatureConfig, FeatureSetId};
use dram_oracle::models::{load_model, save_model, train, Dataset, ModelConfig, ModelKind, TargetKind};
use dram_oracle::pipeline::{build_dataset, label_trace, Grid};
use dram_oracle::suite::{default_devices, default_workloads};
use dram_oracle::trace::generate_trace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sim = SimConfig::default();
    let feat = FeatureConfig { f_clk: sim.f_clk, geometry: sim.geometry, ..FeatureConfig::default() };
    let devices: Vec<_> = default_devices().iter().map(|d| d.build(&sim)).collect::<Result<_, _>>()?;
    let mut workloads = default_workloads(&sim);
    workloads.retain(|w| w.target_access_rate < 1e-3);
    let held_out = workloads.pop().expect("suite is not empty");
    let grid = Grid { temps: vec![60.0, 70.0], n_exp: 3, ..Grid::default() };

    let labeled = build_dataset(&workloads, &devices, &grid, &sim, &feat)?;
    let ds = Dataset::from_rows(&labeled.rows, TargetKind::Wer)?;
    println!("trained on {} samples from {} workloads; held out {}", ds.len(), workloads.len(), held_out.name);

    let trace = generate_trace(&held_out, sim.geometry.capacity_words())?;
    let truth = label_trace(&trace, &devices, &grid, &sim, &feat)?;
    let env = EnvPoint::new(2.283, 1.428, 70.0);
    let query = extract_features(&trace, &env, &devices[0].device_id, &feat)?;
    let actual = truth
        .rows
        .iter()
        .find(|r| r.features.device == query.device && r.features.t_refp == env.t_refp && r.features.temp == env.temp)
        .and_then(|r| r.wer)
        .unwrap_or(0.0);
    println!("query {} on {} at {env}: simulated WER {actual:.3e}", query.workload, query.device);

    for kind in ModelKind::ALL {
        let model = train(&ds, &ModelConfig::new(kind, FeatureSetId::Set1))?;
        let mut buf = Vec::new();
        let bytes = save_model(&model, &mut buf)?;
        let model = load_model(Cursor::new(buf))?;
        let p = model.predict(&query)?;
        let latency = predict_latency(&model, &query, 50)?;
        println!("  {kind:<8} predicted {p:.3e}  ({bytes} bytes, {latency:.1?} per query)");
    }
    Ok(())
}
