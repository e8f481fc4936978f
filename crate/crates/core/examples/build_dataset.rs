//! Labels four suite workloads on two devices over a reduced grid and
//! writes the dataset CSV that `train`, `correlate` and `crossval` read.
//!
//!     cargo run --release --example build_dataset [out.csv]

use std::fs::File;

use dram_oracle::dramsim::SimConfig;
use dram_oracle::features::FeatureConfig;
use dram_oracle::models::write_dataset_csv;
use dram_oracle::pipeline::{build_dataset, Grid};
use dram_oracle::suite::{default_devices, default_workloads};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("dataset.csv"));
    let sim = SimConfig::default();
    let feat = FeatureConfig { f_clk: sim.f_clk, geometry: sim.geometry, ..FeatureConfig::default() };
    let devices: Vec<_> = default_devices().iter().step_by(3).map(|d| d.build(&sim)).collect::<Result<_, _>>()?;
    let names = ["nw", "kmeans", "fmm", "bfs"];
    let workloads: Vec<_> = default_workloads(&sim).into_iter().filter(|w| names.contains(&w.name.as_str())).collect();
    let grid = Grid { t_refp: vec![1.173, 2.283], temps: vec![60.0, 70.0], n_exp: 4, ..Grid::default() };

    let labeled = build_dataset(&workloads, &devices, &grid, &sim, &feat)?;
    write_dataset_csv(&labeled.rows, File::create(&path)?)?;
    println!("{} rows -> {}", labeled.rows.len(), path.display());
    for r in labeled.rows.iter().filter(|r| r.features.temp == 70.0) {
        let f = &r.features;
        println!(
            "  {:<7} {:<12} {:.3} s  WER {:.3e}  P_UE {:.2}",
            f.workload,
            f.device,
            f.t_refp,
            r.wer.unwrap_or(0.0),
            r.p_ue.unwrap_or(0.0)
        );
    }
    for s in &labeled.system {
        println!("  machine P_UE {:<7} {}  {:.2}", s.workload, s.env, s.p_ue);
    }
    Ok(())
}
