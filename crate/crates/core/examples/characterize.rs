//! The full default study: 13 workloads on 4 devices over the refresh and
//! temperature grid. Prints the WER trend, workload and device spreads,
//! machine P_UE, feature correlations and the model comparison.
//! An optional argument names a simulator config file.
//!
//!     cargo run --release --example characterize [sim.conf]

use std::time::Instant;

use dram_oracle::dramsim::SimConfig;
use dram_oracle::eval::{best_knn, loo_by_workload, trends, K_SWEEP};
use dram_oracle::features::{spearman, FeatureConfig, FeatureSetId};
use dram_oracle::models::{Dataset, ModelConfig, ModelKind, TargetKind};
use dram_oracle::pipeline::{build_dataset, Grid};
use dram_oracle::suite::{default_devices, default_workloads};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sim = match std::env::args().nth(1) {
        Some(path) => SimConfig::from_kv_text(&std::fs::read_to_string(path)?)?,
        None => SimConfig::default(),
    };
    let feat = FeatureConfig { f_clk: sim.f_clk, geometry: sim.geometry, ..FeatureConfig::default() };
    let devices = default_devices().iter().map(|d| d.build(&sim)).collect::<Result<Vec<_>, _>>()?;
    for d in &devices {
        println!("{}: {} weak cells", d.device_id, d.weak_cells.len());
    }
    let workloads = default_workloads(&sim);
    let grid = Grid { n_exp: sim.n_exp, ..Grid::default() };

    let start = Instant::now();
    let labeled = build_dataset(&workloads, &devices, &grid, &sim, &feat)?;
    println!("grid: {} rows in {:.1?}", labeled.rows.len(), start.elapsed());

    println!("\nmean WER by refresh period");
    let means = trends::mean_wer_by_t_refp(&labeled.rows);
    for (t, m) in &means {
        println!("  {t:.3} s  {m:.3e}");
    }
    println!("  log-linear R² {:.4}", trends::log_linear_r2(&means).unwrap_or(f64::NAN));

    let weakest = &devices[0].device_id;
    let t_max = grid.t_refp[grid.t_refp.len() - 1];
    println!("\nworkload spread on {weakest} (max/min WER)");
    for &temp in &grid.temps {
        for &t in &grid.t_refp {
            if let Some((hi, h, lo, l)) = trends::workload_extremes(&labeled.rows, weakest, t, temp) {
                println!("  {temp} °C {t:.3} s  {:>6.2}  ({hi} / {lo})", h / l);
            }
        }
    }
    println!("\ndevice spread at {t_max} s");
    for &temp in &grid.temps {
        println!("  {temp} °C  {:.1}", trends::device_spread(&labeled.rows, t_max, temp).unwrap_or(f64::NAN));
    }

    let extra = Grid { t_refp: vec![1.45], temps: vec![70.0], ..grid.clone() };
    let mid = build_dataset(&workloads, &devices, &extra, &sim, &feat)?;
    let below_70 = labeled.system.iter().filter(|s| s.env.temp < 70.0 && s.p_ue > 0.0).count();
    println!("\nmachine P_UE at 70 °C ({below_70} workload/points fail below 70 °C)");
    let columns = [
        (1.45, trends::system_pue_at(&mid.system, 1.45, 70.0)),
        (1.727, trends::system_pue_at(&labeled.system, 1.727, 70.0)),
        (t_max, trends::system_pue_at(&labeled.system, t_max, 70.0)),
    ];
    for (i, (w, _)) in columns[0].1.iter().enumerate() {
        let cells: Vec<String> = columns.iter().map(|(t, c)| format!("{t} s {:.1}", c[i].1)).collect();
        println!("  {w:<13} {}", cells.join("  "));
    }
    for (t, c) in &columns {
        println!("  mean at {t} s: {:.3}", c.iter().map(|x| x.1).sum::<f64>() / c.len() as f64);
    }

    println!("\nSpearman r with WER");
    let wer: Vec<f64> = labeled.rows.iter().map(|r| r.wer.unwrap_or(0.0)).collect();
    for name in ["mem_accesses_per_cycle", "wait_cycles_ratio", "h_dp", "t_reuse"] {
        let xs: Vec<f64> = labeled.rows.iter().filter_map(|r| r.features.column(name)).collect();
        println!("  {name:<24} {:+.3}", spearman(&xs, &wer)?);
    }

    println!("\nleave-one-workload-out MPE of WER estimates");
    let ds = Dataset::from_rows(&labeled.rows, TargetKind::Wer)?;
    for set in FeatureSetId::ALL {
        let knn = best_knn(&ds, &ModelConfig::new(ModelKind::Knn, set), &K_SWEEP)?;
        let rdf = loo_by_workload(&ds, &ModelConfig::new(ModelKind::Rdf, set))?;
        let svr = loo_by_workload(&ds, &ModelConfig::new(ModelKind::Svr, set))?;
        println!(
            "  {set}  {:<16} {:>7.2}%   rdf {:>7.2}%   svr {:>7.2}%",
            knn.label, knn.overall_mpe, rdf.overall_mpe, svr.overall_mpe
        );
    }
    let b = loo_by_workload(&ds, &ModelConfig::new(ModelKind::Baseline, FeatureSetId::Set1))?;
    println!("  baseline {:.2}%", b.overall_mpe);
    Ok(())
}
