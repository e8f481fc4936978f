//! Leave-one-workload-out comparison of KNN, RDF, SVR and the
//! workload-unaware baseline on the three feature sets, with CSV and SVG
//! reports written next to the dataset.
//!
//!     cargo run --release --example crossval [dataset.csv] [out_dir]

use std::fs::File;
use std::path::PathBuf;

use dram_oracle::dramsim::SimConfig;
use dram_oracle::eval::{best_knn, compare_models, summary, svg, write_comparison_csv, write_report_csv, K_SWEEP};
use dram_oracle::features::{FeatureConfig, FeatureSetId};
use dram_oracle::models::{read_dataset_csv, Dataset, LabeledRow, ModelConfig, ModelKind, TargetKind};
use dram_oracle::pipeline::{build_dataset, Grid};
use dram_oracle::suite::{default_devices, default_workloads};

fn small_dataset() -> Result<Vec<LabeledRow>, Box<dyn std::error::Error>> {
    let sim = SimConfig::default();
    let feat = FeatureConfig { f_clk: sim.f_clk, geometry: sim.geometry, ..FeatureConfig::default() };
    let devices: Vec<_> = default_devices().iter().map(|d| d.build(&sim)).collect::<Result<_, _>>()?;
    let workloads: Vec<_> = default_workloads(&sim).into_iter().filter(|w| w.target_access_rate < 1e-3).collect();
    let grid = Grid { temps: vec![60.0, 70.0], n_exp: 3, ..Grid::default() };
    Ok(build_dataset(&workloads, &devices, &grid, &sim, &feat)?.rows)
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let rows = match args.next() {
        Some(p) => read_dataset_csv(File::open(p)?)?,
        None => small_dataset()?,
    };
    let out: PathBuf = args.next().map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("crossval"));
    std::fs::create_dir_all(&out)?;
    let ds = Dataset::from_rows(&rows, TargetKind::Wer)?;

    let mut reports = Vec::new();
    for set in FeatureSetId::ALL {
        reports.push(best_knn(&ds, &ModelConfig::new(ModelKind::Knn, set), &K_SWEEP)?);
        let others = [ModelKind::Rdf, ModelKind::Svr].map(|k| ModelConfig::new(k, set));
        reports.extend(compare_models(&ds, &others)?);
    }
    reports.extend(compare_models(&ds, &[ModelConfig::new(ModelKind::Baseline, FeatureSetId::Set1)])?);
    for r in &reports {
        print!("{}", summary(r));
    }

    write_report_csv(&reports, File::create(out.join("report.csv"))?)?;
    write_comparison_csv(&reports, File::create(out.join("comparison.csv"))?)?;
    let bars: Vec<(String, f64)> = reports.iter().map(|r| (r.label.clone(), r.overall_mpe)).collect();
    std::fs::write(out.join("models.svg"), svg::bar_chart("MPE of WER estimates", "MPE (%)", &bars))?;
    println!("reports in {}", out.display());
    Ok(())
}
