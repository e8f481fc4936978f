//! Builds a simulated DIMM, runs one workload on it across refresh periods
//! and temperatures, and prints WER and P_UE. The device profile is saved
//! and reloaded to show the DODM format.
//!
//!     cargo run --release --example simulate

use std::io::Cursor;

use dram_oracle::dramsim::{
    build_dimm, estimate_pue, measure_wer, read_dimm, run_seeds, simulate_usage, write_dimm, EnvPoint, SimConfig,
    TraceUsage,
};
use dram_oracle::suite::default_workloads;
use dram_oracle::trace::generate_trace;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let sim = SimConfig::default();
    let dimm = build_dimm(&sim, "dimm0/rank0", 0xD1A0_0000, 0.0)?;
    let mut buf = Vec::new();
    write_dimm(&dimm, &mut buf)?;
    let dimm = read_dimm(Cursor::new(buf))?;
    println!("{}: {} weak cells in {} words", dimm.device_id, dimm.weak_cells.len(), dimm.capacity_words());

    let spec = default_workloads(&sim).into_iter().find(|w| w.name == "kmeans").expect("suite workload");
    let trace = generate_trace(&spec, sim.geometry.capacity_words())?;
    let usage = TraceUsage::from_trace(&trace, &sim)?;
    println!(
        "{}: {} accesses, {:.1}% of words in disturbed rows",
        spec.name,
        trace.len(),
        100.0 * usage.disturbed_fraction()
    );

    let seeds = run_seeds(1, 5);
    for temp in [50.0, 60.0, 70.0] {
        for t_refp in [0.618, 1.173, 1.727, 2.283] {
            let env = EnvPoint::new(t_refp, 1.428, temp);
            let mut wer = 0.0;
            for &s in &seeds {
                wer += measure_wer(&simulate_usage(&usage, &dimm, &env, s, &sim)?)?;
            }
            let p_ue = estimate_pue(&trace, &dimm, &env, seeds.len() as u32, 1, &sim)?;
            println!("  {temp} °C  {t_refp:.3} s  WER {:.3e}  P_UE {p_ue:.1}", wer / seeds.len() as f64);
        }
    }
    Ok(())
}
