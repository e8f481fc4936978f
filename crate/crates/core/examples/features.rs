//! Profiles three contrasting workloads and prints their program features:
//! reuse time, data-pattern entropy, access rate and wait-cycle ratio, then
//! a few of the auxiliary trace statistics.
//!
//!     cargo run --example features

use dram_oracle::dramsim::EnvPoint;
use dram_oracle::features::{extract_features, FeatureConfig};
use dram_oracle::trace::{generate_trace, ReuseProfile, WorkloadSpec};
use dram_oracle::Geometry;

fn spec(name: &str, profile: ReuseProfile, rate: f64, alphabet: u32) -> WorkloadSpec {
    WorkloadSpec {
        name: name.into(),
        n_instructions: 2_000_000,
        footprint_words: 4096,
        target_access_rate: rate,
        cpi: 1.0,
        write_fraction: 0.4,
        value_alphabet_size: alphabet,
        reuse_profile: profile,
        threads: 1,
        seed: 3,
    }
}

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let geometry = Geometry::new(128, 64);
    let cfg = FeatureConfig { geometry, ..FeatureConfig::default() };
    let env = EnvPoint::new(1.173, 1.428, 60.0);
    let workloads = [
        spec("hot_zipf", ReuseProfile::Zipfian(1.3), 0.02, 4),
        spec("uniform", ReuseProfile::Uniform, 0.02, 4096),
        spec("stream", ReuseProfile::Streaming, 0.005, 256),
    ];
    println!("{:<10} {:>24} {:>7} {:>10} {:>8}", "workload", "t_reuse", "h_dp", "rate", "wait");
    for w in &workloads {
        let trace = generate_trace(w, geometry.capacity_words())?;
        let f = extract_features(&trace, &env, "dimm0/rank0", &cfg)?;
        println!(
            "{:<10} {:>24} {:>7.3} {:>10.2e} {:>8.4}",
            f.workload,
            f.t_reuse.to_string(),
            f.h_dp,
            f.mem_accesses_per_cycle,
            f.wait_cycles_ratio
        );
        for (name, v) in f.nuisance.iter().filter(|(n, _)| n.starts_with("top") || n == "sequential_fraction") {
            println!("    {name:<22} {v:.4}");
        }
    }
    Ok(())
}
