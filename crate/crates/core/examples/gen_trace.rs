//! Generates a small Zipfian trace, writes it as a DOTR file, reads it back
//! and prints its basic statistics.
//!
//!     cargo run --example gen_trace [out.dotr]

use std::fs::File;
use std::io::{BufReader, BufWriter};

use dram_oracle::trace::{generate_trace, read_trace, trace_stats, write_trace, ReuseProfile, WorkloadSpec};
use dram_oracle::Geometry;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let path = std::env::args().nth(1).map(Into::into).unwrap_or_else(|| std::env::temp_dir().join("toy.dotr"));
    let geometry = Geometry::new(64, 64);
    let spec = WorkloadSpec {
        name: "toy".into(),
        n_instructions: 200_000,
        footprint_words: 2048,
        target_access_rate: 0.05,
        cpi: 1.2,
        write_fraction: 0.3,
        value_alphabet_size: 16,
        reuse_profile: ReuseProfile::Zipfian(1.1),
        threads: 2,
        seed: 7,
    };
    let trace = generate_trace(&spec, geometry.capacity_words())?;
    let bytes = write_trace(&trace, BufWriter::new(File::create(&path)?))?;
    println!("wrote {} accesses ({bytes} bytes) to {}", trace.len(), path.display());

    let back = read_trace(BufReader::new(File::open(&path)?))?;
    assert_eq!(back, trace);
    let s = trace_stats(&back, Some(&geometry));
    println!("reads {}  writes {}  distinct words {}", s.reads, s.writes, s.distinct_words);
    let rows = s.row_counts.unwrap_or_default();
    let busiest = rows.iter().enumerate().max_by_key(|(_, c)| **c).map(|(r, c)| (r, *c));
    println!("busiest row {busiest:?} of {}", rows.len());
    println!("first accesses:");
    for a in back.accesses.iter().take(5) {
        println!("  instr {:>6}  addr {:#08x}  {:?}", a.instr_index, a.address, a.kind);
    }
    Ok(())
}
