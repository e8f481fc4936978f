use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Zipf};

use super::{MemoryAccess, MemoryTrace, ReuseProfile, TraceError, WorkloadSpec, WORD_BYTES};

/// Generates a synthetic trace for `spec` on a device of `capacity_words`.
///
/// The access count is `round(target_access_rate * n_instructions * cpi)`.
/// Accesses are spread one per equal-width slot of the instruction stream, so
/// instruction indices are strictly increasing. The first `footprint_words`
/// accesses are an initialization sweep that writes every word once; the
/// rest follow the reuse profile. Threads are interleaved round-robin and each
/// thread's hot set starts at its own partition of the footprint.
pub fn generate_trace(spec: &WorkloadSpec, capacity_words: u64) -> Result<MemoryTrace, TraceError> {
    spec.validate(capacity_words)?;

    let n_accesses = (spec.target_access_rate * spec.total_cycles()).round() as u64;
    let footprint = spec.footprint_words;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);

    let zipf = match spec.reuse_profile {
        ReuseProfile::Zipfian(s) => Some(
            Zipf::new(footprint as f64, s)
                .map_err(|e| TraceError::InvalidSpec { field: "reuse_profile", reason: e.to_string() })?,
        ),
        _ => None,
    };
    let threads = spec.threads as u64;
    let partition = footprint / threads;
    let slot = if n_accesses > 0 { spec.n_instructions as f64 / n_accesses as f64 } else { 0.0 };

    let mut accesses = Vec::with_capacity(n_accesses as usize);
    let mut cursor = 0u64;
    for j in 0..n_accesses {
        let start = (j as f64 * slot).floor() as u64;
        let end = (((j + 1) as f64 * slot).floor() as u64).max(start + 1);
        let instr_index = rng.random_range(start..end);

        let word = if j < footprint {
            j
        } else {
            let thread = j % threads;
            match spec.reuse_profile {
                ReuseProfile::Uniform => rng.random_range(0..footprint),
                ReuseProfile::Streaming => {
                    cursor += 1;
                    (footprint + cursor - 1) % footprint
                }
                ReuseProfile::Zipfian(_) => {
                    let rank = zipf.as_ref().map(|z| z.sample(&mut rng)).unwrap_or(1.0) as u64 - 1;
                    (rank + thread * partition) % footprint
                }
            }
        };

        let address = word * WORD_BYTES;
        let is_write = j < footprint || rng.random_bool(spec.write_fraction);
        let access = if is_write {
            MemoryAccess::write(instr_index, address, alphabet_value(rng.random_range(0..spec.value_alphabet_size)))
        } else {
            MemoryAccess::read(instr_index, address)
        };
        accesses.push(access);
    }

    Ok(MemoryTrace::new(spec.clone(), accesses))
}

/// The `k`-th symbol of a workload's value alphabet. Symbols are small
/// integers, so high-order bits stay clear the way most program data does.
fn alphabet_value(k: u32) -> u32 {
    k
}
