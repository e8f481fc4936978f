use std::collections::BTreeSet;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::{retention_at, DimmProfile, EnvPoint, ReuseMode, SimConfig, SimError};
use crate::trace::MemoryTrace;

const GOLDEN_GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

/// One step of SplitMix64: advances `state` and returns the mixed output.
pub fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(GOLDEN_GAMMA);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seeds of `n` repeated runs: the first `n` SplitMix64 outputs from `seed`.
pub fn run_seeds(seed: u64, n: u32) -> Vec<u64> {
    let mut state = seed;
    (0..n).map(|_| splitmix64(&mut state)).collect()
}

/// Words with flipped bits after one run, split by SECDED outcome.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct RunOutcome {
    /// Exactly one flipped bit: corrected.
    pub ce_words: BTreeSet<u64>,
    /// Exactly two flipped bits: detected, uncorrectable.
    pub ue_words: BTreeSet<u64>,
    /// Three or more flipped bits: possibly silent.
    pub sdc_words: BTreeSet<u64>,
    pub mem_size_words: u64,
}

impl RunOutcome {
    /// Whether the run would crash the system (a UE or an SDC manifested).
    pub fn has_uncorrectable(&self) -> bool {
        !self.ue_words.is_empty() || !self.sdc_words.is_empty()
    }
}

/// Word error rate: words with a corrected error over allocated words.
pub fn measure_wer(outcome: &RunOutcome) -> Result<f64, SimError> {
    if outcome.mem_size_words == 0 {
        return Err(SimError::ZeroMemory);
    }
    Ok(outcome.ce_words.len() as f64 / outcome.mem_size_words as f64)
}

/// Fraction of runs with at least one uncorrectable word.
pub fn pue_from_outcomes(outcomes: &[RunOutcome]) -> Result<f64, SimError> {
    if outcomes.is_empty() {
        return Err(SimError::ZeroExperiments);
    }
    let n_ue = outcomes.iter().filter(|o| o.has_uncorrectable()).count();
    Ok(n_ue as f64 / outcomes.len() as f64)
}

/// What the simulator needs from a trace: per-word implicit-refresh interval
/// and final content, and which rows sit next to a hammered row.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceUsage {
    /// The workload owns the whole device; words it never writes keep the
    /// reset pattern and are never implicitly refreshed.
    pub mem_size_words: u64,
    /// Seconds between accesses that recharge each word; infinite when the
    /// word is touched at most once.
    pub refresh_interval: Vec<f64>,
    /// Word content at the end of the trace; 32-bit values are zero-extended.
    pub content: Vec<u64>,
    /// Per device row: an adjacent row exceeds the hammer threshold.
    pub disturbed_rows: Vec<bool>,
}

impl TraceUsage {
    pub fn from_trace(trace: &MemoryTrace, cfg: &SimConfig) -> Result<TraceUsage, SimError> {
        let g = cfg.geometry;
        let capacity = g.capacity_words();
        let max_word = trace.accesses.iter().map(|a| a.word()).max();
        let span = trace.spec.footprint_words.max(max_word.map_or(0, |w| w + 1));
        if span > capacity {
            return Err(SimError::FootprintOverflow { footprint: span, capacity });
        }
        let n = capacity as usize;
        let mut last = vec![u64::MAX; n];
        let mut gap_sum = vec![0u64; n];
        let mut gap_min = vec![u64::MAX; n];
        let mut gaps = vec![0u32; n];
        let mut content = vec![cfg.reset_pattern; n];
        let mut row_hits = vec![0u64; g.n_rows as usize];

        for a in &trace.accesses {
            let w = a.word() as usize;
            if last[w] != u64::MAX {
                let d = a.instr_index - last[w];
                gap_sum[w] += d;
                gap_min[w] = gap_min[w].min(d);
                gaps[w] += 1;
            }
            last[w] = a.instr_index;
            if let Some(v) = a.kind.value() {
                content[w] = v as u64;
            }
            row_hits[g.row_of(w as u64) as usize] += 1;
        }

        let sec_per_instr = trace.spec.cpi / cfg.f_clk;
        let refresh_interval = (0..n)
            .map(|w| match (gaps[w], cfg.reuse_mode) {
                (0, _) => f64::INFINITY,
                (k, ReuseMode::Mean) => gap_sum[w] as f64 / k as f64 * sec_per_instr,
                (_, ReuseMode::MinGap) => gap_min[w] as f64 * sec_per_instr,
            })
            .collect();

        let seconds = trace.total_cycles() / cfg.f_clk;
        let hammered: Vec<bool> =
            row_hits.iter().map(|&h| seconds > 0.0 && h as f64 / seconds > cfg.hammer_threshold).collect();
        let disturbed_rows = (0..hammered.len())
            .map(|r| (r > 0 && hammered[r - 1]) || hammered.get(r + 1).copied().unwrap_or(false))
            .collect();

        Ok(TraceUsage { mem_size_words: capacity, refresh_interval, content, disturbed_rows })
    }

    /// Fraction of device rows disturbed by a hammered neighbour.
    pub fn disturbed_fraction(&self) -> f64 {
        self.disturbed_rows.iter().filter(|&&d| d).count() as f64 / self.disturbed_rows.len().max(1) as f64
    }
}

/// Applies the flip rule to every weak cell of the allocated region.
///
/// A cell flips when its retention at `env`, scaled by run noise and by the
/// interference penalty if its row is disturbed, is shorter than the
/// effective refresh interval `min(t_refp, word refresh interval)`, and the
/// stored bit differs from the cell's discharged value.
pub fn simulate_usage(
    usage: &TraceUsage,
    dimm: &DimmProfile,
    env: &EnvPoint,
    run_seed: u64,
    cfg: &SimConfig,
) -> Result<RunOutcome, SimError> {
    env.validate()?;
    if usage.mem_size_words > dimm.capacity_words() {
        return Err(SimError::FootprintOverflow { footprint: usage.mem_size_words, capacity: dimm.capacity_words() });
    }
    let mut state = run_seed ^ dimm.device_seed;
    let mut rng = ChaCha8Rng::seed_from_u64(splitmix64(&mut state));
    let env_factor = retention_at(1.0, env, cfg);
    let g = dimm.geometry;

    let mut out = RunOutcome { mem_size_words: usage.mem_size_words, ..RunOutcome::default() };
    let mut current: Option<(u64, u32)> = None;
    let close = |word: u64, flips: u32, out: &mut RunOutcome| match flips {
        0 => {}
        1 => {
            out.ce_words.insert(word);
        }
        2 => {
            out.ue_words.insert(word);
        }
        _ => {
            out.sdc_words.insert(word);
        }
    };

    for cell in dimm.weak_cells.iter().take_while(|c| c.word < usage.mem_size_words) {
        let noise = if cfg.sigma_vrt > 0.0 {
            let z: f64 = StandardNormal.sample(&mut rng);
            (cfg.sigma_vrt * z).exp()
        } else {
            1.0
        };
        let w = cell.word as usize;
        let mut retention = cell.retention * env_factor * noise;
        if usage.disturbed_rows.get(g.row_of(cell.word) as usize).copied().unwrap_or(false) {
            retention *= cfg.interference_factor;
        }
        let interval = env.t_refp.min(usage.refresh_interval[w]);
        let stored = ((usage.content[w] >> cell.bit) & 1) as u8;
        let flips = retention < interval && stored != cell.discharge;

        match current {
            Some((word, k)) if word == cell.word => current = Some((word, k + flips as u32)),
            prev => {
                if let Some((word, k)) = prev {
                    close(word, k, &mut out);
                }
                current = Some((cell.word, flips as u32));
            }
        }
    }
    if let Some((word, k)) = current {
        close(word, k, &mut out);
    }
    Ok(out)
}

/// One characterization run of `trace` on `dimm`.
pub fn simulate_run(
    trace: &MemoryTrace,
    dimm: &DimmProfile,
    env: &EnvPoint,
    run_seed: u64,
    cfg: &SimConfig,
) -> Result<RunOutcome, SimError> {
    simulate_usage(&TraceUsage::from_trace(trace, cfg)?, dimm, env, run_seed, cfg)
}

/// P_UE of one device over `n_exp` runs seeded from `seed`.
pub fn estimate_pue(
    trace: &MemoryTrace,
    dimm: &DimmProfile,
    env: &EnvPoint,
    n_exp: u32,
    seed: u64,
    cfg: &SimConfig,
) -> Result<f64, SimError> {
    if n_exp == 0 {
        return Err(SimError::ZeroExperiments);
    }
    let usage = TraceUsage::from_trace(trace, cfg)?;
    let outcomes = run_seeds(seed, n_exp)
        .into_iter()
        .map(|s| simulate_usage(&usage, dimm, env, s, cfg))
        .collect::<Result<Vec<_>, _>>()?;
    pue_from_outcomes(&outcomes)
}

/// P_UE of a machine populated with all of `dimms`: a run fails when any
/// device shows an uncorrectable word.
pub fn estimate_pue_system(
    usage: &TraceUsage,
    dimms: &[DimmProfile],
    env: &EnvPoint,
    n_exp: u32,
    seed: u64,
    cfg: &SimConfig,
) -> Result<f64, SimError> {
    if n_exp == 0 {
        return Err(SimError::ZeroExperiments);
    }
    let mut failed = 0;
    for s in run_seeds(seed, n_exp) {
        for d in dimms {
            if simulate_usage(usage, d, env, s, cfg)?.has_uncorrectable() {
                failed += 1;
                break;
            }
        }
    }
    Ok(failed as f64 / n_exp as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dramsim::{build_dimm, WeakCell};
    use crate::geometry::Geometry;
    use crate::trace::{MemoryAccess, ReuseProfile, WorkloadSpec};

    fn cfg() -> SimConfig {
        SimConfig { geometry: Geometry::new(16, 64), sigma_vrt: 0.0, ..SimConfig::default() }
    }

    fn spec(n_instructions: u64) -> WorkloadSpec {
        WorkloadSpec {
            name: "hand".into(),
            n_instructions,
            footprint_words: 64,
            target_access_rate: 1e-6,
            cpi: 1.0,
            write_fraction: 0.5,
            value_alphabet_size: 4,
            reuse_profile: ReuseProfile::Uniform,
            threads: 1,
            seed: 0,
        }
    }

    fn dimm(cells: Vec<WeakCell>) -> DimmProfile {
        DimmProfile {
            device_id: "d".into(),
            geometry: Geometry::new(16, 64),
            weak_cells: cells,
            device_seed: 1,
            spread: 0.0,
        }
    }

    fn cell(word: u64, bit: u8, retention: f64) -> WeakCell {
        WeakCell { word, bit, retention, discharge: 1 }
    }

    #[test]
    fn implicit_refresh_hand_case() {
        // retention 1.0 s at 50 °C / 1.5 V; refresh every 2.283 s
        let c = cfg();
        let env = EnvPoint::new(2.283, 1.5, 50.0);
        let d = dimm(vec![cell(3, 0, 1.0)]);
        // 1.2e9 instructions at 2.4 GHz = 0.5 s between accesses to word 3
        let half_second = 1_200_000_000u64;
        let reused: Vec<_> = (0..6).map(|i| MemoryAccess::read(i * half_second, 3 * 8)).collect();
        let t = MemoryTrace::new(spec(6 * half_second), reused);
        assert!(simulate_run(&t, &d, &env, 0, &c).unwrap().ce_words.is_empty());

        let once = MemoryTrace::new(spec(6 * half_second), vec![MemoryAccess::read(0, 3 * 8)]);
        let o = simulate_run(&once, &d, &env, 0, &c).unwrap();
        assert_eq!(o.ce_words.iter().copied().collect::<Vec<_>>(), vec![3]);
    }

    #[test]
    fn classification_by_flip_count() {
        let c = cfg();
        let env = EnvPoint::new(2.0, 1.5, 50.0);
        let d = dimm(vec![
            cell(1, 0, 0.1),
            cell(2, 0, 0.1),
            cell(2, 5, 0.1),
            cell(4, 0, 0.1),
            cell(4, 1, 0.1),
            cell(4, 63, 0.1),
            cell(5, 0, 5.0),
        ]);
        let t = MemoryTrace::new(spec(1000), vec![]);
        let o = simulate_run(&t, &d, &env, 0, &c).unwrap();
        assert_eq!(o.ce_words, BTreeSet::from([1]));
        assert_eq!(o.ue_words, BTreeSet::from([2]));
        assert_eq!(o.sdc_words, BTreeSet::from([4]));
        assert!(o.has_uncorrectable());
        assert_eq!(measure_wer(&o).unwrap(), 1.0 / 1024.0);
    }

    #[test]
    fn discharged_data_never_flips() {
        let c = cfg();
        let env = EnvPoint::new(2.283, 1.428, 70.0);
        // value 2 sets bit 1 only; the upper half stays zero
        let t = MemoryTrace::new(spec(1000), vec![MemoryAccess::write(0, 7 * 8, 2)]);
        let matched = dimm(vec![
            WeakCell { word: 7, bit: 0, retention: 0.01, discharge: 0 },
            WeakCell { word: 7, bit: 1, retention: 0.01, discharge: 1 },
            WeakCell { word: 7, bit: 32, retention: 0.01, discharge: 0 },
            WeakCell { word: 7, bit: 33, retention: 0.01, discharge: 0 },
        ]);
        let o = simulate_run(&t, &matched, &env, 0, &c).unwrap();
        assert_eq!(o, RunOutcome { mem_size_words: 1024, ..RunOutcome::default() });

        let true_cell_under_one = dimm(vec![WeakCell { word: 7, bit: 1, retention: 0.01, discharge: 0 }]);
        assert_eq!(simulate_run(&t, &true_cell_under_one, &env, 0, &c).unwrap().ce_words, BTreeSet::from([7]));
    }

    #[test]
    fn interference_shortens_retention() {
        let mut c = cfg();
        c.hammer_threshold = 10.0;
        let env = EnvPoint::new(1.0, 1.5, 50.0);
        // word 64 is row 1; hammer row 0 (words 0..64)
        let d = dimm(vec![cell(64, 0, 1.5)]);
        let n = 2_400_000_000u64; // 1 s
        let hammer: Vec<_> = (0..100).map(|i| MemoryAccess::read(i * 1000, 0)).collect();
        let mut s = spec(n);
        s.footprint_words = 128;
        let t = MemoryTrace::new(s.clone(), hammer);
        let mut c2 = c.clone();
        c2.geometry = Geometry::new(16, 64);
        let u = TraceUsage::from_trace(&t, &c2).unwrap();
        assert!(u.disturbed_rows[1] && !u.disturbed_rows[0] && !u.disturbed_rows[2]);
        assert_eq!(simulate_usage(&u, &d, &env, 0, &c2).unwrap().ce_words.len(), 1);
        let quiet = MemoryTrace::new(s, vec![MemoryAccess::read(0, 0)]);
        assert!(simulate_run(&quiet, &d, &env, 0, &c2).unwrap().ce_words.is_empty());
    }

    #[test]
    fn nominal_refresh_is_safe() {
        let c = SimConfig { geometry: Geometry::new(256, 1024), ..SimConfig::default() };
        let d = build_dimm(&c, "d", 5, 0.0).unwrap();
        let t = MemoryTrace::new(
            WorkloadSpec { footprint_words: 256 * 1024, ..spec(1_000_000) },
            vec![MemoryAccess::write(0, 0, 1)],
        );
        let o = simulate_run(&t, &d, &EnvPoint::new(0.064, 1.428, 70.0), 3, &c).unwrap();
        assert!(o.ce_words.is_empty() && o.ue_words.is_empty() && o.sdc_words.is_empty());
    }

    #[test]
    fn pue_arithmetic() {
        let ue = RunOutcome { ue_words: BTreeSet::from([1]), mem_size_words: 10, ..RunOutcome::default() };
        let sdc = RunOutcome { sdc_words: BTreeSet::from([2]), mem_size_words: 10, ..RunOutcome::default() };
        let clean = RunOutcome { ce_words: BTreeSet::from([3]), mem_size_words: 10, ..RunOutcome::default() };
        let runs = [
            ue.clone(),
            sdc,
            ue,
            clean.clone(),
            clean.clone(),
            clean.clone(),
            clean.clone(),
            clean.clone(),
            clean.clone(),
            clean,
        ];
        assert_eq!(pue_from_outcomes(&runs).unwrap(), 0.3);
        assert!(matches!(pue_from_outcomes(&[]), Err(SimError::ZeroExperiments)));
        let empty = RunOutcome::default();
        assert!(matches!(measure_wer(&empty), Err(SimError::ZeroMemory)));
        let five = RunOutcome { ce_words: (0..5).collect(), mem_size_words: 1_000_000, ..RunOutcome::default() };
        assert_eq!(measure_wer(&five).unwrap(), 5e-6);
    }

    #[test]
    fn zero_noise_gives_binary_pue() {
        let c = SimConfig {
            geometry: Geometry::new(64, 1024),
            sigma_vrt: 0.0,
            weak_cell_density: 5e-3,
            ..SimConfig::default()
        };
        let d = build_dimm(&c, "d", 11, 0.0).unwrap();
        let t = MemoryTrace::new(WorkloadSpec { footprint_words: 64 * 1024, ..spec(1000) }, vec![]);
        for temp in [50.0, 60.0, 70.0] {
            let p = estimate_pue(&t, &d, &EnvPoint::new(2.283, 1.5, temp), 5, 9, &c).unwrap();
            assert!(p == 0.0 || p == 1.0);
        }
        assert!(matches!(
            estimate_pue(&t, &d, &EnvPoint::new(2.283, 1.5, 70.0), 0, 9, &c),
            Err(SimError::ZeroExperiments)
        ));
    }

    #[test]
    fn run_seeds_are_splitmix() {
        // reference values of SplitMix64 seeded with 0
        assert_eq!(run_seeds(0, 3), vec![0xe220a8397b1dcdaf, 0x6e789e6aa1b965f4, 0x06c45d188009454f]);
    }

    #[test]
    fn rejects_overflow_and_bad_env() {
        let c = cfg();
        let d = dimm(vec![]);
        let t = MemoryTrace::new(WorkloadSpec { footprint_words: 5000, ..spec(10) }, vec![]);
        assert!(matches!(
            simulate_run(&t, &d, &EnvPoint::new(1.0, 1.5, 50.0), 0, &c),
            Err(SimError::FootprintOverflow { .. })
        ));
        let t = MemoryTrace::new(spec(10), vec![]);
        assert!(matches!(simulate_run(&t, &d, &EnvPoint::new(3.0, 1.5, 50.0), 0, &c), Err(SimError::Env { .. })));
    }
}
