use std::collections::HashMap;

use super::program::LastSeen;
use super::{access_rate, data_entropy, reuse_time, wait_cycles_ratio, FeatureError, FeatureVector};
use crate::dramsim::EnvPoint;
use crate::geometry::Geometry;
use crate::trace::MemoryTrace;

/// Clock and latency assumptions used to turn trace counts into features.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureConfig {
    /// Core clock in Hz.
    pub f_clk: f64,
    /// Stall cost charged per memory access, in cycles.
    pub stall_cycles: f64,
    pub geometry: Geometry,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig { f_clk: 2.4e9, stall_cycles: 100.0, geometry: Geometry::default() }
    }
}

/// Auxiliary statistics appended to every feature vector, in order.
pub const NUISANCE_NAMES: [&str; 24] = [
    "read_fraction",
    "write_fraction",
    "distinct_words_log2",
    "footprint_coverage",
    "accesses_per_word",
    "row_rate_mean_log10",
    "row_rate_cv",
    "row_rate_max_over_mean",
    "row_rate_skewness",
    "row_rate_p90_over_mean",
    "hot_row_fraction",
    "top1pct_word_share",
    "top10pct_word_share",
    "reused_access_fraction",
    "reuse_gap_median_s",
    "reuse_gap_p90_s",
    "reuse_gap_cv",
    "value_distinct_log2",
    "value_bit_density",
    "zero_value_fraction",
    "cpi",
    "threads",
    "instructions_log10",
    "sequential_fraction",
];

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return 0.0;
    }
    let idx = ((sorted.len() - 1) as f64 * q).round() as usize;
    sorted[idx]
}

fn nuisance(trace: &MemoryTrace, cfg: &FeatureConfig) -> Vec<f64> {
    let n = trace.len() as f64;
    let seconds = trace.total_cycles() / cfg.f_clk;
    let g = &cfg.geometry;

    let mut writes = 0u64;
    let mut zero_values = 0u64;
    let mut one_bits = 0u64;
    let mut sequential = 0u64;
    let mut values: HashMap<u32, u64> = HashMap::new();
    let mut word_counts: HashMap<u64, u64> = HashMap::new();
    let mut rows = vec![0u64; g.n_rows as usize];
    let mut last = LastSeen::for_trace(trace);
    let mut gaps: Vec<f64> = Vec::new();
    let mut prev_word: Option<u64> = None;
    let gap_scale = trace.spec.cpi / cfg.f_clk;

    for a in &trace.accesses {
        let w = a.word();
        if let Some(v) = a.kind.value() {
            writes += 1;
            one_bits += v.count_ones() as u64;
            if v == 0 {
                zero_values += 1;
            }
            *values.entry(v).or_insert(0) += 1;
        }
        *word_counts.entry(w).or_insert(0) += 1;
        let r = g.row_of(w) as usize;
        if r >= rows.len() {
            rows.resize(r + 1, 0);
        }
        rows[r] += 1;
        if let Some(p) = last.swap(w, a.instr_index) {
            gaps.push((a.instr_index - p) as f64 * gap_scale);
        }
        if prev_word.is_some_and(|p| p + 1 == w) {
            sequential += 1;
        }
        prev_word = Some(w);
    }

    let safe = |num: f64, den: f64| if den > 0.0 { num / den } else { 0.0 };
    let distinct = word_counts.len() as f64;

    let rates: Vec<f64> = rows.iter().map(|&c| safe(c as f64, seconds)).collect();
    let rmean = rates.iter().sum::<f64>() / rates.len().max(1) as f64;
    let rvar = rates.iter().map(|r| (r - rmean).powi(2)).sum::<f64>() / rates.len().max(1) as f64;
    let rsd = rvar.sqrt();
    let skew = if rsd > 0.0 {
        rates.iter().map(|r| ((r - rmean) / rsd).powi(3)).sum::<f64>() / rates.len() as f64
    } else {
        0.0
    };
    let mut sorted_rates = rates.clone();
    sorted_rates.sort_by(f64::total_cmp);
    let hot_rows = rates.iter().filter(|&&r| r > 2.0 * rmean).count() as f64;

    let mut counts: Vec<u64> = word_counts.values().copied().collect();
    counts.sort_unstable_by(|a, b| b.cmp(a));
    let top_share = |frac: f64| {
        let k = ((counts.len() as f64 * frac).ceil() as usize).max(1).min(counts.len());
        safe(counts[..k].iter().sum::<u64>() as f64, n)
    };

    gaps.sort_by(f64::total_cmp);
    let gmean = gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
    let gsd = (gaps.iter().map(|x| (x - gmean).powi(2)).sum::<f64>() / gaps.len().max(1) as f64).sqrt();

    let distinct_values = values.len() as f64;

    vec![
        safe(n - writes as f64, n),
        safe(writes as f64, n),
        distinct.max(1.0).log2(),
        safe(distinct, trace.spec.footprint_words as f64),
        safe(n, distinct),
        (rmean + 1e-12).log10(),
        safe(rsd, rmean),
        safe(*sorted_rates.last().unwrap_or(&0.0), rmean),
        skew,
        safe(quantile(&sorted_rates, 0.9), rmean),
        safe(hot_rows, rates.len() as f64),
        if counts.is_empty() { 0.0 } else { top_share(0.01) },
        if counts.is_empty() { 0.0 } else { top_share(0.10) },
        safe(gaps.len() as f64, n),
        quantile(&gaps, 0.5),
        quantile(&gaps, 0.9),
        safe(gsd, gmean),
        distinct_values.max(1.0).log2(),
        safe(one_bits as f64, 32.0 * writes as f64),
        safe(zero_values as f64, writes as f64),
        trace.spec.cpi,
        trace.spec.threads as f64,
        (trace.spec.n_instructions.max(1) as f64).log10(),
        safe(sequential as f64, n),
    ]
}

/// Profiles `trace` and pairs its program features with an environment.
pub fn extract_features(
    trace: &MemoryTrace,
    env: &EnvPoint,
    device: &str,
    cfg: &FeatureConfig,
) -> Result<FeatureVector, FeatureError> {
    env.validate().map_err(|e| FeatureError::Env(e.to_string()))?;
    let t_reuse = reuse_time(trace, cfg.f_clk)?;
    let h_dp = data_entropy(trace)?;
    let rate = access_rate(trace)?;
    let wait = wait_cycles_ratio(trace, cfg.stall_cycles)?;
    let nuisance = NUISANCE_NAMES.iter().map(|s| s.to_string()).zip(nuisance(trace, cfg)).collect();
    Ok(FeatureVector {
        workload: trace.spec.name.clone(),
        device: device.to_string(),
        temp: env.temp,
        t_refp: env.t_refp,
        v_dd: env.v_dd,
        t_reuse,
        h_dp,
        mem_accesses_per_cycle: rate,
        wait_cycles_ratio: wait,
        nuisance,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::ReuseTime;
    use crate::trace::{generate_trace, ReuseProfile, WorkloadSpec};

    fn trace() -> MemoryTrace {
        let spec = WorkloadSpec {
            name: "x".into(),
            n_instructions: 2_000_000,
            footprint_words: 50_000,
            target_access_rate: 0.05,
            cpi: 1.3,
            write_fraction: 0.3,
            value_alphabet_size: 64,
            reuse_profile: ReuseProfile::Zipfian(1.1),
            threads: 4,
            seed: 5,
        };
        generate_trace(&spec, 1 << 20).unwrap()
    }

    #[test]
    fn composes_program_features() {
        let t = trace();
        let env = EnvPoint::new(1.173, 1.428, 60.0);
        let cfg = FeatureConfig::default();
        let fv = extract_features(&t, &env, "dimm0/rank0", &cfg).unwrap();
        assert_eq!(fv.t_reuse, reuse_time(&t, cfg.f_clk).unwrap());
        assert!(matches!(fv.t_reuse, ReuseTime::Seconds(_)));
        assert_eq!(fv.h_dp, data_entropy(&t).unwrap());
        assert!(fv.h_dp <= 6.0 + 1e-12);
        assert!((fv.mem_accesses_per_cycle - 0.05).abs() / 0.05 < 0.05);
        assert_eq!(fv.wait_cycles_ratio, wait_cycles_ratio(&t, 100.0).unwrap());
        assert!(fv.nuisance.len() >= 20);
        assert!(fv.nuisance.iter().all(|(_, v)| v.is_finite()));
        assert_eq!(fv.column("t_refp"), Some(1.173));
        assert_eq!(fv.column("threads"), Some(4.0));
    }

    #[test]
    fn deterministic() {
        let t = trace();
        let env = EnvPoint::new(0.618, 1.5, 50.0);
        let cfg = FeatureConfig::default();
        assert_eq!(extract_features(&t, &env, "d", &cfg).unwrap(), extract_features(&t, &env, "d", &cfg).unwrap());
    }

    #[test]
    fn rejects_out_of_range_env() {
        let env = EnvPoint::new(5.0, 1.5, 50.0);
        assert!(matches!(extract_features(&trace(), &env, "d", &FeatureConfig::default()), Err(FeatureError::Env(_))));
    }
}
