//! Proptest strategies and round-trip checks for the three file formats.

use std::io::Cursor;

use dram_oracle::features::{FeatureSetId, FeatureVector, ReuseTime, NUISANCE_NAMES};
use dram_oracle::models::{
    load_model, read_dataset_csv, save_model, train, write_dataset_csv, Dataset, LabeledRow, ModelConfig, ModelKind,
    RdfParams, TargetKind,
};
use dram_oracle::trace::{read_trace, write_trace, MemoryAccess, MemoryTrace, ReuseProfile, WorkloadSpec};
use proptest::prelude::*;

pub const CASES: u32 = 500;

fn finite() -> impl Strategy<Value = f64> {
    prop_oneof![-1e6..1e6f64, (-300i32..300).prop_map(|e| 1.5f64 * 10f64.powi(e)), Just(0.0)]
}

fn profile() -> impl Strategy<Value = ReuseProfile> {
    prop_oneof![
        Just(ReuseProfile::Uniform),
        Just(ReuseProfile::Streaming),
        (0.01..4.0f64).prop_map(ReuseProfile::Zipfian)
    ]
}

prop_compose! {
    pub fn any_trace()(
        name in "[a-zA-Z0-9_ ,=é\"-]{0,24}",
        cpi in 0.01..10.0f64,
        rate in 0.0001..1.0f64,
        wf in 0.0..=1.0f64,
        alphabet in 1u32..100_000,
        profile in profile(),
        threads in 1u32..64,
        seed in any::<u64>(),
        steps in prop::collection::vec((1u64..1_000_000, 0u64..(1 << 40), prop::option::of(any::<u32>())), 0..300),
    ) -> MemoryTrace {
        let mut instr = 0u64;
        let accesses = steps
            .into_iter()
            .map(|(gap, word, value)| {
                instr += gap;
                match value {
                    Some(v) => MemoryAccess::write(instr, word * 8, v),
                    None => MemoryAccess::read(instr, word * 8),
                }
            })
            .collect();
        let spec = WorkloadSpec {
            name,
            n_instructions: instr + 1,
            footprint_words: 1 << 40,
            target_access_rate: rate,
            cpi,
            write_fraction: wf,
            value_alphabet_size: alphabet,
            reuse_profile: profile,
            threads,
            seed,
        };
        MemoryTrace::new(spec, accesses)
    }
}

pub fn trace_round_trip(t: &MemoryTrace) -> Result<(), TestCaseError> {
    let mut bytes = Vec::new();
    write_trace(t, &mut bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let back = read_trace(Cursor::new(&bytes)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, t);
    let mut again = Vec::new();
    write_trace(&back, &mut again).unwrap();
    prop_assert_eq!(again, bytes);
    Ok(())
}

fn feature_vector(workload: String, device: String, v: Vec<f64>, never: bool) -> FeatureVector {
    FeatureVector {
        workload,
        device,
        temp: 50.0 + (v[0].abs() % 20.0),
        t_refp: 0.064 + (v[1].abs() % 2.2),
        v_dd: 1.428,
        t_reuse: if never { ReuseTime::NeverReused } else { ReuseTime::Seconds(v[2].abs() + 1e-9) },
        h_dp: v[3],
        mem_accesses_per_cycle: v[4],
        wait_cycles_ratio: v[5],
        nuisance: NUISANCE_NAMES.iter().zip(&v[6..]).map(|(n, x)| (n.to_string(), *x)).collect(),
    }
}

prop_compose! {
    fn labeled_row()(
        workload in "[a-z_,\" ]{1,10}",
        device in prop::sample::select(vec!["dimm0/rank0", "dimm0/rank1", "d,\"x\""]),
        v in prop::collection::vec(finite(), 6 + NUISANCE_NAMES.len()),
        never in any::<bool>(),
        wer in prop::option::of(0.0..=1.0f64),
        p_ue in prop::option::of(0.0..=1.0f64),
    ) -> LabeledRow {
        LabeledRow { features: feature_vector(workload, device.to_string(), v, never), wer, p_ue }
    }
}

pub fn any_rows() -> impl Strategy<Value = Vec<LabeledRow>> {
    prop::collection::vec(labeled_row(), 1..20)
}

pub fn dataset_round_trip(rows: &[LabeledRow]) -> Result<(), TestCaseError> {
    let mut bytes = Vec::new();
    write_dataset_csv(rows, &mut bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let back = read_dataset_csv(Cursor::new(&bytes)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, &rows.to_vec());
    Ok(())
}

prop_compose! {
    pub fn any_model_case()(
        n in 4usize..24,
        kind in prop::sample::select(ModelKind::ALL.to_vec()),
        set in prop::sample::select(FeatureSetId::ALL.to_vec()),
        target in prop::sample::select(vec![TargetKind::Wer, TargetKind::Pue]),
        k in 1usize..4,
        trees in 1usize..6,
        seed in any::<u64>(),
    )(
        rows in prop::collection::vec(
            (prop::collection::vec(-1e3..1e3f64, 6 + NUISANCE_NAMES.len()), 0.0..1.0f64, 0usize..2, 0usize..3),
            n,
        ),
        kind in Just(kind), set in Just(set), target in Just(target), k in Just(k), trees in Just(trees), seed in Just(seed),
    ) -> (Dataset, ModelConfig) {
        let samples = rows
            .into_iter()
            .map(|(v, y, dev, w)| {
                let fv = feature_vector(format!("w{w}"), format!("dev{dev}"), v, false);
                (fv, if target == TargetKind::Wer { y * 1e-3 } else { y })
            })
            .collect();
        let ds = Dataset::new(samples, target).expect("valid synthetic dataset");
        let cfg = ModelConfig {
            k,
            rdf: RdfParams { n_trees: trees, seed, ..RdfParams::default() },
            ..ModelConfig::new(kind, set)
        };
        (ds, cfg)
    }
}

pub fn model_round_trip(ds: &Dataset, cfg: &ModelConfig) -> Result<(), TestCaseError> {
    let model = train(ds, cfg).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let mut bytes = Vec::new();
    save_model(&model, &mut bytes).map_err(|e| TestCaseError::fail(e.to_string()))?;
    let back = load_model(Cursor::new(&bytes)).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(&back, &model);
    for (fv, _) in &ds.samples {
        let (a, b) = (model.predict(fv).unwrap(), back.predict(fv).unwrap());
        prop_assert_eq!(a.to_bits(), b.to_bits());
    }
    let mut again = Vec::new();
    save_model(&back, &mut again).unwrap();
    prop_assert_eq!(again, bytes);
    Ok(())
}
