//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any failure.
//!
//!     cargo test --release --test acceptance

mod common;

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use common::props;
use common::{
    entropy_oracle, knn_oracle, random_trace, rel_err, reuse_oracle, rng, spearman_oracle, svr_dual_oracle, OracleTree,
};
use dram_oracle::dramsim::{
    measure_wer, pue_from_outcomes, simulate_usage, DimmProfile, EnvPoint, RunOutcome, SimConfig, TraceUsage, WeakCell,
};
use dram_oracle::eval::{
    best_knn, loo_by_workload, predict_latency, trends, write_report_csv, CrossValReport, K_SWEEP,
};
use dram_oracle::features::{
    data_entropy, reuse_time, spearman, FeatureConfig, FeatureSetId, FeatureVector, ReuseTime,
};
use dram_oracle::models::{
    save_model, train, write_dataset_csv, Dataset, Forest, Knn, ModelConfig, ModelKind, Params, RdfParams, Svr,
    SvrParams, TargetKind, LEAF,
};
use dram_oracle::pipeline::{build_dataset, Grid, Labeled};
use dram_oracle::suite::{default_devices, default_workloads, DEVICE_SPREAD_TARGET};
use dram_oracle::trace::{generate_trace, write_trace};
use dram_oracle::Geometry;
use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use rand::Rng;

struct Outcome {
    id: &'static str,
    name: &'static str,
    pass: bool,
    detail: String,
}

fn report(id: &'static str, name: &'static str, pass: bool, detail: String, started: Instant) -> Outcome {
    let o = Outcome { id, name, pass, detail: format!("{detail} [{:.1?}]", started.elapsed()) };
    println!("{} {:>3}  {:<34} {}", if o.pass { "PASS" } else { "FAIL" }, o.id, o.name, o.detail);
    o
}

fn feature_oracles() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(101);
    let f_clk = 2.4e9;
    let mut worst = 0.0f64;
    let mut mismatches = 0;
    for i in 0..200 {
        let max_len = if i % 10 == 0 { 100_000 } else { 5_000 };
        let t = random_trace(&mut r, max_len);
        match (reuse_time(&t, f_clk).unwrap(), reuse_oracle(&t, f_clk)) {
            (ReuseTime::Seconds(a), Some(b)) => worst = worst.max(rel_err(a, b)),
            (ReuseTime::NeverReused, None) => {}
            _ => mismatches += 1,
        }
        match (data_entropy(&t).ok(), entropy_oracle(&t)) {
            (Some(a), Some(b)) => worst = worst.max(rel_err(a, b)),
            (None, None) => {}
            _ => mismatches += 1,
        }
    }
    for _ in 0..200 {
        let n = r.random_range(3..400);
        let levels = r.random_range(2..50);
        let xs: Vec<f64> = (0..n).map(|_| r.random_range(0..levels) as f64).collect();
        let ys: Vec<f64> =
            xs.iter().map(|x| x * r.random_range(-1.0..2.0) + r.random_range(0..levels) as f64).collect();
        let oracle = spearman_oracle(&xs, &ys);
        match spearman(&xs, &ys) {
            Ok(a) => worst = worst.max(rel_err(a, oracle)),
            Err(_) if !oracle.is_finite() => {}
            Err(_) => mismatches += 1,
        }
    }
    let secs = t0.elapsed().as_secs_f64();
    let pass = worst <= 1e-9 && mismatches == 0 && secs < 60.0;
    report("1", "feature oracles", pass, format!("max rel err {worst:.2e}, {mismatches} mismatches, {secs:.1} s"), t0)
}

fn random_points(r: &mut impl Rng, n: usize, d: usize) -> Vec<Vec<f64>> {
    (0..n).map(|_| (0..d).map(|_| r.random_range(-2.0..2.0)).collect()).collect()
}

fn model_oracles() -> Outcome {
    let t0 = Instant::now();
    let mut r = rng(202);
    let mut knn_err = 0.0f64;
    for _ in 0..50 {
        let d = r.random_range(1..6);
        let x = random_points(&mut r, 20, d);
        let y: Vec<f64> = (0..20).map(|_| r.random_range(-3.0..3.0)).collect();
        let k = r.random_range(1..=7);
        let m = Knn::fit(x.clone(), y.clone(), k).unwrap();
        let mut queries = random_points(&mut r, 10, d);
        queries.push(x[r.random_range(0..20)].clone());
        for q in &queries {
            knn_err = knn_err.max(rel_err(m.predict(q), knn_oracle(&x, &y, k, q)));
        }
    }

    // Features inducing the same partition tie exactly, so trees are compared
    // on the training rows and by leaf count rather than between rows.
    let mut tree_err = 0.0f64;
    let mut leaf_mismatch = 0;
    for _ in 0..20 {
        let n = r.random_range(10..60);
        let d = r.random_range(1..5);
        let x = random_points(&mut r, n, d);
        let y: Vec<f64> =
            x.iter().map(|p| p[0].sin() * 2.0 + p.iter().sum::<f64>() + r.random_range(-0.3..0.3)).collect();
        let min_leaf = r.random_range(1..4);
        let params = RdfParams {
            n_trees: 1,
            min_leaf,
            bootstrap: false,
            max_features: Some(usize::MAX),
            ..RdfParams::default()
        };
        let forest = Forest::fit(&x, &y, &params).unwrap();
        let oracle = OracleTree::grow(&x, &y, &(0..n).collect::<Vec<_>>(), min_leaf);
        for q in &x {
            tree_err = tree_err.max(rel_err(forest.predict(q), oracle.predict(q)));
        }
        let leaves = forest.trees[0].nodes.iter().filter(|n| n.feature == LEAF).count();
        leaf_mismatch += (leaves != oracle.leaves()) as usize;
    }

    let mut svr_gap = 0.0f64;
    for _ in 0..10 {
        let d = r.random_range(1..4);
        let x = random_points(&mut r, 10, d);
        let z: Vec<f64> =
            x.iter().map(|p| p.iter().map(|v| v.cos()).sum::<f64>() + r.random_range(-0.1..0.1)).collect();
        let (c, eps, gamma) = (r.random_range(0.5..10.0), r.random_range(0.0..0.2), r.random_range(0.1..2.0));
        let m = Svr::fit(&x, &z, &SvrParams { c, epsilon: eps, gamma: Some(gamma), ..SvrParams::default() }).unwrap();
        let oracle = svr_dual_oracle(&x, &z, c, eps, gamma, 20_000);
        svr_gap = svr_gap.max((m.objective - oracle).abs());
    }
    let pass = knn_err <= 1e-12 && tree_err <= 1e-12 && leaf_mismatch == 0 && svr_gap <= 1e-2;
    report(
        "2",
        "model oracles",
        pass,
        format!(
            "knn rel err {knn_err:.1e}, tree rel err {tree_err:.1e} ({leaf_mismatch} leaf-count mismatches), svr objective gap {svr_gap:.2e}"
        ),
        t0,
    )
}

fn outcome(ce: &[u64], ue: &[u64], sdc: &[u64], size: u64) -> RunOutcome {
    RunOutcome {
        ce_words: ce.iter().copied().collect(),
        ue_words: ue.iter().copied().collect(),
        sdc_words: sdc.iter().copied().collect(),
        mem_size_words: size,
    }
}

fn error_arithmetic() -> Outcome {
    let t0 = Instant::now();
    let mut ok = true;
    ok &= measure_wer(&outcome(&[1, 5, 9], &[2], &[], 1000)).unwrap() == 3.0 / 1000.0;
    ok &= measure_wer(&outcome(&[], &[4, 7], &[8], 64)).unwrap() == 0.0;
    ok &= measure_wer(&outcome(&[1], &[], &[], 0)).is_err();
    let runs = [
        outcome(&[1], &[], &[], 10),
        outcome(&[], &[3], &[], 10),
        outcome(&[], &[], &[5], 10),
        outcome(&[2, 3], &[], &[], 10),
    ];
    ok &= pue_from_outcomes(&runs).unwrap() == 0.5;
    ok &= pue_from_outcomes(&runs[..1]).unwrap() == 0.0;
    ok &= pue_from_outcomes(&[]).is_err();

    // Word 0 gets one flip, word 1 two, word 2 three; word 3 holds the discharged value.
    let sim = SimConfig { geometry: Geometry::new(4, 4), sigma_vrt: 0.0, ..SimConfig::default() };
    let cell = |word, bit| WeakCell { word, bit, retention: 0.1, discharge: 0 };
    let dimm = DimmProfile {
        device_id: "hand".into(),
        geometry: sim.geometry,
        weak_cells: vec![cell(0, 0), cell(1, 0), cell(1, 1), cell(2, 0), cell(2, 1), cell(2, 2), cell(3, 0)],
        device_seed: 0,
        spread: 0.0,
    };
    let n = sim.geometry.capacity_words() as usize;
    let mut content = vec![u64::MAX; n];
    content[3] = 0;
    let usage = TraceUsage {
        mem_size_words: n as u64,
        refresh_interval: vec![f64::INFINITY; n],
        content,
        disturbed_rows: vec![false; sim.geometry.n_rows as usize],
    };
    let env = EnvPoint::new(1.0, 1.5, 50.0);
    let run = simulate_usage(&usage, &dimm, &env, 7, &sim).unwrap();
    ok &= run == outcome(&[0], &[1], &[2], n as u64);
    ok &= measure_wer(&run).unwrap() == 1.0 / n as f64;
    let short = EnvPoint::new(0.064, 1.5, 50.0);
    let quiet = simulate_usage(&usage, &dimm, &short, 7, &sim).unwrap();
    ok &= pue_from_outcomes(&[run, quiet.clone(), quiet]).unwrap() == 1.0 / 3.0;
    report("3", "WER and P_UE arithmetic", ok, "constructed outcomes and hand-placed weak cells".into(), t0)
}

struct Study {
    labeled: Labeled,
    mid: Labeled,
    grid: Grid,
    devices: Vec<String>,
    elapsed: Duration,
}

fn default_study() -> Study {
    let sim = SimConfig::default();
    let feat = FeatureConfig { f_clk: sim.f_clk, geometry: sim.geometry, ..FeatureConfig::default() };
    let t0 = Instant::now();
    let devices: Vec<DimmProfile> = default_devices().iter().map(|d| d.build(&sim).unwrap()).collect();
    let workloads = default_workloads(&sim);
    let grid = Grid { n_exp: sim.n_exp, ..Grid::default() };
    let labeled = build_dataset(&workloads, &devices, &grid, &sim, &feat).unwrap();
    let elapsed = t0.elapsed();
    let extra = Grid { t_refp: vec![1.45], temps: vec![70.0], ..grid.clone() };
    let mid = build_dataset(&workloads, &devices, &extra, &sim, &feat).unwrap();
    Study { labeled, mid, grid, devices: devices.iter().map(|d| d.device_id.clone()).collect(), elapsed }
}

fn wer_trends(s: &Study) -> Outcome {
    let t0 = Instant::now();
    let rows = &s.labeled.rows;
    let means = trends::mean_wer_by_t_refp(rows);
    let increasing = means.windows(2).all(|w| w[1].1 > w[0].1);
    let r2 = trends::log_linear_r2(&means).unwrap_or(f64::NAN);
    let weakest = &s.devices[0];
    let spreads: Vec<f64> = s
        .grid
        .t_refp
        .iter()
        .filter_map(|&t| trends::workload_extremes(rows, weakest, t, 70.0))
        .map(|(_, hi, _, lo)| if lo > 0.0 { hi / lo } else { f64::INFINITY })
        .collect();
    let min_spread = spreads.iter().copied().fold(f64::INFINITY, f64::min);
    let t_max = s.grid.t_refp[s.grid.t_refp.len() - 1];
    let dev = trends::device_spread(rows, t_max, 70.0).unwrap_or(f64::NAN);
    let dev_ok = (DEVICE_SPREAD_TARGET / 2.0..=DEVICE_SPREAD_TARGET * 2.0).contains(&dev);
    let within = s.elapsed <= Duration::from_secs(600);
    let pass = increasing && r2 >= 0.95 && min_spread >= 2.0 && dev_ok && within;
    let trend: Vec<String> = means.iter().map(|(_, m)| format!("{m:.2e}")).collect();
    report(
        "4",
        "WER trends on the default grid",
        pass,
        format!(
            "mean WER {} (R² {r2:.4}); workload spread ≥ {min_spread:.2}× at 70 °C; device spread {dev:.1}× vs {DEVICE_SPREAD_TARGET}×; grid {:.1?}",
            trend.join(" < "),
            s.elapsed
        ),
        t0,
    )
}

fn pue_trends(s: &Study) -> Outcome {
    let t0 = Instant::now();
    let sys = &s.labeled.system;
    let cool_fail = sys.iter().filter(|p| p.env.temp < 70.0 && p.p_ue > 0.0).count();
    let t_max = s.grid.t_refp[s.grid.t_refp.len() - 1];
    let hot = trends::system_pue_at(sys, t_max, 70.0);
    let all_fail = !hot.is_empty() && hot.iter().all(|(_, p)| *p == 1.0);
    let mean = |v: &[(String, f64)]| v.iter().map(|x| x.1).sum::<f64>() / v.len().max(1) as f64;
    let at_1450 = mean(&trends::system_pue_at(&s.mid.system, 1.45, 70.0));
    let at_1727 = mean(&trends::system_pue_at(sys, 1.727, 70.0));
    let pass = cool_fail == 0 && all_fail && at_1727 >= 2.0 * at_1450 && at_1727 > 0.0;
    report(
        "5",
        "P_UE trends",
        pass,
        format!(
            "{cool_fail} failing points below 70 °C; P_UE at {t_max} s/70 °C all 1: {all_fail}; mean {at_1450:.3} at 1.45 s vs {at_1727:.3} at 1.727 s"
        ),
        t0,
    )
}

struct Models {
    knn: Vec<CrossValReport>,
    rdf: Vec<CrossValReport>,
    svr: Vec<CrossValReport>,
    baseline: CrossValReport,
}

fn cross_validate(ds: &Dataset) -> Models {
    let per_set = |kind| -> Vec<CrossValReport> {
        FeatureSetId::ALL.iter().map(|&set| loo_by_workload(ds, &ModelConfig::new(kind, set)).unwrap()).collect()
    };
    Models {
        knn: FeatureSetId::ALL
            .iter()
            .map(|&set| best_knn(ds, &ModelConfig::new(ModelKind::Knn, set), &K_SWEEP).unwrap())
            .collect(),
        rdf: per_set(ModelKind::Rdf),
        svr: per_set(ModelKind::Svr),
        baseline: loo_by_workload(ds, &ModelConfig::new(ModelKind::Baseline, FeatureSetId::Set1)).unwrap(),
    }
}

fn model_direction(m: &Models, started: Instant) -> Outcome {
    let knn1 = m.knn[0].overall_mpe;
    let knn3 = m.knn[2].overall_mpe;
    let (svr1, svr3) = (m.svr[0].overall_mpe, m.svr[2].overall_mpe);
    let best_rdf = m.rdf.iter().min_by(|a, b| a.overall_mpe.total_cmp(&b.overall_mpe)).unwrap();
    let pass = knn1 <= 15.0 && knn3 >= knn1 && svr3 >= svr1;
    let fmt = |rs: &[CrossValReport]| rs.iter().map(|r| format!("{:.2}%", r.overall_mpe)).collect::<Vec<_>>().join("/");
    report(
        "6",
        "model comparison direction",
        pass,
        format!(
            "best knn per set {} ({}); svr {}; rdf {} (best {})",
            fmt(&m.knn),
            m.knn.iter().map(|r| r.label.as_str()).collect::<Vec<_>>().join(", "),
            fmt(&m.svr),
            fmt(&m.rdf),
            best_rdf.feature_set
        ),
        started,
    )
}

fn baseline_gap(m: &Models, started: Instant) -> Outcome {
    let best = m.knn.iter().chain(&m.rdf).chain(&m.svr).min_by(|a, b| a.overall_mpe.total_cmp(&b.overall_mpe)).unwrap();
    let ratio = m.baseline.overall_mpe / best.overall_mpe;
    report(
        "7",
        "baseline gap",
        ratio >= 2.0,
        format!(
            "baseline {:.2}% vs best {} {:.2}% ({ratio:.2}×)",
            m.baseline.overall_mpe, best.label, best.overall_mpe
        ),
        started,
    )
}

/// Replicates the default rows with small feature jitter until `n` samples.
fn enlarge(ds: &Dataset, n: usize) -> Dataset {
    let mut r = rng(808);
    let mut samples = Vec::with_capacity(n);
    let mut copy = 0;
    while samples.len() < n {
        for (fv, y) in &ds.samples {
            if samples.len() == n {
                break;
            }
            let mut f: FeatureVector = fv.clone();
            let mut jitter = || 1.0 + r.random_range(-0.01..0.01);
            f.workload = format!("{}#{copy}", fv.workload);
            if let ReuseTime::Seconds(s) = f.t_reuse {
                f.t_reuse = ReuseTime::Seconds(s * jitter());
            }
            f.h_dp *= jitter();
            f.mem_accesses_per_cycle *= jitter();
            f.wait_cycles_ratio *= jitter();
            for (_, v) in &mut f.nuisance {
                *v *= jitter();
            }
            samples.push((f, *y));
        }
        copy += 1;
    }
    Dataset::new(samples, ds.target).unwrap()
}

fn latency(ds: &Dataset) -> Outcome {
    let t0 = Instant::now();
    let big = enlarge(ds, 100_000);
    let query = &ds.samples[ds.len() / 2].0;
    let mut parts = Vec::new();
    let mut pass = true;
    for kind in ModelKind::ALL {
        let model = if kind == ModelKind::Svr {
            // Worst case for prediction: every training sample is a support vector.
            let sub: Vec<usize> = (0..2_000).collect();
            let mut m = train(&big.subset(&sub), &ModelConfig::new(kind, FeatureSetId::Set1)).unwrap();
            let support: Vec<Vec<f64>> =
                big.samples.iter().map(|(fv, _)| m.scaler.scale(&m.design.row(fv).unwrap())).collect();
            if let Params::Svr(svr) = &mut m.params {
                svr.coef = (0..support.len()).map(|i| if i % 2 == 0 { 1e-3 } else { -1e-3 }).collect();
                svr.support = support;
            }
            m
        } else {
            train(&big, &ModelConfig::new(kind, FeatureSetId::Set1)).unwrap()
        };
        let median = predict_latency(&model, query, 21).unwrap();
        pass &= median < Duration::from_millis(300);
        parts.push(format!("{kind} {:.3} ms", median.as_secs_f64() * 1e3));
    }
    report("8", "predict latency at 1e5 samples", pass, parts.join(", "), t0)
}

fn ranking(s: &Study) -> Outcome {
    let t0 = Instant::now();
    let rows = &s.labeled.rows;
    let wer: Vec<f64> = rows.iter().map(|r| r.wer.unwrap()).collect();
    let rs = |name: &str| {
        let xs: Vec<f64> = rows.iter().map(|r| r.features.column(name).unwrap()).collect();
        spearman(&xs, &wer).unwrap()
    };
    let (rate, reuse, entropy) = (rs("mem_accesses_per_cycle"), rs("t_reuse"), rs("h_dp"));
    let pass = rate.abs() > reuse.abs() && rate.abs() > entropy.abs();
    report(
        "9",
        "feature ranking direction",
        pass,
        format!("|r_s| rate {:.4}, t_reuse {:.4}, h_dp {:.4}", rate.abs(), reuse.abs(), entropy.abs()),
        t0,
    )
}

fn small_run() -> (Vec<u8>, Vec<u8>, Vec<u8>, Vec<u8>) {
    let sim = SimConfig { geometry: Geometry::new(512, 1024), ..SimConfig::default() };
    let feat = FeatureConfig { f_clk: sim.f_clk, geometry: sim.geometry, ..FeatureConfig::default() };
    let devices: Vec<DimmProfile> = default_devices().iter().take(2).map(|d| d.build(&sim).unwrap()).collect();
    let workloads: Vec<_> = default_workloads(&sim).into_iter().take(4).collect();
    let grid = Grid { t_refp: vec![1.173, 2.283], temps: vec![60.0, 70.0], n_exp: 3, ..Grid::default() };

    let mut trace_bytes = Vec::new();
    write_trace(&generate_trace(&workloads[0], sim.geometry.capacity_words()).unwrap(), &mut trace_bytes).unwrap();
    let labeled = build_dataset(&workloads, &devices, &grid, &sim, &feat).unwrap();
    let mut csv = Vec::new();
    write_dataset_csv(&labeled.rows, &mut csv).unwrap();
    let ds = Dataset::from_rows(&labeled.rows, TargetKind::Wer).unwrap();
    let mut model = Vec::new();
    let cfg = ModelConfig {
        rdf: RdfParams { n_trees: 10, ..RdfParams::default() },
        ..ModelConfig::new(ModelKind::Rdf, FeatureSetId::Set2)
    };
    save_model(&train(&ds, &cfg).unwrap(), &mut model).unwrap();
    let mut cv = Vec::new();
    write_report_csv(&[loo_by_workload(&ds, &cfg).unwrap()], &mut cv).unwrap();
    (trace_bytes, csv, model, cv)
}

fn determinism_and_round_trips() -> Outcome {
    let t0 = Instant::now();
    let (a, b) = (small_run(), small_run());
    let same = [a.0 == b.0, a.1 == b.1, a.2 == b.2, a.3 == b.3];
    let names = ["trace", "dataset", "model", "crossval report"];
    let differing: BTreeSet<&str> = names.iter().zip(same).filter(|(_, s)| !s).map(|(n, _)| *n).collect();

    let runner = || {
        let config = Config { cases: props::CASES, failure_persistence: None, ..Config::default() };
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha))
    };
    let mut failures = Vec::new();
    if let Err(e) = runner().run(&props::any_trace(), |t| props::trace_round_trip(&t)) {
        failures.push(format!("trace: {e}"));
    }
    if let Err(e) = runner().run(&props::any_rows(), |rows| props::dataset_round_trip(&rows)) {
        failures.push(format!("dataset: {e}"));
    }
    if let Err(e) = runner().run(&props::any_model_case(), |(ds, cfg)| props::model_round_trip(&ds, &cfg)) {
        failures.push(format!("model: {e}"));
    }
    let pass = differing.is_empty() && failures.is_empty();
    let detail = if pass {
        format!("repeated runs byte-identical; {} round-trip cases per format", props::CASES)
    } else {
        format!("differing: {differing:?}; round-trip failures: {failures:?}")
    };
    report("10", "determinism and round-trips", pass, detail, t0)
}

fn main() {
    let started = Instant::now();
    let mut results = vec![feature_oracles(), model_oracles(), error_arithmetic()];
    let study = default_study();
    results.push(wer_trends(&study));
    results.push(pue_trends(&study));
    let t_models = Instant::now();
    let ds = Dataset::from_rows(&study.labeled.rows, TargetKind::Wer).unwrap();
    let models = cross_validate(&ds);
    results.push(model_direction(&models, t_models));
    results.push(baseline_gap(&models, t_models));
    results.push(latency(&ds));
    results.push(ranking(&study));
    results.push(determinism_and_round_trips());

    let failed: Vec<&Outcome> = results.iter().filter(|o| !o.pass).collect();
    println!("\n{} of {} criteria passed in {:.1?}", results.len() - failed.len(), results.len(), started.elapsed());
    for o in &failed {
        println!("failed: {} {} ({})", o.id, o.name, o.detail);
    }
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
