use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use super::{CliError, Command, RunConfig};
use crate::dramsim::{read_dimm, DimmProfile};
use crate::eval::{
    best_knn, loo_by_workload, summary, svg, write_comparison_csv, write_predictions_csv, write_report_csv,
    CrossValReport, K_SWEEP,
};
use crate::features::{extract_features, rank_features, FeatureConfig, FeatureSetId, FeatureVector};
use crate::models::{load_model, read_dataset_csv, save_model, train, write_dataset_csv, Dataset, ModelKind};
use crate::pipeline::{label_trace, Grid, Labeled};
use crate::suite::{default_devices, default_workloads};
use crate::trace::{generate_trace, read_trace, write_trace, WorkloadSpec};

pub(super) fn dispatch(cmd: &Command, cfg: &RunConfig) -> Result<(), CliError> {
    match cmd {
        Command::GenTrace { spec, workload, print_spec } => gen_trace(cfg, spec.as_deref(), workload, *print_spec),
        Command::BuildDataset { traces, workload, system } => {
            build_dataset(cfg, traces.as_deref(), workload, system.as_deref())
        }
        Command::Correlate { dataset } => correlate(cfg, dataset),
        Command::Train { dataset } => train_cmd(cfg, dataset),
        Command::Crossval { dataset, all } => crossval(cfg, dataset, *all),
        Command::Predict { model_file, features, trace } => {
            predict(cfg, model_file, features.as_deref(), trace.as_deref())
        }
        Command::Config => {
            print!("{}", cfg.to_kv_text());
            Ok(())
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, CliError> {
    File::open(path).map(BufReader::new).map_err(|e| CliError::io(path, e))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    }
    File::create(path).map(BufWriter::new).map_err(|e| CliError::io(path, e))
}

/// Output sink: the `--out` file if given, stdout otherwise.
fn sink(out: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    Ok(match out {
        Some(p) => Box::new(create(p)?),
        None => Box::new(std::io::stdout().lock()),
    })
}

fn feature_config(cfg: &RunConfig) -> FeatureConfig {
    FeatureConfig { f_clk: cfg.sim.f_clk, geometry: cfg.sim.geometry, ..FeatureConfig::default() }
}

/// Suite workloads named in `names` (or in the config), all of them when both are empty.
fn suite_workloads(cfg: &RunConfig, names: &[String]) -> Result<Vec<WorkloadSpec>, CliError> {
    let all = default_workloads(&cfg.sim);
    let wanted = if names.is_empty() { &cfg.workloads } else { names };
    if wanted.is_empty() {
        return Ok(all);
    }
    wanted
        .iter()
        .map(|n| {
            all.iter().find(|w| &w.name == n).cloned().ok_or_else(|| {
                let known: Vec<&str> = all.iter().map(|w| w.name.as_str()).collect();
                CliError::Validation(format!("workload `{n}` is not in the suite ({})", known.join(", ")))
            })
        })
        .collect()
}

/// Suite device ids are built from the config; anything else is read as a profile file.
fn resolve_devices(cfg: &RunConfig) -> Result<Vec<DimmProfile>, CliError> {
    let suite = default_devices();
    if cfg.devices.is_empty() {
        return Ok(suite.iter().map(|d| d.build(&cfg.sim)).collect::<Result<_, _>>()?);
    }
    cfg.devices
        .iter()
        .map(|name| match suite.iter().find(|d| &d.id == name) {
            Some(d) => Ok(d.build(&cfg.sim)?),
            None => {
                let path = Path::new(name);
                if !path.exists() {
                    return Err(CliError::Validation(format!(
                        "device `{name}` is neither a suite device nor a profile file"
                    )));
                }
                Ok(read_dimm(open(path)?)?)
            }
        })
        .collect()
}

fn gen_trace(cfg: &RunConfig, spec: Option<&Path>, names: &[String], print_spec: bool) -> Result<(), CliError> {
    let specs = match spec {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            vec![WorkloadSpec::from_kv_text(&text)?]
        }
        None => suite_workloads(cfg, names)?,
    };
    let capacity = cfg.sim.geometry.capacity_words();
    if print_spec {
        for s in &specs {
            s.validate(capacity)?;
        }
        let mut w = sink(cfg.out.as_deref())?;
        let text: Vec<String> = specs.iter().map(|s| s.to_kv_text()).collect();
        write!(w, "{}", text.join("\n"))?;
        w.flush()?;
        return Ok(());
    }
    let single = specs.len() == 1;
    for s in &specs {
        let path = match (&cfg.out, single) {
            (Some(p), true) => p.clone(),
            (Some(dir), false) => dir.join(format!("{}.dotr", s.name)),
            (None, true) => PathBuf::from(format!("{}.dotr", s.name)),
            (None, false) => PathBuf::from("traces").join(format!("{}.dotr", s.name)),
        };
        let trace = generate_trace(s, capacity)?;
        let mut w = create(&path)?;
        let bytes = write_trace(&trace, &mut w)?;
        w.flush().map_err(|e| CliError::io(&path, e))?;
        eprintln!("{}: {} accesses, {} bytes", path.display(), trace.len(), bytes);
    }
    Ok(())
}

fn trace_files(dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(|e| CliError::io(dir, e))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "dotr"))
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(CliError::Validation(format!("{}: no .dotr files", dir.display())));
    }
    Ok(files)
}

fn build_dataset(
    cfg: &RunConfig,
    traces: Option<&Path>,
    names: &[String],
    system: Option<&Path>,
) -> Result<(), CliError> {
    let devices = resolve_devices(cfg)?;
    let grid = Grid {
        t_refp: cfg.t_refp.clone(),
        temps: cfg.temps.clone(),
        v_dd: cfg.v_dd,
        n_exp: cfg.sim.n_exp,
        seed: cfg.seed,
    };
    let feat = feature_config(cfg);
    let mut labeled = Labeled::default();
    match traces {
        Some(dir) => {
            for path in trace_files(dir)? {
                let trace = read_trace(open(&path)?).map_err(|e| CliError::from(e).context(&path))?;
                labeled.extend(label_trace(&trace, &devices, &grid, &cfg.sim, &feat)?);
            }
        }
        None => {
            for spec in suite_workloads(cfg, names)? {
                let trace = generate_trace(&spec, cfg.sim.geometry.capacity_words())?;
                labeled.extend(label_trace(&trace, &devices, &grid, &cfg.sim, &feat)?);
            }
        }
    }
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("dataset.csv"));
    let mut w = create(&out)?;
    write_dataset_csv(&labeled.rows, &mut w)?;
    w.flush().map_err(|e| CliError::io(&out, e))?;
    eprintln!("{}: {} rows", out.display(), labeled.rows.len());
    if let Some(path) = system {
        let mut w = csv::Writer::from_writer(create(path)?);
        let io = |e: csv::Error| CliError::io(path, e);
        w.write_record(["workload", "t_refp", "v_dd", "temp", "p_ue"]).map_err(io)?;
        for s in &labeled.system {
            let rec = [
                s.workload.clone(),
                s.env.t_refp.to_string(),
                s.env.v_dd.to_string(),
                s.env.temp.to_string(),
                s.p_ue.to_string(),
            ];
            w.write_record(&rec).map_err(io)?;
        }
        w.flush().map_err(|e| CliError::io(path, e))?;
    }
    Ok(())
}

fn load_dataset(cfg: &RunConfig, path: &Path) -> Result<Dataset, CliError> {
    let rows = read_dataset_csv(open(path)?).map_err(|e| CliError::from(e).context(path))?;
    Ok(Dataset::from_rows(&rows, cfg.target)?)
}

fn correlate(cfg: &RunConfig, dataset: &Path) -> Result<(), CliError> {
    let ds = load_dataset(cfg, dataset)?;
    let samples: Vec<FeatureVector> = ds.samples.iter().map(|(f, _)| f.clone()).collect();
    let ranked = rank_features(&samples, &ds.targets())?;
    let mut w = csv::Writer::from_writer(sink(cfg.out.as_deref())?);
    w.write_record(["rank", "feature", "spearman", "abs_spearman"]).map_err(|e| CliError::Io(e.to_string()))?;
    for (i, (name, r)) in ranked.iter().enumerate() {
        let rec = [(i + 1).to_string(), name.clone(), format!("{r:.6}"), format!("{:.6}", r.abs())];
        w.write_record(&rec).map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

fn train_cmd(cfg: &RunConfig, dataset: &Path) -> Result<(), CliError> {
    let (kind, set) = match (cfg.models.as_slice(), cfg.feature_sets.as_slice()) {
        ([k], [s]) => (*k, *s),
        _ => return Err(CliError::Usage("train takes exactly one --model and one --feature-set".into())),
    };
    let ds = load_dataset(cfg, dataset)?;
    let mc = cfg.model_config(kind, set);
    let model = train(&ds, &mc)?;
    let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("model.doml"));
    let mut w = create(&out)?;
    let bytes = save_model(&model, &mut w)?;
    w.flush().map_err(|e| CliError::io(&out, e))?;
    eprintln!("{}: {} on {} samples ({}), {bytes} bytes", out.display(), mc.label(), ds.len(), ds.target);
    Ok(())
}

fn crossval(cfg: &RunConfig, dataset: &Path, all: bool) -> Result<(), CliError> {
    let ds = load_dataset(cfg, dataset)?;
    let (kinds, sets) = if all {
        (ModelKind::ALL.to_vec(), FeatureSetId::ALL.to_vec())
    } else {
        (cfg.models.clone(), cfg.feature_sets.clone())
    };
    let mut reports: Vec<CrossValReport> = Vec::new();
    for kind in &kinds {
        // The baseline ignores program features, so one run covers every set.
        let sets = if *kind == ModelKind::Baseline { &sets[..1] } else { &sets[..] };
        for set in sets {
            let mc = cfg.model_config(*kind, *set);
            let r = match (kind, cfg.k) {
                (ModelKind::Knn, None) => best_knn(&ds, &mc, &K_SWEEP)?,
                _ => loo_by_workload(&ds, &mc)?,
            };
            print!("{}", summary(&r));
            reports.push(r);
        }
    }
    let dir = cfg.out.clone().unwrap_or_else(|| PathBuf::from("crossval"));
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let file = |name: &str| dir.join(name);
    write_report_csv(&reports, create(&file("report.csv"))?)?;
    write_comparison_csv(&reports, create(&file("comparison.csv"))?)?;
    write_predictions_csv(&reports, create(&file("predictions.csv"))?)?;
    let text: String = reports.iter().map(summary).collect();
    std::fs::write(file("summary.txt"), text).map_err(|e| CliError::io(&file("summary.txt"), e))?;

    let bars: Vec<(String, f64)> = reports.iter().map(|r| (r.label.clone(), r.overall_mpe)).collect();
    let target = ds.target.to_string();
    let charts = [("models.svg", svg::bar_chart(&format!("Overall MPE of {target} estimates"), "MPE (%)", &bars))];
    let best = reports
        .iter()
        .filter(|r| r.kind != ModelKind::Baseline || reports.len() == 1)
        .min_by(|a, b| a.overall_mpe.total_cmp(&b.overall_mpe))
        .expect("at least one report");
    let groups = |m: &std::collections::BTreeMap<String, crate::eval::GroupMpe>| -> Vec<(String, f64)> {
        m.iter().filter_map(|(n, g)| g.mpe.map(|v| (n.clone(), v))).collect()
    };
    let title = |by: &str| format!("{} MPE of {target} estimates by {by}", best.label);
    let more = [
        ("per_workload.svg", svg::bar_chart(&title("workload"), "MPE (%)", &groups(&best.per_workload))),
        ("per_device.svg", svg::bar_chart(&title("device"), "MPE (%)", &groups(&best.per_device))),
    ];
    for (name, body) in charts.into_iter().chain(more) {
        std::fs::write(file(name), body).map_err(|e| CliError::io(&file(name), e))?;
    }
    println!("best: {} at {:.2}% MPE; reports in {}", best.label, best.overall_mpe, dir.display());
    Ok(())
}

fn predict(cfg: &RunConfig, model_file: &Path, features: Option<&Path>, trace: Option<&Path>) -> Result<(), CliError> {
    let model = load_model(open(model_file)?).map_err(|e| CliError::from(e).context(model_file))?;
    let queries: Vec<FeatureVector> = match (features, trace) {
        (Some(p), None) => read_dataset_csv(open(p)?)
            .map_err(|e| CliError::from(e).context(p))?
            .into_iter()
            .map(|r| r.features)
            .collect(),
        (None, Some(p)) => {
            let trace = read_trace(open(p)?).map_err(|e| CliError::from(e).context(p))?;
            let devices = if cfg.devices.is_empty() { model.design.devices.clone() } else { cfg.devices.clone() };
            let feat = feature_config(cfg);
            let mut out = Vec::new();
            for env in cfg.points() {
                let base = extract_features(&trace, &env, "", &feat)?;
                out.extend(devices.iter().map(|d| base.with_env(d, env.temp, env.t_refp, env.v_dd)));
            }
            out
        }
        _ => return Err(CliError::Usage("predict needs exactly one of --features or --trace".into())),
    };
    let column = model.target.to_string();
    let mut w = csv::Writer::from_writer(sink(cfg.out.as_deref())?);
    let io = |e: csv::Error| CliError::Io(e.to_string());
    w.write_record(["workload", "device", "temp", "t_refp", "v_dd", &column]).map_err(io)?;
    for q in &queries {
        let y = model.predict(q)?;
        if !y.is_finite() {
            return Err(CliError::Numerical(format!("prediction for {} on {} is {y}", q.workload, q.device)));
        }
        let rec = [
            q.workload.clone(),
            q.device.clone(),
            q.temp.to_string(),
            q.t_refp.to_string(),
            q.v_dd.to_string(),
            y.to_string(),
        ];
        w.write_record(&rec).map_err(io)?;
    }
    w.flush()?;
    Ok(())
}

impl CliError {
    /// Prefixes the message with the file it concerns.
    fn context(self, path: &Path) -> CliError {
        let p = path.display();
        match self {
            CliError::Usage(m) => CliError::Usage(m),
            CliError::Io(m) => CliError::Io(format!("{p}: {m}")),
            CliError::Validation(m) => CliError::Validation(format!("{p}: {m}")),
            CliError::Numerical(m) => CliError::Numerical(format!("{p}: {m}")),
        }
    }
}
