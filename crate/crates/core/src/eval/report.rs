use std::fmt::Write as _;
use std::io::Write;

use super::crossval::CrossValReport;
use super::EvalError;

fn opt(v: Option<f64>) -> String {
    v.map(|x| format!("{x:.6}")).unwrap_or_default()
}

/// Group-level MPE table for every report. Contains no timings, so it is
/// reproducible.
pub fn write_report_csv<W: Write>(reports: &[CrossValReport], sink: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["model", "target", "group", "name", "mpe", "scored", "excluded_zero"])?;
    for r in reports {
        let target = r.target.to_string();
        let (scored, excluded) = (r.scored.to_string(), r.excluded_zero.to_string());
        w.write_record([
            &r.label,
            &target,
            "overall",
            "samples",
            &format!("{:.6}", r.overall_mpe),
            &scored,
            &excluded,
        ])?;
        w.write_record([
            &r.label,
            &target,
            "overall",
            "device_mean",
            &format!("{:.6}", r.device_mean_mpe),
            &scored,
            &excluded,
        ])?;
        for (group, map) in [("workload", &r.per_workload), ("device", &r.per_device)] {
            for (name, g) in map {
                w.write_record([
                    &r.label,
                    &target,
                    group,
                    name,
                    &opt(g.mpe),
                    &g.scored.to_string(),
                    &g.excluded_zero.to_string(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

/// Every held-out prediction of every report.
pub fn write_predictions_csv<W: Write>(reports: &[CrossValReport], sink: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record(["model", "workload", "device", "temp", "t_refp", "actual", "predicted", "percent_error"])?;
    for r in reports {
        for p in &r.predictions {
            w.write_record([
                r.label.clone(),
                p.workload.clone(),
                p.device.clone(),
                p.temp.to_string(),
                p.t_refp.to_string(),
                p.actual.to_string(),
                p.predicted.to_string(),
                opt(p.percent_error()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

/// One row per model configuration, timings included.
pub fn write_comparison_csv<W: Write>(reports: &[CrossValReport], sink: W) -> Result<(), EvalError> {
    let mut w = csv::Writer::from_writer(sink);
    w.write_record([
        "model",
        "kind",
        "feature_set",
        "target",
        "overall_mpe",
        "device_mean_mpe",
        "scored",
        "excluded_zero",
        "folds",
        "train_ms",
        "predict_median_us",
    ])?;
    for r in reports {
        w.write_record([
            r.label.clone(),
            r.kind.to_string(),
            r.feature_set.to_string(),
            r.target.to_string(),
            format!("{:.6}", r.overall_mpe),
            format!("{:.6}", r.device_mean_mpe),
            r.scored.to_string(),
            r.excluded_zero.to_string(),
            r.folds.to_string(),
            format!("{:.3}", r.train_time.as_secs_f64() * 1e3),
            format!("{:.3}", r.predict_median.as_secs_f64() * 1e6),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Plain-text summary of one report.
pub fn summary(r: &CrossValReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{} ({}), {} folds", r.label, r.target, r.folds);
    let _ = writeln!(
        s,
        "  MPE {:.2}% over {} samples ({} zero actuals excluded), device mean {:.2}%",
        r.overall_mpe, r.scored, r.excluded_zero, r.device_mean_mpe
    );
    for (name, g) in &r.per_device {
        let mpe = g.mpe.map_or("n/a".to_string(), |m| format!("{m:.2}%"));
        let _ = writeln!(s, "  {name:<16} {mpe:>8}");
    }
    let _ = writeln!(s, "  train {:.1?}, median predict {:.1?}", r.train_time, r.predict_median);
    s
}
