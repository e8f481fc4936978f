//! Summaries of a labeled grid used to check the characterization trends.

use std::collections::BTreeMap;

use crate::models::LabeledRow;
use crate::pipeline::SystemPue;

fn key(x: f64) -> u64 {
    x.to_bits()
}

/// Mean WER per refresh period over every row (all workloads, devices and
/// temperatures), sorted by refresh period.
pub fn mean_wer_by_t_refp(rows: &[LabeledRow]) -> Vec<(f64, f64)> {
    let mut acc: BTreeMap<u64, (f64, f64, usize)> = BTreeMap::new();
    for r in rows {
        if let Some(w) = r.wer {
            let e = acc.entry(key(r.features.t_refp)).or_insert((r.features.t_refp, 0.0, 0));
            e.1 += w;
            e.2 += 1;
        }
    }
    let mut v: Vec<(f64, f64)> = acc.values().map(|&(t, s, n)| (t, s / n as f64)).collect();
    v.sort_by(|a, b| a.0.total_cmp(&b.0));
    v
}

/// Coefficient of determination of the least-squares line through `(x, y)`.
pub fn r_squared(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy * sxy / (sxx * syy)
}

/// R² of log10(mean WER) against refresh period; `None` if any mean is zero.
pub fn log_linear_r2(means: &[(f64, f64)]) -> Option<f64> {
    if means.iter().any(|m| m.1 <= 0.0) {
        return None;
    }
    let xs: Vec<f64> = means.iter().map(|m| m.0).collect();
    let ys: Vec<f64> = means.iter().map(|m| m.1.log10()).collect();
    Some(r_squared(&xs, &ys))
}

fn matches(r: &LabeledRow, t_refp: f64, temp: f64) -> bool {
    r.features.t_refp == t_refp && r.features.temp == temp
}

/// Max over min WER across workloads on one device at one point. Returns
/// `(max workload, max, min workload, min)`.
pub fn workload_extremes(
    rows: &[LabeledRow],
    device: &str,
    t_refp: f64,
    temp: f64,
) -> Option<(String, f64, String, f64)> {
    let pts: Vec<(&str, f64)> = rows
        .iter()
        .filter(|r| r.features.device == device && matches(r, t_refp, temp))
        .filter_map(|r| r.wer.map(|w| (r.features.workload.as_str(), w)))
        .collect();
    let max = pts.iter().max_by(|a, b| a.1.total_cmp(&b.1))?;
    let min = pts.iter().min_by(|a, b| a.1.total_cmp(&b.1))?;
    Some((max.0.to_string(), max.1, min.0.to_string(), min.1))
}

/// Mean WER over workloads per device at one point, in device-name order.
pub fn device_means(rows: &[LabeledRow], t_refp: f64, temp: f64) -> Vec<(String, f64)> {
    let mut acc: BTreeMap<String, (f64, usize)> = BTreeMap::new();
    for r in rows.iter().filter(|r| matches(r, t_refp, temp)) {
        if let Some(w) = r.wer {
            let e = acc.entry(r.features.device.clone()).or_insert((0.0, 0));
            e.0 += w;
            e.1 += 1;
        }
    }
    acc.into_iter().map(|(d, (s, n))| (d, s / n as f64)).collect()
}

/// Ratio of the largest to the smallest per-device mean WER at one point.
pub fn device_spread(rows: &[LabeledRow], t_refp: f64, temp: f64) -> Option<f64> {
    let m = device_means(rows, t_refp, temp);
    let hi = m.iter().map(|x| x.1).fold(f64::NEG_INFINITY, f64::max);
    let lo = m.iter().map(|x| x.1).fold(f64::INFINITY, f64::min);
    (lo > 0.0 && hi.is_finite()).then(|| hi / lo)
}

/// Machine-level P_UE per workload at one point.
pub fn system_pue_at(system: &[SystemPue], t_refp: f64, temp: f64) -> Vec<(String, f64)> {
    system
        .iter()
        .filter(|s| s.env.t_refp == t_refp && s.env.temp == temp)
        .map(|s| (s.workload.clone(), s.p_ue))
        .collect()
}
