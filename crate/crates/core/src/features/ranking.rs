use super::{spearman, FeatureError, FeatureVector};

/// Ranks program features by |Spearman r| against `targets`, strongest
/// first; ties break by feature name. Features with constant values across
/// the samples are reported with r = 0.
pub fn rank_features(samples: &[FeatureVector], targets: &[f64]) -> Result<Vec<(String, f64)>, FeatureError> {
    if samples.len() != targets.len() {
        return Err(FeatureError::LengthMismatch(samples.len(), targets.len()));
    }
    if samples.len() < 3 {
        return Err(FeatureError::TooFewSamples { needed: 3, got: samples.len() });
    }
    if targets.iter().all(|t| *t == targets[0]) {
        return Err(FeatureError::ConstantTarget);
    }
    let mut out = Vec::new();
    for name in samples[0].program_feature_names() {
        let xs: Vec<f64> = samples
            .iter()
            .map(|s| s.column(&name).ok_or_else(|| FeatureError::Env(format!("sample lacks column `{name}`"))))
            .collect::<Result<_, _>>()?;
        let r = match spearman(&xs, targets) {
            Ok(r) => r,
            Err(FeatureError::ZeroVariance) => 0.0,
            Err(e) => return Err(e),
        };
        out.push((name, r));
    }
    out.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
    Ok(out)
}
