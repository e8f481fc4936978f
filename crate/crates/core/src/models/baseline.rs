use std::collections::BTreeMap;

use super::ModelError;

/// Key of an environment cell: refresh period and temperature, by bit pattern.
pub type EnvKey = (u64, u64);

pub fn env_key(t_refp: f64, temp: f64) -> EnvKey {
    (t_refp.to_bits(), temp.to_bits())
}

/// Workload-unaware lookup: mean target per (device, t_refp, temp) with a
/// per-(t_refp, temp) fallback across devices. Means are in model space.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Baseline {
    pub cells: BTreeMap<(String, EnvKey), (f64, u64)>,
    pub fallback: BTreeMap<EnvKey, (f64, u64)>,
}

impl Baseline {
    /// `samples` are (device, t_refp, temp, target in model space).
    pub fn fit<'a>(samples: impl IntoIterator<Item = (&'a str, f64, f64, f64)>) -> Result<Baseline, ModelError> {
        let mut sums: BTreeMap<(String, EnvKey), (f64, u64)> = BTreeMap::new();
        let mut fb: BTreeMap<EnvKey, (f64, u64)> = BTreeMap::new();
        for (dev, t, temp, z) in samples {
            let k = env_key(t, temp);
            let e = sums.entry((dev.to_string(), k)).or_default();
            e.0 += z;
            e.1 += 1;
            let f = fb.entry(k).or_default();
            f.0 += z;
            f.1 += 1;
        }
        if sums.is_empty() {
            return Err(ModelError::EmptyDataset);
        }
        let mean = |(s, n): (f64, u64)| (s / n as f64, n);
        Ok(Baseline {
            cells: sums.into_iter().map(|(k, v)| (k, mean(v))).collect(),
            fallback: fb.into_iter().map(|(k, v)| (k, mean(v))).collect(),
        })
    }

    pub fn predict(&self, device: &str, t_refp: f64, temp: f64) -> Result<f64, ModelError> {
        let k = env_key(t_refp, temp);
        if let Some((m, _)) = self.cells.get(&(device.to_string(), k)) {
            return Ok(*m);
        }
        self.fallback
            .get(&k)
            .map(|(m, _)| *m)
            .ok_or_else(|| ModelError::EmptyCell(format!("t_refp {t_refp} s, {temp} °C")))
    }
}
