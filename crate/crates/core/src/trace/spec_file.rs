//! Workload specs as `key = value` text, the input of `gen-trace --spec`.

use super::{ReuseProfile, TraceError, WorkloadSpec};
use crate::kv::{parse_kv, render_kv};

const KEYS: [&str; 10] = [
    "name",
    "n_instructions",
    "footprint_words",
    "target_access_rate",
    "cpi",
    "write_fraction",
    "value_alphabet_size",
    "reuse_profile",
    "threads",
    "seed",
];

impl WorkloadSpec {
    /// Parses a spec file. Every key is required; unknown keys are rejected.
    pub fn from_kv_text(text: &str) -> Result<WorkloadSpec, TraceError> {
        let map = parse_kv(text).map_err(TraceError::Metadata)?;
        if let Some(k) = map.keys().find(|k| !KEYS.contains(&k.as_str())) {
            return Err(TraceError::Metadata(format!("unknown key `{k}`")));
        }
        let get = |field: &'static str| {
            map.get(field)
                .map(String::as_str)
                .ok_or_else(|| TraceError::InvalidSpec { field, reason: "missing".into() })
        };
        fn num<T: std::str::FromStr>(field: &'static str, v: &str) -> Result<T, TraceError> {
            v.parse().map_err(|_| TraceError::InvalidSpec { field, reason: format!("cannot parse `{v}`") })
        }
        let profile: ReuseProfile = get("reuse_profile")?
            .parse()
            .map_err(|reason| TraceError::InvalidSpec { field: "reuse_profile", reason })?;
        Ok(WorkloadSpec {
            name: get("name")?.to_string(),
            n_instructions: num("n_instructions", get("n_instructions")?)?,
            footprint_words: num("footprint_words", get("footprint_words")?)?,
            target_access_rate: num("target_access_rate", get("target_access_rate")?)?,
            cpi: num("cpi", get("cpi")?)?,
            write_fraction: num("write_fraction", get("write_fraction")?)?,
            value_alphabet_size: num("value_alphabet_size", get("value_alphabet_size")?)?,
            reuse_profile: profile,
            threads: num("threads", get("threads")?)?,
            seed: num("seed", get("seed")?)?,
        })
    }

    pub fn to_kv_text(&self) -> String {
        render_kv([
            ("name", self.name.clone()),
            ("n_instructions", self.n_instructions.to_string()),
            ("footprint_words", self.footprint_words.to_string()),
            ("target_access_rate", self.target_access_rate.to_string()),
            ("cpi", self.cpi.to_string()),
            ("write_fraction", self.write_fraction.to_string()),
            ("value_alphabet_size", self.value_alphabet_size.to_string()),
            ("reuse_profile", self.reuse_profile.to_string()),
            ("threads", self.threads.to_string()),
            ("seed", self.seed.to_string()),
        ])
    }
}
