//! Flat `key = value` configuration with per-key flag overrides.
//!
//! Relative paths read from a config file resolve against the directory
//! holding that file; relative paths given as flags resolve against the
//! working directory.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use riskrel::training::TrainConfig;

/// Keys accepted outside the training block.
const PIPELINE_KEYS: [&str; 17] = [
    "root",
    "workdir",
    "prices",
    "gics",
    "retrieval",
    "sections",
    "min_tokens",
    "view",
    "train",
    "val",
    "min_span",
    "overlap_cap",
    "max_pairs_per_paragraph",
    "threshold",
    "grid",
    "ks",
    "top",
];

fn known_key(key: &str) -> bool {
    PIPELINE_KEYS.contains(&key) || TrainConfig::KEYS.contains(&key)
}

#[derive(Debug, Clone)]
struct Entry {
    value: String,
    base: PathBuf,
}

#[derive(Debug, Clone, Default)]
pub struct Settings {
    entries: BTreeMap<String, Entry>,
}

impl Settings {
    /// Reads `path` when given; otherwise starts empty.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let mut settings = Settings::default();
        let Some(path) = path else {
            return Ok(settings);
        };
        let text = fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let at = || format!("{}:{}", path.display(), n + 1);
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("{}: expected `key = value`", at()))?;
            let (key, value) = (key.trim(), value.trim());
            if !known_key(key) {
                bail!("{}: unknown key `{key}`", at());
            }
            if settings.entries.contains_key(key) {
                bail!("{}: duplicate key `{key}`", at());
            }
            settings.entries.insert(
                key.to_string(),
                Entry {
                    value: value.to_string(),
                    base: base.clone(),
                },
            );
        }
        Ok(settings)
    }

    /// Applies a command-line override.
    pub fn set(&mut self, key: &str, value: Option<String>) {
        debug_assert!(known_key(key), "unregistered key {key}");
        if let Some(value) = value {
            self.entries.insert(
                key.to_string(),
                Entry {
                    value,
                    base: PathBuf::new(),
                },
            );
        }
    }

    pub fn set_path(&mut self, key: &str, value: Option<PathBuf>) {
        self.set(key, value.map(|p| p.to_string_lossy().into_owned()));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(|e| e.value.as_str())
    }

    pub fn parse<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| anyhow!("invalid value `{v}` for {key}: {e}"))
            })
            .transpose()
    }

    pub fn parse_or<T: FromStr>(&self, key: &str, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        Ok(self.parse(key)?.unwrap_or(default))
    }

    pub fn path(&self, key: &str) -> Option<PathBuf> {
        self.entries.get(key).map(|e| e.base.join(&e.value))
    }

    pub fn require_path(&self, key: &str) -> Result<PathBuf> {
        self.path(key)
            .ok_or_else(|| anyhow!("missing {key}: pass --{key} or set `{key}` in the config"))
    }

    /// The seed must be explicit; there is no clock-based fallback.
    pub fn seed(&self) -> Result<u64> {
        self.parse("seed")?
            .ok_or_else(|| anyhow!("missing seed: pass --seed or set `seed` in the config"))
    }

    /// Entries for the training block, in key order.
    pub fn training(&self) -> BTreeMap<String, String> {
        self.entries
            .iter()
            .filter(|(k, _)| TrainConfig::KEYS.contains(&k.as_str()))
            .map(|(k, e)| (k.clone(), e.value.clone()))
            .collect()
    }

    /// An artifact path: the explicit value, else `name` under the workdir.
    pub fn artifact(&self, explicit: Option<PathBuf>, name: &str) -> Result<PathBuf> {
        if let Some(p) = explicit {
            return Ok(p);
        }
        let workdir = self
            .path("workdir")
            .ok_or_else(|| anyhow!("no path for {name}: pass it explicitly or set --workdir"))?;
        Ok(workdir.join(name))
    }

    /// Like [`Settings::artifact`] but `None` when neither source is set.
    pub fn optional_artifact(&self, explicit: Option<PathBuf>, name: &str) -> Option<PathBuf> {
        explicit.or_else(|| self.path("workdir").map(|w| w.join(name)))
    }
}
