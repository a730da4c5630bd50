use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::Arc;

use crate::bergman::SymbolField;
use crate::carleson::DiscMeasure;
use crate::error::{LabError, Result};
use crate::weights::RadialWeight;

/// Every key a scenario file may set.
pub const KNOWN_KEYS: &[&str] = &[
    "experiment",
    "omega",
    "v",
    "eta",
    "p",
    "q",
    "symbol",
    "measure",
    "r",
    "r_max",
    "seed",
    "d",
    "d_max",
    "kernel_tol",
    "grid_angles",
    "grid_radii",
    "grid_depth",
    "n_poly",
    "poly_degree",
    "atoms",
    "samples",
    "smoothness",
    "band",
    "sensitivity",
    "qp_nodes",
    "qp_angles",
    "expect_in_r",
    "expect_in_dhat",
    "expect_in_dcheck",
    "expect_beta",
    "beta_tol",
    "expect_ap",
    "expect_vanishing",
    "expect_compact",
    "expect_zero",
    "rademacher_min",
];

/// Flat `key = value` configuration; `#` starts a comment.
#[derive(Debug, Clone, Default)]
pub struct Config {
    entries: BTreeMap<String, String>,
    base_dir: Option<PathBuf>,
}

impl Config {
    pub fn parse_str(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut cfg = Config {
            entries: BTreeMap::new(),
            base_dir: base_dir.map(Path::to_path_buf),
        };
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| LabError::Parse(format!("line {}: expected `key = value`", i + 1)))?;
            cfg.set(k.trim(), v.trim())
                .map_err(|e| LabError::Parse(format!("line {}: {e}", i + 1)))?;
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Parse(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse_str(&text, path.parent())
    }

    /// Set or override one key.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        if !KNOWN_KEYS.contains(&key) {
            return Err(LabError::Parse(format!("unknown config key `{key}`")));
        }
        self.entries.insert(key.to_string(), value.to_string());
        Ok(())
    }

    /// Apply a `key=value` override.
    pub fn apply_override(&mut self, kv: &str) -> Result<()> {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| LabError::Parse(format!("override `{kv}` is not key=value")))?;
        self.set(k.trim(), v.trim())
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn base_dir(&self) -> Option<&Path> {
        self.base_dir.as_deref()
    }
}

/// A config being read by an experiment; every value read is echoed with its
/// effective setting (defaults included).
#[derive(Debug, Clone)]
pub struct Scenario {
    config: Config,
    echo: BTreeMap<String, String>,
}

impl Scenario {
    pub fn new(config: Config) -> Self {
        Scenario {
            config,
            echo: BTreeMap::new(),
        }
    }

    pub fn echo(&self) -> &BTreeMap<String, String> {
        &self.echo
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.config.get(key)
    }

    fn parsed<T: FromStr + Display>(&mut self, key: &str, default: Option<T>) -> Result<Option<T>> {
        let value = match self.config.get(key) {
            Some(s) => Some(
                s.parse::<T>()
                    .map_err(|_| LabError::Parse(format!("config `{key}`: cannot parse `{s}`")))?,
            ),
            None => default,
        };
        if let Some(v) = &value {
            self.echo.insert(key.to_string(), v.to_string());
        }
        Ok(value)
    }

    pub fn f64(&mut self, key: &str, default: f64) -> Result<f64> {
        Ok(self.parsed(key, Some(default))?.unwrap_or(default))
    }

    pub fn usize(&mut self, key: &str, default: usize) -> Result<usize> {
        Ok(self.parsed(key, Some(default))?.unwrap_or(default))
    }

    pub fn u64(&mut self, key: &str, default: u64) -> Result<u64> {
        Ok(self.parsed(key, Some(default))?.unwrap_or(default))
    }

    pub fn bool(&mut self, key: &str, default: bool) -> Result<bool> {
        Ok(self.parsed(key, Some(default))?.unwrap_or(default))
    }

    pub fn opt_f64(&mut self, key: &str) -> Result<Option<f64>> {
        self.parsed(key, None)
    }

    pub fn opt_bool(&mut self, key: &str) -> Result<Option<bool>> {
        self.parsed(key, None)
    }

    pub fn string(&mut self, key: &str, default: &str) -> String {
        let v = self.config.get(key).unwrap_or(default).to_string();
        self.echo.insert(key.to_string(), v.clone());
        v
    }

    pub fn weight(&mut self, key: &str, default: &str) -> Result<Arc<RadialWeight>> {
        let spec = self.string(key, default);
        RadialWeight::parse(&spec, self.config.base_dir())
    }

    pub fn symbol(&mut self, default: &str) -> Result<SymbolField> {
        let spec = self.string("symbol", default);
        SymbolField::parse(&spec, self.config.base_dir())
    }

    pub fn measure(&mut self, default: &str) -> Result<DiscMeasure> {
        let spec = self.string("measure", default);
        DiscMeasure::parse(&spec, self.config.base_dir())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_override() {
        let mut cfg = Config::parse_str("# scenario\nomega = power:alpha=1\np = 2 # inline\n\nq=3\n", None).unwrap();
        assert_eq!(cfg.get("omega"), Some("power:alpha=1"));
        cfg.apply_override("p=2.5").unwrap();
        let mut s = Scenario::new(cfg);
        assert_eq!(s.f64("p", 0.0).unwrap(), 2.5);
        assert_eq!(s.usize("d", 10).unwrap(), 10);
        assert_eq!(s.echo().get("d").map(String::as_str), Some("10"));
        assert!(Config::parse_str("bogus = 1", None).is_err());
        assert!(Config::parse_str("p 2", None).is_err());
        let mut bad = Scenario::new(Config::parse_str("p = two", None).unwrap());
        assert!(bad.f64("p", 2.0).is_err());
    }
}
