//! Effective run configuration and the plain `key = value` config file.

use std::collections::BTreeMap;
use std::str::FromStr;

use nppt_core::distill::{SearchConfig, SymmetryMode};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Everything a command ran with. Echoed into every artifact; unset
/// fields did not apply to the command.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub d: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub alpha: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta_min: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub beta_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub copies: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub k: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub restarts: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub max_iters: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub tol: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub seed: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub samples: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trials: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub symmetry: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub long_run: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub search: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub format: Option<String>,
}

impl RunConfig {
    pub fn new(command: &str) -> Self {
        Self { command: command.into(), ..Self::default() }
    }

    /// Fills every unset parameter the command reads with the value it
    /// would default to, so the echoed configuration is complete.
    pub fn with_defaults(mut self) -> Self {
        let search = SearchConfig::default();
        let searches = match self.command.as_str() {
            "search" => true,
            "sweep" => self.search != Some(false),
            "certify" => self.search == Some(true),
            _ => false,
        };
        match self.command.as_str() {
            "thresholds" => {
                self.copies.get_or_insert(3);
            }
            "sweep" => {
                self.copies.get_or_insert(1);
            }
            "certify" => {
                self.copies.get_or_insert(3);
            }
            "twirl-check" => {
                self.trials.get_or_insert(20);
                self.samples.get_or_insert(2000);
                self.seed.get_or_insert(0);
            }
            "relations-check" => {
                self.copies.get_or_insert(2);
                self.samples.get_or_insert(1000);
                self.seed.get_or_insert(0);
            }
            _ => {}
        }
        if searches {
            self.restarts.get_or_insert(search.restarts);
            self.max_iters.get_or_insert(search.max_iters);
            self.tol.get_or_insert(search.tol);
            self.seed.get_or_insert(search.seed);
            self.symmetry.get_or_insert_with(|| "off".into());
        }
        self
    }

    /// Search settings at `copies` copies. The diagonal restriction only
    /// exists for two copies and is dropped elsewhere.
    pub fn search_config(&self, copies: usize) -> Result<SearchConfig> {
        let defaults = SearchConfig::default();
        let symmetry = match self.symmetry.as_deref() {
            None => SymmetryMode::Off,
            Some(s) => parse_symmetry(s)?,
        };
        Ok(SearchConfig {
            restarts: self.restarts.unwrap_or(defaults.restarts),
            max_iters: self.max_iters.unwrap_or(defaults.max_iters),
            tol: self.tol.unwrap_or(defaults.tol),
            seed: self.seed.unwrap_or(defaults.seed),
            symmetry: if copies == 2 { symmetry } else { SymmetryMode::Off },
            allow_long_run: self.long_run.unwrap_or(false),
        })
    }
}

pub fn parse_symmetry(s: &str) -> Result<SymmetryMode> {
    match s {
        "off" => Ok(SymmetryMode::Off),
        "on" | "diagonal" => Ok(SymmetryMode::DiagonalFirstVector),
        other => Err(CliError::invalid(format!("unknown symmetry mode {other:?} (expected off or diagonal)"))),
    }
}

/// Values read from a config file, keyed by flag name with `-` and `_`
/// treated alike.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::invalid(format!("config line {}: expected key = value", lineno + 1)));
            };
            values.insert(normalize_key(key.trim()), value.trim().to_string());
        }
        Ok(Self { values })
    }

    pub fn read(path: &std::path::Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// `flag` if given, otherwise the file's value for `key`.
    pub fn resolve<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(&normalize_key(key)) {
            None => Ok(None),
            Some(raw) => raw
                .parse()
                .map(Some)
                .map_err(|e| CliError::invalid(format!("config key {key}: cannot parse {raw:?}: {e}"))),
        }
    }

    /// Boolean switch: set by the flag or by `key = true` in the file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool> {
        Ok(flag || self.resolve::<bool>(None, key)?.unwrap_or(false))
    }
}

fn normalize_key(key: &str) -> String {
    key.replace('-', "_")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_and_resolves() {
        let file = ConfigFile::parse("# search\nd = 3\nbeta=0.5 # inline\n\nlong-run = true\n").unwrap();
        assert_eq!(file.resolve::<usize>(None, "d").unwrap(), Some(3));
        assert_eq!(file.resolve::<usize>(Some(4), "d").unwrap(), Some(4));
        assert_eq!(file.resolve::<f64>(None, "beta").unwrap(), Some(0.5));
        assert!(file.switch(false, "long_run").unwrap());
        assert_eq!(file.resolve::<u64>(None, "seed").unwrap(), None);
        assert!(file.resolve::<usize>(None, "beta").is_err());
        assert!(ConfigFile::parse("nonsense").is_err());
    }

    #[test]
    fn symmetry_applies_to_two_copies_only() {
        let cfg = RunConfig { symmetry: Some("diagonal".into()), ..RunConfig::new("search") };
        assert_eq!(cfg.search_config(2).unwrap().symmetry, SymmetryMode::DiagonalFirstVector);
        assert_eq!(cfg.search_config(1).unwrap().symmetry, SymmetryMode::Off);
        assert!(parse_symmetry("sideways").is_err());
    }
}
