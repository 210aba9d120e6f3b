//! `key=value` configuration files.
//!
//! One setting per line, `#` starts a comment, blank lines are ignored. Keys
//! use the long flag names without dashes (`max-cycles=500`).

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use tsd_core::{Error, Result};

/// Parsed settings, keyed by flag name.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConfigFile {
    entries: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn parse(text: &str) -> Result<Self> {
        let mut entries = BTreeMap::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::InvalidArgument(format!("line {}: expected key=value", lineno + 1)))?;
            let key = key.trim().trim_start_matches("--").to_string();
            if key.is_empty() {
                return Err(Error::InvalidArgument(format!("line {}: empty key", lineno + 1)));
            }
            entries.insert(key, value.trim().to_string());
        }
        Ok(Self { entries })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)
            .map_err(|e| Error::InvalidArgument(format!("reading {}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    /// Fails on any key outside `allowed`.
    pub fn check_keys(&self, allowed: &[&str]) -> Result<()> {
        match self.entries.keys().find(|k| !allowed.contains(&k.as_str())) {
            Some(k) => Err(Error::InvalidArgument(format!(
                "unknown configuration key `{k}` (expected one of {})",
                allowed.join(", ")
            ))),
            None => Ok(()),
        }
    }

    /// Value of `key` parsed as `T`, if present.
    pub fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.parse::<T>()
                    .map_err(|e| Error::InvalidArgument(format!("configuration key `{key}`: {e}")))
            })
            .transpose()
    }

    /// Comma-separated list under `key`, if present.
    pub fn list<T: std::str::FromStr>(&self, key: &str) -> Result<Option<Vec<T>>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|s| {
                        s.trim()
                            .parse::<T>()
                            .map_err(|e| Error::InvalidArgument(format!("configuration key `{key}`: {e}")))
                    })
                    .collect()
            })
            .transpose()
    }
}
