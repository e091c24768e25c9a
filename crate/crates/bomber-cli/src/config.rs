//! `key=value` configuration files that substitute for omitted flags.
//!
//! Keys are the long flag names without the leading dashes (`v`, `xmax`,
//! `discrete-step`, …). A `#` starts a comment, blank lines are ignored,
//! and whitespace around keys and values is trimmed. Values parse with
//! the same rules as the flags they replace; explicit flags always win
//! over config entries.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::ValueEnum;

use crate::CliError;

/// Merged view of a parsed config file, queried flag by flag.
pub struct Resolver {
    entries: BTreeMap<String, String>,
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Usage(format!("config value {key} = {value:?} does not parse"))
}

impl Resolver {
    /// Parses the file at `path`; `None` yields an empty resolver.
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let mut entries = BTreeMap::new();
        if let Some(path) = path {
            let text = std::fs::read_to_string(path).map_err(|e| {
                CliError::Usage(format!("cannot read config {}: {e}", path.display()))
            })?;
            for (lineno, line) in text.lines().enumerate() {
                let line = line.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let Some((key, value)) = line.split_once('=') else {
                    return Err(CliError::Usage(format!(
                        "{}:{}: expected key=value",
                        path.display(),
                        lineno + 1
                    )));
                };
                entries.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { entries })
    }

    fn raw(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn f64(&self, flag: Option<f64>, key: &str) -> Result<Option<f64>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .raw(key)
                .map(|s| s.parse().map_err(|_| bad(key, s)))
                .transpose(),
        }
    }

    pub fn usize(&self, flag: Option<usize>, key: &str) -> Result<Option<usize>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .raw(key)
                .map(|s| s.parse().map_err(|_| bad(key, s)))
                .transpose(),
        }
    }

    pub fn u64(&self, flag: Option<u64>, key: &str) -> Result<Option<u64>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .raw(key)
                .map(|s| s.parse().map_err(|_| bad(key, s)))
                .transpose(),
        }
    }

    /// Comma-separated list; the flag wins when it captured any value.
    pub fn f64_list(&self, flag: &[f64], key: &str) -> Result<Vec<f64>, CliError> {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        match self.raw(key) {
            None => Ok(Vec::new()),
            Some(s) => s
                .split(',')
                .map(|part| {
                    let part = part.trim();
                    part.parse().map_err(|_| bad(key, part))
                })
                .collect(),
        }
    }

    pub fn path(&self, flag: Option<PathBuf>, key: &str) -> Option<PathBuf> {
        flag.or_else(|| self.raw(key).map(PathBuf::from))
    }

    /// Enum-valued entries parse with the same spellings as the flag.
    pub fn value_enum<T: ValueEnum>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        match flag {
            Some(v) => Ok(Some(v)),
            None => self
                .raw(key)
                .map(|s| T::from_str(s, true).map_err(|_| bad(key, s)))
                .transpose(),
        }
    }

    /// Rejects a still-missing value with a usage error naming the flag.
    pub fn require<T>(value: Option<T>, key: &str) -> Result<T, CliError> {
        value.ok_or_else(|| {
            CliError::Usage(format!("--{key} is required (as a flag or a config entry)"))
        })
    }
}
