//! `key=value` config files and flag > file > default resolution.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::error::CliError;

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    /// Parses `key=value` lines; blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let mut values = BTreeMap::new();
        for (no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                CliError::Usage(format!(
                    "config line {}: expected key=value, got `{line}`",
                    no + 1
                ))
            })?;
            let key = key.trim().replace('_', "-");
            if key.is_empty() {
                return Err(CliError::Usage(format!(
                    "config line {}: empty key",
                    no + 1
                )));
            }
            if values
                .insert(key.clone(), value.trim().to_string())
                .is_some()
            {
                return Err(CliError::Usage(format!(
                    "config line {}: duplicate key `{key}`",
                    no + 1
                )));
            }
        }
        Ok(Self { values })
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Resolves settings for one command and records what was used.
pub struct Resolver<'a> {
    file: &'a ConfigFile,
    snapshot: BTreeMap<String, String>,
    consumed: BTreeSet<String>,
}

impl<'a> Resolver<'a> {
    pub fn new(file: &'a ConfigFile) -> Self {
        Self {
            file,
            snapshot: BTreeMap::new(),
            consumed: BTreeSet::new(),
        }
    }

    fn raw(&mut self, key: &str, flag: Option<String>) -> Option<String> {
        self.consumed.insert(key.to_string());
        flag.or_else(|| self.file.values.get(key).cloned())
    }

    pub fn opt<T>(&mut self, key: &str, flag: Option<String>) -> Result<Option<T>, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.raw(key, flag) {
            None => Ok(None),
            Some(text) => {
                let value = text.parse::<T>().map_err(|e| {
                    CliError::Usage(format!("invalid value `{text}` for --{key}: {e}"))
                })?;
                self.snapshot.insert(key.to_string(), value.to_string());
                Ok(Some(value))
            }
        }
    }

    pub fn get<T>(&mut self, key: &str, flag: Option<String>, default: T) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        match self.opt(key, flag)? {
            Some(v) => Ok(v),
            None => {
                self.snapshot.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    pub fn required<T>(&mut self, key: &str, flag: Option<String>) -> Result<T, CliError>
    where
        T: FromStr + Display,
        T::Err: Display,
    {
        self.opt(key, flag)?
            .ok_or_else(|| CliError::Usage(format!("missing required --{key}")))
    }

    /// Boolean switch: set by the flag, or by `key=true` in the file.
    pub fn switch(&mut self, key: &str, flag: bool) -> Result<bool, CliError> {
        let v = if flag {
            true
        } else {
            self.get(key, None, false)?
        };
        self.snapshot.insert(key.to_string(), v.to_string());
        Ok(v)
    }

    /// File keys no setting of this command asked for.
    pub fn unused(&self) -> Vec<&str> {
        self.file
            .values
            .keys()
            .filter(|k| !self.consumed.contains(*k))
            .map(String::as_str)
            .collect()
    }

    pub fn into_snapshot(self) -> BTreeMap<String, String> {
        self.snapshot
    }
}

/// Comma-separated list of positive integers, e.g. `1,4,16`.
#[derive(Debug, Clone, PartialEq)]
pub struct IntList(pub Vec<usize>);

impl FromStr for IntList {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        s.split(',')
            .map(|p| {
                p.trim()
                    .parse::<usize>()
                    .map_err(|_| format!("`{p}` is not a non-negative integer"))
            })
            .collect::<Result<Vec<_>, _>>()
            .map(IntList)
    }
}

impl Display for IntList {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.0.iter().map(usize::to_string).collect();
        f.write_str(&parts.join(","))
    }
}
