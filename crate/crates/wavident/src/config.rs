//! Flat `key = value` run configuration. `#` starts a comment line.

use std::collections::BTreeMap;
use std::str::FromStr;

use crate::FormatError;

/// Keys a config file may set; each mirrors the flag of the same name.
pub const KEYS: &[&str] = &["dist", "n", "dt", "seed", "model", "wavelet", "scales", "reg", "lags", "mode", "bins"];

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Config {
    values: BTreeMap<String, String>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self, FormatError> {
        let mut values = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| FormatError::new(format!("config line {}: expected 'key = value'", i + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if !KEYS.contains(&key) {
                return Err(FormatError::new(format!("config line {}: unknown key '{key}'", i + 1)));
            }
            if value.is_empty() {
                return Err(FormatError::new(format!("config line {}: '{key}' has no value", i + 1)));
            }
            if values.insert(key.to_string(), value.to_string()).is_some() {
                return Err(FormatError::new(format!("config line {}: '{key}' set twice", i + 1)));
            }
        }
        Ok(Self { values })
    }

    pub fn raw(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    /// The flag value if given, otherwise the parsed config value.
    pub fn pick<T>(&self, flag: Option<T>, key: &str) -> Result<Option<T>, FormatError>
    where
        T: FromStr,
        T::Err: std::fmt::Display,
    {
        if flag.is_some() {
            return Ok(flag);
        }
        self.raw(key)
            .map(|v| v.parse().map_err(|e| FormatError::new(format!("config key '{key}': {e}"))))
            .transpose()
    }
}
