//! Defaults read from a TOML file; command-line flags win.

use std::path::Path;

use serde::Deserialize;

use crate::error::CliError;

#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Config {
    pub k: Option<usize>,
    pub alpha: Option<usize>,
    pub beta: Option<usize>,
    pub q: Option<usize>,
    pub pmax: Option<usize>,
    pub epsilon: Option<f64>,
    pub tolerance: Option<f64>,
    pub threads: Option<usize>,
    pub backend: Option<String>,
    pub connected: Option<bool>,
    pub pair_io: Option<bool>,
    pub two_legal: Option<bool>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))
    }
}

/// First of flag, config value, default.
pub fn pick<T>(flag: Option<T>, config: Option<T>, default: T) -> T {
    flag.or(config).unwrap_or(default)
}
