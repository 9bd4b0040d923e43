use std::path::Path;

use crate::bb84::SessionConfig;
use crate::error::{Error, Result};

/// Named starting points for a configuration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// 317 raw bits, about 100 reconciled bits.
    Reference,
    /// 96 raw bits, about 30 reconciled bits; small enough for the sieve.
    Desk,
}

impl Profile {
    pub fn config(self) -> SessionConfig {
        match self {
            Profile::Reference => SessionConfig::default(),
            Profile::Desk => SessionConfig::desk(),
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reference" => Ok(Profile::Reference),
            "desk" => Ok(Profile::Desk),
            other => Err(Error::InvalidConfig(format!("unknown profile {other:?}"))),
        }
    }
}

/// Overlays flat `key = value` lines (TOML syntax, keys named after
/// `SessionConfig` fields) on top of `base`.
pub fn apply_config_text(base: &SessionConfig, text: &str) -> Result<SessionConfig> {
    let overrides: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::InvalidConfig(e.to_string()))?;
    if let Some((key, _)) = overrides.iter().find(|(_, v)| v.is_table()) {
        return Err(Error::InvalidConfig(format!(
            "configuration must be flat; {key:?} is a table"
        )));
    }
    let mut merged = match toml::Value::try_from(base) {
        Ok(toml::Value::Table(t)) => t,
        _ => return Err(Error::InvalidConfig("cannot encode base configuration".into())),
    };
    merged.extend(overrides);
    let cfg: SessionConfig = toml::Value::Table(merged)
        .try_into()
        .map_err(|e: toml::de::Error| Error::InvalidConfig(e.to_string()))?;
    cfg.validate()?;
    Ok(cfg)
}

pub fn load_config_file(base: &SessionConfig, path: &Path) -> Result<SessionConfig> {
    let text = std::fs::read_to_string(path)?;
    apply_config_text(base, &text)
}
