//! Layered configuration: built-in defaults, then a TOML file, then flags.

use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};
use thiserror::Error;

/// Top-level keys that apply to every scenario that has them.
const GLOBAL_KEYS: [&str; 4] = ["seed", "shots", "grid_points", "out"];
const SECTIONS: [&str; 6] = ["gha", "bggp", "afshar", "bohm", "impulsive", "weak"];

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {message}")]
    Read { path: PathBuf, message: String },
    #[error("config {path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("unknown config key {key:?}{}", section_suffix(.section))]
    UnknownKey { section: Option<String>, key: String },
    #[error("unknown config section [{0}]")]
    UnknownSection(String),
    #[error("invalid settings for {section}: {message}")]
    Invalid { section: String, message: String },
}

fn section_suffix(section: &Option<String>) -> String {
    section.as_ref().map(|s| format!(" in [{s}]")).unwrap_or_default()
}

#[derive(Debug, Default, Clone)]
pub struct ConfigFile {
    globals: Map<String, Value>,
    sections: Map<String, Value>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Read {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        Self::parse(&text).map_err(|e| match e {
            ConfigError::Parse { message, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                message,
            },
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: toml::Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Parse {
            path: PathBuf::new(),
            message: e.message().to_string(),
        })?;
        let json = serde_json::to_value(&table).map_err(|e| ConfigError::Parse {
            path: PathBuf::new(),
            message: e.to_string(),
        })?;
        let mut out = Self::default();
        for (k, v) in json.as_object().cloned().unwrap_or_default() {
            if v.is_object() {
                if !SECTIONS.contains(&k.as_str()) {
                    return Err(ConfigError::UnknownSection(k));
                }
                out.sections.insert(k, v);
            } else if GLOBAL_KEYS.contains(&k.as_str()) {
                out.globals.insert(k, v);
            } else {
                return Err(ConfigError::UnknownKey { section: None, key: k });
            }
        }
        Ok(out)
    }

    pub fn out_dir(&self) -> Option<PathBuf> {
        self.globals.get("out").and_then(Value::as_str).map(PathBuf::from)
    }

    /// Merges defaults, file values and `overrides` into a `T`. Global keys
    /// apply only where `T` has a field of that name; section keys and
    /// overrides must name a field of `T`.
    pub fn resolve<T>(&self, section: &str, overrides: Map<String, Value>) -> Result<T, ConfigError>
    where
        T: Default + Serialize + DeserializeOwned,
    {
        let Value::Object(mut merged) = serde_json::to_value(T::default()).expect("defaults serialize") else {
            unreachable!("scenario configs are structs");
        };
        for (k, v) in &self.globals {
            if merged.contains_key(k) {
                merged.insert(k.clone(), v.clone());
            }
        }
        if let Some(Value::Object(table)) = self.sections.get(section) {
            for (k, v) in table {
                if !merged.contains_key(k) {
                    return Err(ConfigError::UnknownKey {
                        section: Some(section.to_string()),
                        key: k.clone(),
                    });
                }
                merged.insert(k.clone(), v.clone());
            }
        }
        for (k, v) in overrides {
            if merged.contains_key(&k) {
                merged.insert(k, v);
            }
        }
        serde_json::from_value(Value::Object(merged)).map_err(|e| ConfigError::Invalid {
            section: section.to_string(),
            message: e.to_string(),
        })
    }
}
