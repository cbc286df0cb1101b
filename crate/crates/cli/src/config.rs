use std::path::Path;

use serde::de::DeserializeOwned;
use serde_json::{Map, Value};

use crate::CliError;

/// Values from `--config`, consulted for any flag left unset.
#[derive(Debug, Default)]
pub struct Config {
    map: Map<String, Value>,
}

impl Config {
    pub fn load(path: Option<&Path>) -> Result<Self, CliError> {
        let Some(path) = path else {
            return Ok(Config::default());
        };
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::usage(format!("cannot read {}: {e}", path.display())))?;
        match serde_json::from_str(&text) {
            Ok(Value::Object(map)) => Ok(Config { map }),
            Ok(_) => Err(CliError::usage("config must be a JSON object")),
            Err(e) => Err(CliError::usage(format!("config: {e}"))),
        }
    }

    /// The flag if given, else the config entry under the flag's long name.
    pub fn pick<T: DeserializeOwned>(
        &self,
        flag: Option<T>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.map.get(key) {
            None | Some(Value::Null) => Ok(None),
            Some(v) => serde_json::from_value(v.clone())
                .map(Some)
                .map_err(|e| CliError::usage(format!("config key {key}: {e}"))),
        }
    }

    /// A JSON-valued option: inline JSON, a file path, or an embedded
    /// document in the config.
    pub fn document<T: DeserializeOwned>(
        &self,
        flag: Option<&str>,
        key: &str,
    ) -> Result<Option<T>, CliError> {
        let value = match (flag, self.map.get(key)) {
            (Some(s), _) => Some(read_document(s, key)?),
            (None, Some(Value::String(s))) => Some(read_document(s, key)?),
            (None, Some(Value::Null)) | (None, None) => None,
            (None, Some(v)) => Some(v.clone()),
        };
        value
            .map(|v| {
                serde_json::from_value(v).map_err(|e| CliError::usage(format!("--{key}: {e}")))
            })
            .transpose()
    }

    pub fn flag(&self, flag: bool, key: &str) -> Result<bool, CliError> {
        Ok(flag || self.pick::<bool>(None, key)?.unwrap_or(false))
    }
}

fn read_document(s: &str, key: &str) -> Result<Value, CliError> {
    let trimmed = s.trim_start();
    let text = if trimmed.starts_with('{') || trimmed.starts_with('[') {
        s.to_string()
    } else {
        std::fs::read_to_string(s)
            .map_err(|e| CliError::usage(format!("--{key}: cannot read {s}: {e}")))?
    };
    serde_json::from_str(&text).map_err(|e| CliError::usage(format!("--{key}: {e}")))
}
