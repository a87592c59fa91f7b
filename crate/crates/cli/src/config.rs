use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;

use crate::error::CliError;

const SECTIONS: [&str; 6] = ["fit", "embed", "bench-synthetic", "bench-real", "oracle-check", "generate"];

/// Read a TOML config file into a table keyed by command name.
pub fn load(path: &Path) -> Result<toml::Table, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::usage("config_not_found", format!("cannot read config {}: {e}", path.display())))?;
    let table: toml::Table = text
        .parse()
        .map_err(|e: toml::de::Error| CliError::usage("config_parse", e.message().to_string()))?;
    for key in table.keys() {
        if !SECTIONS.contains(&key.as_str()) {
            return Err(CliError::usage(
                "config_key",
                format!("unknown config section [{key}] (valid: {})", SECTIONS.join(", ")),
            ));
        }
    }
    Ok(table)
}

/// Overlay the `[command]` section of `table` on parsed flags. Keys use the
/// long flag names; dashes and underscores are interchangeable.
pub fn apply<T: Serialize + DeserializeOwned>(args: T, table: Option<&toml::Table>, command: &str) -> Result<T, CliError> {
    let Some(section) = table.and_then(|t| t.get(command)) else {
        return Ok(args);
    };
    let section = section
        .as_table()
        .ok_or_else(|| CliError::usage("config_key", format!("[{command}] must be a table")))?;
    let mut merged = serde_json::to_value(&args).map_err(|e| CliError::internal("config", e.to_string()))?;
    let fields = merged.as_object_mut().expect("argument structs serialize to objects");
    for (key, value) in section {
        let field = key.replace('-', "_");
        if !fields.contains_key(&field) {
            let mut valid: Vec<String> = fields.keys().map(|k| k.replace('_', "-")).collect();
            valid.sort();
            return Err(CliError::usage(
                "config_key",
                format!("unknown key '{key}' in [{command}] (valid: {})", valid.join(", ")),
            ));
        }
        let value = serde_json::to_value(value).map_err(|e| CliError::usage("config_value", e.to_string()))?;
        fields.insert(field, value);
    }
    serde_json::from_value(Value::Object(fields.clone()))
        .map_err(|e| CliError::usage("config_value", format!("in [{command}]: {e}")))
}
