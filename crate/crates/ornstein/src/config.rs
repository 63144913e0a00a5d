//! Merging `--config` files into command arguments.

use std::path::Path;

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub fn load(path: &Path) -> CliResult<Value> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: Value = serde_json::from_str(&text)?;
    if !value.is_object() {
        return Err(CliError::Usage(format!("{}: config must be a JSON object", path.display())));
    }
    Ok(value)
}

/// Fills every unset (`null`) argument from the command's section of the
/// config file, falling back to top-level keys. Command-line flags and
/// `ORNSTEIN_*` variables are already in `args` and take precedence.
pub fn merge<T: Serialize + DeserializeOwned>(args: T, config: Option<&Value>, section: &str) -> CliResult<T> {
    let Some(config) = config else { return Ok(args) };
    let Value::Object(mut fields) = serde_json::to_value(&args)? else {
        return Err(CliError::Usage("arguments must serialize to an object".into()));
    };
    let empty = Map::new();
    let top = config.as_object().unwrap_or(&empty);
    let sect = top.get(section).and_then(Value::as_object).unwrap_or(&empty);
    if let Some(unknown) = sect.keys().find(|k| !fields.contains_key(*k)) {
        return Err(CliError::Usage(format!("unknown key `{unknown}` in config section `{section}`")));
    }
    for (key, slot) in fields.iter_mut() {
        if slot.is_null() {
            if let Some(v) = sect.get(key).or_else(|| top.get(key)) {
                *slot = v.clone();
            }
        }
    }
    serde_json::from_value(Value::Object(fields)).map_err(|e| CliError::Usage(format!("config: {e}")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde::Deserialize;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct A {
        seed: Option<u64>,
        budget: Option<usize>,
    }

    #[test]
    fn command_line_wins() {
        let cfg = serde_json::json!({"seed": 5, "budget": 10, "disprove": {"budget": 20}});
        let merged = merge(A { seed: Some(1), budget: None }, Some(&cfg), "disprove").unwrap();
        assert_eq!(merged, A { seed: Some(1), budget: Some(20) });
        let merged = merge(A { seed: None, budget: None }, Some(&cfg), "other").unwrap();
        assert_eq!(merged, A { seed: Some(5), budget: Some(10) });
        let bad = serde_json::json!({"disprove": {"budgte": 1}});
        assert!(merge(A { seed: None, budget: None }, Some(&bad), "disprove").is_err());
    }
}
