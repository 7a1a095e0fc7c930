//! Deterministic artifact writers.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::config::RunConfig;
use crate::CliError;

/// Significant digits kept for floating values in JSON artifacts.
pub const SIGNIFICANT_DIGITS: usize = 12;

/// Rounds to `SIGNIFICANT_DIGITS` significant digits.
pub fn round_sig(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", SIGNIFICANT_DIGITS - 1, x).parse().unwrap_or(x)
}

/// Rounds every float in a JSON tree.
pub fn round_value(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = n.as_f64().unwrap_or(0.0);
            serde_json::Number::from_f64(round_sig(x)).map_or(Value::Null, Value::Number)
        }
        Value::Array(a) => Value::Array(a.into_iter().map(round_value).collect()),
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, round_value(v))).collect()),
        other => other,
    }
}

/// Hex SHA-256 of the canonical JSON form of the configuration.
pub fn config_hash(cfg: &RunConfig) -> String {
    let canonical = serde_json::to_string(cfg).unwrap_or_default();
    hex::encode(Sha256::digest(canonical.as_bytes()))
}

pub fn versions() -> Value {
    json!({
        "tubenorm": tubenorm::VERSION,
        "tubenorm-cli": env!("CARGO_PKG_VERSION"),
    })
}

/// Wraps a result with the provenance every artifact carries.
pub fn envelope<T: Serialize>(command: &str, cfg: &RunConfig, result: &T) -> Result<Value, CliError> {
    let result = serde_json::to_value(result).map_err(|e| CliError::Io(e.to_string()))?;
    Ok(round_value(json!({
        "command": command,
        "config_hash": config_hash(cfg),
        "seed": cfg.seed,
        "versions": versions(),
        "result": result,
    })))
}

/// Collects artifacts in memory and writes them in one pass.
#[derive(Debug, Default)]
pub struct ArtifactWriter {
    pending: Vec<(String, Vec<u8>)>,
}

impl ArtifactWriter {
    pub fn json(&mut self, name: &str, value: &Value) -> Result<(), CliError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
        text.push('\n');
        self.pending.push((name.to_string(), text.into_bytes()));
        Ok(())
    }

    pub fn csv<T: Serialize>(&mut self, name: &str, rows: &[T]) -> Result<(), CliError> {
        let mut buf = Vec::new();
        tubenorm::io::write_csv(&mut buf, rows).map_err(|e| CliError::Io(e.to_string()))?;
        self.pending.push((name.to_string(), buf));
        Ok(())
    }

    pub fn text(&mut self, name: &str, body: String) {
        self.pending.push((name.to_string(), body.into_bytes()));
    }

    pub fn finish(self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        self.pending
            .into_iter()
            .map(|(name, bytes)| {
                let path = dir.join(name);
                fs::write(&path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
                Ok(path)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_keeps_twelve_digits() {
        assert_eq!(round_sig(0.1399170875413948), 0.139917087541);
        assert_eq!(round_sig(-4.191597454658123e-3), -4.19159745466e-3);
        assert_eq!(round_value(json!([1.0 / 3.0])), json!([0.333333333333]));
    }
}
