//! The JSON report every command produces, and its text rendering.

use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::source::InputDigest;

pub const DEFAULT_SEED: u64 = 0xD15C_0DEC;
pub const SEED_ENV: &str = "DFSCODEC_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SeedSource {
    Flag,
    Env,
    Default,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SeedInfo {
    pub value: u64,
    pub source: SeedSource,
}

/// Flag, then `DFSCODEC_SEED`, then the fixed default.
pub fn resolve_seed(flag: Option<u64>) -> CliResult<SeedInfo> {
    if let Some(value) = flag {
        return Ok(SeedInfo {
            value,
            source: SeedSource::Flag,
        });
    }
    match std::env::var(SEED_ENV) {
        Ok(text) => {
            let value = text.trim().parse().map_err(|_| {
                CliError::Usage(format!("{SEED_ENV}='{text}' is not an unsigned integer"))
            })?;
            Ok(SeedInfo {
                value,
                source: SeedSource::Env,
            })
        }
        Err(_) => Ok(SeedInfo {
            value: DEFAULT_SEED,
            source: SeedSource::Default,
        }),
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seed: Option<SeedInfo>,
    pub inputs: Vec<NamedDigest>,
    pub config: Value,
    pub result: Value,
}

#[derive(Debug, Serialize)]
pub struct NamedDigest {
    pub name: &'static str,
    #[serde(flatten)]
    pub digest: InputDigest,
}

impl Report {
    pub fn new(command: &str, config: impl Serialize, result: impl Serialize) -> CliResult<Self> {
        Ok(Report {
            command: command.to_string(),
            seed: None,
            inputs: Vec::new(),
            config: to_value(config)?,
            result: to_value(result)?,
        })
    }

    pub fn with_seed(mut self, seed: SeedInfo) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn input(mut self, name: &'static str, digest: InputDigest) -> Self {
        self.inputs.push(NamedDigest { name, digest });
        self
    }

    pub fn to_json(&self) -> CliResult<String> {
        let mut text = serde_json::to_string_pretty(self).map_err(dfscodec::Error::from)?;
        text.push('\n');
        Ok(text)
    }

    /// `key = value` lines for the result, plus the seed and where it came from.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let mut result = self.result.clone();
        if let Some(map) = result.as_object_mut() {
            map.shift_remove("seed");
        }
        flatten("", &result, &mut out);
        if let Some(seed) = self.seed {
            let src = match seed.source {
                SeedSource::Flag => "flag",
                SeedSource::Env => "env",
                SeedSource::Default => "default",
            };
            out.push_str(&format!("seed = {} ({src})\n", seed.value));
        }
        out
    }
}

pub fn to_value(v: impl Serialize) -> CliResult<Value> {
    Ok(serde_json::to_value(v).map_err(dfscodec::Error::from)?)
}

fn is_leafy(v: &Value) -> bool {
    match v {
        Value::Object(_) => false,
        Value::Array(items) => items.iter().all(is_leafy),
        _ => true,
    }
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let key = |k: &str| {
        if prefix.is_empty() {
            k.to_string()
        } else {
            format!("{prefix}.{k}")
        }
    };
    match v {
        Value::Object(map) => {
            for (k, child) in map.iter() {
                flatten(&key(k), child, out);
            }
        }
        Value::Array(items) if !is_leafy(v) => {
            for (i, child) in items.iter().enumerate() {
                flatten(&key(&i.to_string()), child, out);
            }
        }
        Value::Null => {}
        other => out.push_str(&format!("{prefix} = {other}\n")),
    }
}

pub fn write_file(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|e| CliError::io(path, e))
}

pub fn write_json(path: &Path, v: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(v).map_err(dfscodec::Error::from)?;
    text.push('\n');
    write_file(path, &text)
}
