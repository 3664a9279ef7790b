//! Optional TOML defaults. Keys mirror the long flags of each subcommand:
//!
//! ```toml
//! [table]
//! format = "markdown"
//! oeis = ["A370252", "A005729"]
//!
//! [certify]
//! max-ring-size = 100000
//! ```

use std::fmt;
use std::path::Path;

use toml::Table;

const KNOWN: &[(&str, &[&str])] = &[
    ("compute", &["legacy-1976", "json"]),
    (
        "table",
        &["from", "to", "format", "check-fixture", "oeis", "fetch", "cache-dir", "legacy-1976"],
    ),
    ("certify", &["json", "max-ring-size", "gen-a", "gen-b", "gen-degree", "gen-coeff"]),
    ("oracle", &["max-ring-size"]),
    ("selftest", &["max-ring-size"]),
];

#[derive(Debug)]
pub enum ConfigError {
    Io(String, std::io::Error),
    Invalid(String),
}

impl ConfigError {
    pub fn is_io(&self) -> bool {
        matches!(self, ConfigError::Io(..))
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigError::Io(p, e) => write!(f, "{p}: {e}"),
            ConfigError::Invalid(m) => write!(f, "config: {m}"),
        }
    }
}

#[derive(Debug, Default)]
pub struct Config {
    table: Table,
}

impl Config {
    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError::Io(path.display().to_string(), e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let table: Table = text.parse().map_err(|e: toml::de::Error| ConfigError::Invalid(e.to_string()))?;
        for (section, value) in &table {
            let Some((_, keys)) = KNOWN.iter().find(|(s, _)| s == section) else {
                return Err(ConfigError::Invalid(format!("unknown section [{section}]")));
            };
            let Some(inner) = value.as_table() else {
                return Err(ConfigError::Invalid(format!("[{section}] must be a table")));
            };
            for key in inner.keys() {
                if !keys.contains(&key.as_str()) {
                    return Err(ConfigError::Invalid(format!("unknown key {key:?} in [{section}]")));
                }
            }
        }
        Ok(Config { table })
    }

    fn get(&self, section: &str, key: &str) -> Option<&toml::Value> {
        self.table.get(section)?.as_table()?.get(key)
    }

    pub fn flag(&self, section: &str, key: &str) -> bool {
        self.get(section, key).and_then(toml::Value::as_bool).unwrap_or(false)
    }

    pub fn i64(&self, section: &str, key: &str) -> Option<i64> {
        self.get(section, key)?.as_integer()
    }

    pub fn u64(&self, section: &str, key: &str) -> Option<u64> {
        self.i64(section, key).and_then(|v| u64::try_from(v).ok())
    }

    pub fn string(&self, section: &str, key: &str) -> Option<String> {
        self.get(section, key)?.as_str().map(str::to_string)
    }

    pub fn strings(&self, section: &str, key: &str) -> Vec<String> {
        match self.get(section, key) {
            Some(toml::Value::String(s)) => vec![s.clone()],
            Some(toml::Value::Array(a)) => a.iter().filter_map(|v| v.as_str().map(str::to_string)).collect(),
            _ => Vec::new(),
        }
    }
}
