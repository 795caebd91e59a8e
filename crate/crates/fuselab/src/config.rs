//! Config files for the command-line tool.
//!
//! A config file is TOML whose keys are long flag names without the leading
//! dashes (`output-depth` or `output_depth`). Top-level keys apply to every
//! subcommand that has the flag. Keys under a `[<subcommand>]` table apply
//! to that subcommand only and take precedence over top-level keys. Arrays
//! are joined with commas and `true` turns a switch on. Flags given on the
//! command line override the file.
//!
//! ```toml
//! depth = 100
//!
//! [fuse]
//! method = "linear"
//! weights = [0.5, 0.3, 0.2]
//!
//! [eval]
//! metrics = "mrr,ndcg@5"
//! percent = true
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use clap::{ArgAction, Command};

/// Environment variable naming a config file used when `--config` is absent.
pub const CONFIG_ENV: &str = "FUSELAB_CONFIG";

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config file {path}: {message}")]
    Syntax { path: String, message: String },
    #[error("config key `{key}` is not a flag of any subcommand")]
    UnknownKey { key: String },
    #[error("config key `{key}` is not a flag of `{subcommand}`")]
    UnknownSubcommandKey { subcommand: String, key: String },
    #[error("config table `[{0}]` does not name a subcommand")]
    UnknownTable(String),
    #[error("config key `{key}` has an unsupported value")]
    BadValue { key: String },
}

/// Flag values read from a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    global: BTreeMap<String, Value>,
    sections: BTreeMap<String, BTreeMap<String, Value>>,
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Switch(bool),
    Text(String),
}

fn normalize_key(key: &str) -> String {
    key.replace('_', "-")
}

fn convert(key: &str, value: &toml::Value) -> Result<Value, ConfigError> {
    let scalar = |v: &toml::Value| -> Option<String> {
        match v {
            toml::Value::String(s) => Some(s.clone()),
            toml::Value::Integer(i) => Some(i.to_string()),
            toml::Value::Float(f) => Some(f.to_string()),
            _ => None,
        }
    };
    let bad = || ConfigError::BadValue { key: key.into() };
    match value {
        toml::Value::Boolean(b) => Ok(Value::Switch(*b)),
        toml::Value::Array(items) => items
            .iter()
            .map(|v| scalar(v).ok_or_else(bad))
            .collect::<Result<Vec<_>, _>>()
            .map(|parts| Value::Text(parts.join(","))),
        other => scalar(other).map(Value::Text).ok_or_else(bad),
    }
}

fn flags(cmd: &Command) -> BTreeMap<String, bool> {
    cmd.get_arguments()
        .filter_map(|a| {
            let long = a.get_long()?;
            let switch = matches!(a.get_action(), ArgAction::SetTrue);
            Some((long.to_string(), switch))
        })
        .filter(|(long, _)| long != "config" && long != "help")
        .collect()
}

impl ConfigFile {
    pub fn load(path: &Path, cli: &Command) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, cli).map_err(|e| match e {
            ConfigError::Syntax { message, .. } => ConfigError::Syntax {
                path: path.display().to_string(),
                message,
            },
            other => other,
        })
    }

    /// Parses and checks every key against the flags of `cli`'s subcommands.
    pub fn parse(text: &str, cli: &Command) -> Result<Self, ConfigError> {
        let table: toml::Table =
            text.parse()
                .map_err(|e: toml::de::Error| ConfigError::Syntax {
                    path: String::new(),
                    message: e.message().to_string(),
                })?;
        let subcommands: BTreeMap<String, BTreeMap<String, bool>> = cli
            .get_subcommands()
            .map(|s| (s.get_name().to_string(), flags(s)))
            .collect();
        let mut config = ConfigFile::default();
        for (key, value) in &table {
            if let toml::Value::Table(section) = value {
                let name = key.as_str();
                let known = subcommands
                    .get(name)
                    .ok_or_else(|| ConfigError::UnknownTable(name.into()))?;
                let entries = config.sections.entry(name.into()).or_default();
                for (key, value) in section {
                    let flag = normalize_key(key);
                    if !known.contains_key(&flag) {
                        return Err(ConfigError::UnknownSubcommandKey {
                            subcommand: name.into(),
                            key: key.clone(),
                        });
                    }
                    entries.insert(flag, convert(key, value)?);
                }
            } else {
                let flag = normalize_key(key);
                if !subcommands.values().any(|f| f.contains_key(&flag)) {
                    return Err(ConfigError::UnknownKey { key: key.clone() });
                }
                config.global.insert(flag, convert(key, value)?);
            }
        }
        Ok(config)
    }

    /// Command-line arguments equivalent to the file for `subcommand`,
    /// sorted by flag name.
    pub fn args_for(&self, subcommand: &Command) -> Vec<String> {
        let known = flags(subcommand);
        let mut merged: BTreeMap<&str, &Value> = self
            .global
            .iter()
            .filter(|(k, _)| known.contains_key(k.as_str()))
            .map(|(k, v)| (k.as_str(), v))
            .collect();
        if let Some(section) = self.sections.get(subcommand.get_name()) {
            merged.extend(section.iter().map(|(k, v)| (k.as_str(), v)));
        }
        let mut args = Vec::new();
        for (flag, value) in merged {
            let switch = known[flag];
            match value {
                Value::Switch(true) if switch => args.push(format!("--{flag}")),
                Value::Switch(false) if switch => {}
                Value::Switch(b) => args.push(format!("--{flag}={b}")),
                Value::Text(t) => args.push(format!("--{flag}={t}")),
            }
        }
        args
    }
}
