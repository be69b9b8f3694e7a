//! Experiment configuration files.
//!
//! The format is one `key = value` pair per line. `#` starts a comment,
//! blank lines are ignored, and any key left out takes its default:
//!
//! ```text
//! # 100 m field, 100 nodes split 34/33/33
//! field_side = 100
//! nodes      = 100
//! e0         = 0.5
//! alpha      = 1.0
//! p          = 0.1
//! protocols  = ceec, leach, sep, esep, deec
//! seeds      = 1, 2, 3
//! ```
//!
//! Recognised keys: `field_side`, `nodes`, `n1`, `n2`, `n3`, `e0`, `alpha`,
//! `p`, `bs_x`, `bs_y`, `packet_bits`, `e_elec_tx`, `e_elec_rx`, `e_amp`,
//! `e_da`, `seed`, `max_rounds`, `protocols`, `seeds`, `output_dir`,
//! `emit_plots`. `nodes = N` splits `N` into thirds with the remainder going
//! to the normal tier; explicit `n1`/`n2`/`n3` take precedence. The base
//! station defaults to the middle of the top edge of the field.

use std::collections::HashMap;
use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use thiserror::Error;

use crate::baselines::ProtocolKind;
use crate::topology::InvalidConfig;
use crate::NetworkConfig;

const KEYS: &[&str] = &[
    "field_side",
    "nodes",
    "n1",
    "n2",
    "n3",
    "e0",
    "alpha",
    "p",
    "bs_x",
    "bs_y",
    "packet_bits",
    "e_elec_tx",
    "e_elec_rx",
    "e_amp",
    "e_da",
    "seed",
    "max_rounds",
    "protocols",
    "seeds",
    "output_dir",
    "emit_plots",
];

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub base: NetworkConfig,
    pub protocols: Vec<ProtocolKind>,
    pub seeds: Vec<u64>,
    pub output_dir: PathBuf,
    pub emit_plots: bool,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        let base = NetworkConfig::default();
        Self {
            seeds: vec![base.seed],
            base,
            protocols: ProtocolKind::ALL.to_vec(),
            output_dir: PathBuf::from("results"),
            emit_plots: false,
        }
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<(), ConfigError> {
        self.base.validate()?;
        if self.protocols.is_empty() {
            return Err(ConfigError::EmptyList { key: "protocols" });
        }
        if self.seeds.is_empty() {
            return Err(ConfigError::EmptyList { key: "seeds" });
        }
        Ok(())
    }
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config file {path}: {source}")]
    Read {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: expected `key = value`, found `{text}`")]
    Syntax { line: usize, text: String },
    #[error("line {line}: unknown key `{key}`")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: key `{key}` given more than once")]
    DuplicateKey { line: usize, key: String },
    #[error("line {line}: cannot parse `{value}` for `{key}`: {reason}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
        reason: String,
    },
    #[error("`{key}` must list at least one entry")]
    EmptyList { key: &'static str },
    #[error(transparent)]
    OutOfRange(#[from] InvalidConfig),
}

impl ConfigError {
    /// The configuration key the error is about, when there is one.
    pub fn key(&self) -> Option<&str> {
        match self {
            ConfigError::UnknownKey { key, .. }
            | ConfigError::DuplicateKey { key, .. }
            | ConfigError::InvalidValue { key, .. } => Some(key),
            ConfigError::EmptyList { key } => Some(key),
            ConfigError::OutOfRange(e) => Some(e.key),
            ConfigError::Read { .. } | ConfigError::Syntax { .. } => None,
        }
    }
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ExperimentSpec, ConfigError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read {
        path: path.to_path_buf(),
        source,
    })?;
    parse_config_str(&text)
}

struct Entries(HashMap<&'static str, (usize, String)>);

impl Entries {
    fn get<T>(&self, key: &'static str) -> Result<Option<T>, ConfigError>
    where
        T: FromStr,
        T::Err: Display,
    {
        let Some((line, value)) = self.0.get(key) else {
            return Ok(None);
        };
        value.parse().map(Some).map_err(|e: T::Err| ConfigError::InvalidValue {
            line: *line,
            key: key.to_string(),
            value: value.clone(),
            reason: e.to_string(),
        })
    }

    fn list<T>(&self, key: &'static str) -> Result<Option<Vec<T>>, ConfigError>
    where
        T: FromStr + PartialEq,
        T::Err: Display,
    {
        let Some((line, value)) = self.0.get(key) else {
            return Ok(None);
        };
        parse_list(value).map(Some).map_err(|reason| ConfigError::InvalidValue {
            line: *line,
            key: key.to_string(),
            value: value.clone(),
            reason,
        })
    }

    fn flag(&self, key: &'static str) -> Result<Option<bool>, ConfigError> {
        let Some((line, value)) = self.0.get(key) else {
            return Ok(None);
        };
        match value.to_ascii_lowercase().as_str() {
            "true" | "yes" | "on" | "1" => Ok(Some(true)),
            "false" | "no" | "off" | "0" => Ok(Some(false)),
            _ => Err(ConfigError::InvalidValue {
                line: *line,
                key: key.to_string(),
                value: value.clone(),
                reason: "expected true or false".into(),
            }),
        }
    }
}

/// Comma-separated list with duplicates dropped (first occurrence kept).
pub fn parse_list<T>(value: &str) -> Result<Vec<T>, String>
where
    T: FromStr + PartialEq,
    T::Err: Display,
{
    let mut out = Vec::new();
    for item in value.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        let parsed: T = item.parse().map_err(|e: T::Err| e.to_string())?;
        if !out.contains(&parsed) {
            out.push(parsed);
        }
    }
    Ok(out)
}

pub fn parse_config_str(text: &str) -> Result<ExperimentSpec, ConfigError> {
    let mut entries = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let Some((key, value)) = content.split_once('=') else {
            return Err(ConfigError::Syntax {
                line,
                text: raw.trim().to_string(),
            });
        };
        let key = key.trim();
        if key.is_empty() {
            return Err(ConfigError::Syntax {
                line,
                text: raw.trim().to_string(),
            });
        }
        let Some(&known) = KEYS.iter().find(|k| **k == key) else {
            return Err(ConfigError::UnknownKey {
                line,
                key: key.to_string(),
            });
        };
        if entries.insert(known, (line, value.trim().to_string())).is_some() {
            return Err(ConfigError::DuplicateKey {
                line,
                key: key.to_string(),
            });
        }
    }
    let e = Entries(entries);

    let mut base = NetworkConfig::default();
    if let Some(side) = e.get("field_side")? {
        base.field_side = side;
    }
    base.bs_x = e.get("bs_x")?.unwrap_or(base.field_side / 2.0);
    base.bs_y = e.get("bs_y")?.unwrap_or(base.field_side);
    if let Some(n) = e.get::<usize>("nodes")? {
        base.n2 = n / 3;
        base.n3 = n / 3;
        base.n1 = n - base.n2 - base.n3;
    }
    base.n1 = e.get("n1")?.unwrap_or(base.n1);
    base.n2 = e.get("n2")?.unwrap_or(base.n2);
    base.n3 = e.get("n3")?.unwrap_or(base.n3);
    base.e0 = e.get("e0")?.unwrap_or(base.e0);
    base.alpha = e.get("alpha")?.unwrap_or(base.alpha);
    base.p = e.get("p")?.unwrap_or(base.p);
    base.radio.packet_bits = e.get("packet_bits")?.unwrap_or(base.radio.packet_bits);
    base.radio.e_elec_tx = e.get("e_elec_tx")?.unwrap_or(base.radio.e_elec_tx);
    base.radio.e_elec_rx = e.get("e_elec_rx")?.unwrap_or(base.radio.e_elec_rx);
    base.radio.e_amp = e.get("e_amp")?.unwrap_or(base.radio.e_amp);
    base.radio.e_da = e.get("e_da")?.unwrap_or(base.radio.e_da);
    base.seed = e.get("seed")?.unwrap_or(base.seed);
    base.max_rounds = e.get("max_rounds")?.unwrap_or(base.max_rounds);

    let spec = ExperimentSpec {
        protocols: e.list("protocols")?.unwrap_or_else(|| ProtocolKind::ALL.to_vec()),
        seeds: e.list("seeds")?.unwrap_or_else(|| vec![base.seed]),
        output_dir: e
            .get::<String>("output_dir")?
            .map_or_else(|| PathBuf::from("results"), PathBuf::from),
        emit_plots: e.flag("emit_plots")?.unwrap_or(false),
        base,
    };
    spec.validate()?;
    Ok(spec)
}
