//! Problem files: a joint source pmf, a channel and optional simulation
//! defaults, stored as JSON.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use mwrc_core::{ChannelSpec, JointPmf};
use serde::Deserialize;

use crate::error::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProblem {
    schema_version: u32,
    source: RawSource,
    channel: RawChannel,
    #[serde(default)]
    simulation: Option<SimDefaults>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSource {
    alphabet_sizes: Vec<usize>,
    /// Flat table, first user most significant.
    #[serde(default)]
    probs: Option<Vec<f64>>,
    /// Sparse map from `"s1,s2,...,sL"` to probability.
    #[serde(default)]
    outcomes: Option<BTreeMap<String, f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannel {
    q: u32,
    #[serde(default)]
    noise_relay: Option<Vec<f64>>,
    #[serde(default)]
    noise_users: Option<Vec<Vec<f64>>>,
}

/// Defaults for `simulate`; command-line flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimDefaults {
    pub m: Option<usize>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub kappa: Option<Vec<f64>>,
    pub relative: Option<bool>,
    pub mode: Option<String>,
}

#[derive(Debug, Clone)]
pub struct Problem {
    pub source: JointPmf,
    pub channel: ChannelSpec,
    pub simulation: SimDefaults,
}

fn field_error(field: &str) -> impl FnOnce(mwrc_core::Error) -> CliError + '_ {
    move |source| CliError::Field {
        field: field.to_string(),
        source,
    }
}

pub fn load(path: &Path) -> Result<Problem, CliError> {
    let text = fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })?;
    parse(&text).map_err(|err| match err {
        CliError::Json { source, .. } => CliError::Json {
            path: path.display().to_string(),
            source,
        },
        other => other,
    })
}

pub fn parse(text: &str) -> Result<Problem, CliError> {
    let raw: RawProblem = serde_json::from_str(text).map_err(|source| CliError::Json {
        path: "<input>".into(),
        source,
    })?;
    if raw.schema_version != SCHEMA_VERSION {
        return Err(CliError::Schema(format!(
            "schema_version: expected {SCHEMA_VERSION}, found {}",
            raw.schema_version
        )));
    }
    let source = parse_source(raw.source)?;
    let channel = parse_channel(raw.channel, source.users())?;
    Ok(Problem {
        source,
        channel,
        simulation: raw.simulation.unwrap_or_default(),
    })
}

fn parse_source(raw: RawSource) -> Result<JointPmf, CliError> {
    match (raw.probs, raw.outcomes) {
        (Some(probs), None) => {
            JointPmf::new(raw.alphabet_sizes, probs).map_err(field_error("source.probs"))
        }
        (None, Some(outcomes)) => {
            let users = raw.alphabet_sizes.len();
            let entries = outcomes
                .into_iter()
                .map(|(key, p)| {
                    let symbols = key
                        .split(',')
                        .map(|s| s.trim().parse::<usize>())
                        .collect::<Result<Vec<_>, _>>()
                        .ok()
                        .filter(|s| s.len() == users)
                        .ok_or_else(|| {
                            CliError::Schema(format!(
                                "source.outcomes: key {key:?} is not {users} comma-separated symbols"
                            ))
                        })?;
                    Ok((symbols, p))
                })
                .collect::<Result<Vec<_>, CliError>>()?;
            JointPmf::from_sparse(raw.alphabet_sizes, entries)
                .map_err(field_error("source.outcomes"))
        }
        (Some(_), Some(_)) => Err(CliError::Schema(
            "source: give either probs or outcomes, not both".into(),
        )),
        (None, None) => Err(CliError::Schema("source: missing probs or outcomes".into())),
    }
}

fn parse_channel(raw: RawChannel, users: usize) -> Result<ChannelSpec, CliError> {
    let silent = || {
        let mut point = vec![0.0; raw.q as usize];
        if let Some(first) = point.first_mut() {
            *first = 1.0;
        }
        point
    };
    let noise_relay = raw.noise_relay.clone().unwrap_or_else(silent);
    let noise_users = raw
        .noise_users
        .clone()
        .unwrap_or_else(|| vec![silent(); users]);
    if noise_users.len() != users {
        return Err(CliError::Schema(format!(
            "channel.noise_users: {} entries for {users} users",
            noise_users.len()
        )));
    }
    ChannelSpec::new(raw.q, noise_relay, noise_users).map_err(field_error("channel"))
}
