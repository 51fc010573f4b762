use std::path::Path;

use floquet_thermo::BathModel;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("bad override `{0}`: expected key=value")]
    Override(String),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Column groups a sweep can fill.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Output {
    Nu,
    R,
    InvQuasitemp,
    P0Ratio,
    Dissipation,
}

impl Output {
    pub const ALL: [Output; 5] = [
        Output::Nu,
        Output::R,
        Output::InvQuasitemp,
        Output::P0Ratio,
        Output::Dissipation,
    ];
}

fn all_outputs() -> Vec<Output> {
    Output::ALL.to_vec()
}

fn default_samples() -> usize {
    1024
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub a: f64,
    pub q_start: f64,
    pub q_end: f64,
    pub q_step: f64,
    /// Required for every output except `nu`.
    #[serde(default)]
    pub bath: Option<BathModel>,
    #[serde(default = "all_outputs")]
    pub outputs: Vec<Output>,
    /// Initial grid size; doubled per point as needed.
    #[serde(default = "default_samples")]
    pub n_samples: usize,
    #[serde(default)]
    pub oracle_checks: bool,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        Self::from_json_with_overrides::<&str>(text, &[])
    }

    /// Parses `text`, applies `key=value` overrides (dotted keys reach into
    /// nested objects) and validates the result.
    pub fn from_json_with_overrides<S: AsRef<str>>(
        text: &str,
        overrides: &[S],
    ) -> Result<Self, ConfigError> {
        let mut doc: Value = serde_json::from_str(text)?;
        for o in overrides {
            apply_override(&mut doc, o.as_ref())?;
        }
        let config: SweepConfig = serde_json::from_value(doc)?;
        config.validated()
    }

    pub fn load<S: AsRef<str>>(path: &Path, overrides: &[S]) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json_with_overrides(&text, overrides)
    }

    pub fn validated(self) -> Result<Self, ConfigError> {
        let bad = |msg: String| Err(ConfigError::Invalid(msg));
        if !(self.a.is_finite() && self.a > 0.0) {
            return bad(format!("a = {} must be positive", self.a));
        }
        if !(self.q_start.is_finite() && self.q_end.is_finite() && self.q_start >= 0.0) {
            return bad(format!("q range [{}, {}]", self.q_start, self.q_end));
        }
        if self.q_start > self.q_end {
            return bad(format!("q_start = {} > q_end = {}", self.q_start, self.q_end));
        }
        if !(self.q_step.is_finite() && self.q_step > 0.0) {
            return bad(format!("q_step = {} must be positive", self.q_step));
        }
        if self.n_samples < 256 || !self.n_samples.is_power_of_two() {
            return bad(format!("n_samples = {} must be a power of two >= 256", self.n_samples));
        }
        if self.outputs.is_empty() {
            return bad("outputs is empty".into());
        }
        if self.bath.is_none() && self.outputs.iter().any(|&o| o != Output::Nu) {
            return bad("outputs other than nu need a bath".into());
        }
        if let Some(bath) = self.bath {
            bath.validated()
                .map_err(|e| ConfigError::Invalid(format!("bath: {e}")))?;
        }
        Ok(self)
    }

    pub fn wants(&self, o: Output) -> bool {
        self.outputs.contains(&o)
    }

    /// `q_start + k·q_step` up to `q_end`, with a little slack for rounding.
    pub fn q_grid(&self) -> Vec<f64> {
        let span = (self.q_end - self.q_start) / self.q_step;
        let n = (span + 1e-9).floor() as usize;
        (0..=n)
            .map(|k| self.q_start + k as f64 * self.q_step)
            .collect()
    }
}

/// Sets `key=value` in `doc`. The value is read as JSON when it parses,
/// otherwise as a plain string.
pub fn apply_override(doc: &mut Value, assignment: &str) -> Result<(), ConfigError> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| ConfigError::Override(assignment.into()))?;
    let key = key.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(ConfigError::Override(assignment.into()));
    }
    let value = serde_json::from_str(raw.trim()).unwrap_or_else(|_| Value::String(raw.into()));
    let mut node = doc;
    let mut parts = key.split('.').peekable();
    while let Some(part) = parts.next() {
        if !node.is_object() {
            *node = Value::Object(Default::default());
        }
        let map = node.as_object_mut().expect("just made an object");
        if parts.peek().is_none() {
            map.insert(part.to_string(), value);
            return Ok(());
        }
        node = map.entry(part).or_insert(Value::Null);
    }
    unreachable!("key has at least one part")
}
