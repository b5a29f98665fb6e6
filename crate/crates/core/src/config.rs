//! Experiment configuration files.
//!
//! Experiments are described in TOML:
//!
//! ```toml
//! name = "xor"
//! seed = 1
//! runs = 3
//! horizon = 100000
//! window = 10000        # optional, default min(100000, horizon / 10)
//! record_every = 1000   # optional, default horizon / 1000
//! gamma = 0.05          # default exploration rate for every policy
//! gamma_model = 0.1     # default committee exploration rate
//! output = "results"
//!
//! [stream]
//! kind = "xor"          # or "covertype", "linear"
//! noise_bits = 0
//! drift = { period = 50000 }
//!
//! [oracle]
//! kind = "perfect"      # or "fixed_accuracy" / "expected_accuracy" with p
//!
//! [[policies]]
//! kind = "neural_bandit1"
//! hidden = 5
//! lambda = 0.1
//!
//! [[policies]]
//! kind = "banditron"
//! ```
//!
//! Relative dataset paths are resolved against the directory holding the
//! config file.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::committee::{DEFAULT_HIDDEN_SIZES, DEFAULT_LAMBDAS};
use crate::datastream::DriftSchedule;
use crate::evaluation::OracleSpec;
use crate::policy::check_gamma;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_runs")]
    pub runs: usize,
    pub horizon: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub record_every: Option<u64>,
    #[serde(default = "default_gamma")]
    pub gamma: f64,
    #[serde(default = "default_gamma_model")]
    pub gamma_model: f64,
    pub stream: StreamSpec,
    #[serde(default)]
    pub oracle: OracleSpec,
    pub policies: Vec<PolicySpec>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_runs() -> usize {
    1
}

fn default_gamma() -> f64 {
    0.005
}

fn default_gamma_model() -> f64 {
    0.1
}

fn default_output() -> PathBuf {
    PathBuf::from("results")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum StreamSpec {
    Covertype {
        /// Data file; defaults to the data directory lookup.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        path: Option<PathBuf>,
        /// Keep only the first `rows` rows after shuffling.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        rows: Option<usize>,
        /// Defaults to the experiment seed.
        #[serde(default, skip_serializing_if = "Option::is_none")]
        shuffle_seed: Option<u64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drift: Option<DriftSchedule>,
    },
    Xor {
        #[serde(default)]
        noise_bits: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drift: Option<DriftSchedule>,
    },
    Linear {
        input_bits: usize,
        arms: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        drift: Option<DriftSchedule>,
    },
}

impl StreamSpec {
    pub fn drift(&self) -> Option<&DriftSchedule> {
        match self {
            StreamSpec::Covertype { drift, .. }
            | StreamSpec::Xor { drift, .. }
            | StreamSpec::Linear { drift, .. } => drift.as_ref(),
        }
    }

    pub fn set_drift(&mut self, schedule: Option<DriftSchedule>) {
        match self {
            StreamSpec::Covertype { drift, .. }
            | StreamSpec::Xor { drift, .. }
            | StreamSpec::Linear { drift, .. } => *drift = schedule,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicySpec {
    Random {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
    },
    Banditron {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
    },
    NeuralBandit1 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default = "default_lambda")]
        lambda: f64,
        #[serde(default = "default_hidden")]
        hidden: usize,
    },
    NeuralBandit2 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_model: Option<f64>,
        #[serde(default = "default_hidden_sizes")]
        hidden: Vec<usize>,
        #[serde(default = "default_lambdas")]
        lambdas: Vec<f64>,
    },
    NeuralBandit3 {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        id: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        gamma_model: Option<f64>,
        #[serde(default = "default_hidden_sizes")]
        hidden: Vec<usize>,
        #[serde(default = "default_lambdas")]
        lambdas: Vec<f64>,
    },
}

fn default_lambda() -> f64 {
    0.1
}

fn default_hidden() -> usize {
    25
}

fn default_hidden_sizes() -> Vec<usize> {
    DEFAULT_HIDDEN_SIZES.to_vec()
}

fn default_lambdas() -> Vec<f64> {
    DEFAULT_LAMBDAS.to_vec()
}

impl PolicySpec {
    pub fn kind(&self) -> &'static str {
        match self {
            PolicySpec::Random { .. } => "random",
            PolicySpec::Banditron { .. } => "banditron",
            PolicySpec::NeuralBandit1 { .. } => "neural_bandit1",
            PolicySpec::NeuralBandit2 { .. } => "neural_bandit2",
            PolicySpec::NeuralBandit3 { .. } => "neural_bandit3",
        }
    }

    /// Explicit id, or the kind name.
    pub fn id(&self) -> String {
        let explicit = match self {
            PolicySpec::Random { id }
            | PolicySpec::Banditron { id, .. }
            | PolicySpec::NeuralBandit1 { id, .. }
            | PolicySpec::NeuralBandit2 { id, .. }
            | PolicySpec::NeuralBandit3 { id, .. } => id,
        };
        explicit.clone().unwrap_or_else(|| self.kind().to_string())
    }

    /// Own exploration rate, falling back to the experiment default.
    /// `None` for the random policy.
    pub fn gamma(&self, default: f64) -> Option<f64> {
        match self {
            PolicySpec::Random { .. } => None,
            PolicySpec::Banditron { gamma, .. }
            | PolicySpec::NeuralBandit1 { gamma, .. }
            | PolicySpec::NeuralBandit2 { gamma, .. }
            | PolicySpec::NeuralBandit3 { gamma, .. } => Some(gamma.unwrap_or(default)),
        }
    }

    /// Committee exploration rate; `None` outside committees.
    pub fn gamma_model(&self, default: f64) -> Option<f64> {
        match self {
            PolicySpec::NeuralBandit2 { gamma_model, .. }
            | PolicySpec::NeuralBandit3 { gamma_model, .. } => Some(gamma_model.unwrap_or(default)),
            _ => None,
        }
    }

    fn clear_gamma(&mut self) {
        match self {
            PolicySpec::Random { .. } => {}
            PolicySpec::Banditron { gamma, .. }
            | PolicySpec::NeuralBandit1 { gamma, .. }
            | PolicySpec::NeuralBandit2 { gamma, .. }
            | PolicySpec::NeuralBandit3 { gamma, .. } => *gamma = None,
        }
    }

    fn clear_gamma_model(&mut self) {
        if let PolicySpec::NeuralBandit2 { gamma_model, .. }
        | PolicySpec::NeuralBandit3 { gamma_model, .. } = self
        {
            *gamma_model = None;
        }
    }
}

/// Command-line overrides applied on top of a config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub horizon: Option<u64>,
    pub runs: Option<usize>,
    pub seed: Option<u64>,
    /// Replaces every policy's exploration rate.
    pub gamma: Option<f64>,
    /// Replaces every committee's model exploration rate.
    pub gamma_model: Option<f64>,
    /// Sets the drift period; 0 disables drift.
    pub drift_period: Option<u64>,
    pub output: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| {
            let field = e
                .span()
                .map(|s| format!("byte {}", s.start))
                .unwrap_or_else(|| "config".to_string());
            Error::config(field, e.message().to_string())
        })?;
        config.validate()?;
        Ok(config)
    }

    /// Reads and validates a config file, resolving a relative dataset path
    /// against the file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::from_toml(&text)?;
        if let StreamSpec::Covertype {
            path: Some(data), ..
        } = &mut config.stream
        {
            if data.is_relative() {
                if let Some(dir) = path.parent() {
                    *data = dir.join(&*data);
                }
            }
        }
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes to TOML")
    }

    pub fn apply(&mut self, overrides: &Overrides) -> Result<()> {
        if let Some(h) = overrides.horizon {
            self.horizon = h;
        }
        if let Some(r) = overrides.runs {
            self.runs = r;
        }
        if let Some(s) = overrides.seed {
            self.seed = s;
        }
        if let Some(g) = overrides.gamma {
            self.gamma = g;
            self.policies.iter_mut().for_each(PolicySpec::clear_gamma);
        }
        if let Some(g) = overrides.gamma_model {
            self.gamma_model = g;
            self.policies
                .iter_mut()
                .for_each(PolicySpec::clear_gamma_model);
        }
        if let Some(p) = overrides.drift_period {
            let drift = match (p, self.stream.drift()) {
                (0, _) => None,
                (period, Some(d)) => Some(DriftSchedule {
                    period,
                    step: d.step,
                }),
                (period, None) => Some(DriftSchedule { period, step: 1 }),
            };
            self.stream.set_drift(drift);
        }
        if let Some(out) = &overrides.output {
            self.output = out.clone();
        }
        self.validate()
    }

    /// Trailing window for classification rates.
    pub fn effective_window(&self) -> u64 {
        self.window
            .unwrap_or_else(|| (self.horizon / 10).clamp(1, 100_000))
    }

    /// Spacing of exported curve points; the last round is always exported.
    pub fn effective_record_every(&self) -> u64 {
        self.record_every.unwrap_or((self.horizon / 1000).max(1))
    }

    /// Seed of run `i`.
    pub fn run_seed(&self, run: usize) -> u64 {
        self.seed.wrapping_add(run as u64)
    }

    pub fn policy_ids(&self) -> Vec<String> {
        self.policies.iter().map(PolicySpec::id).collect()
    }

    pub fn validate(&self) -> Result<()> {
        if self.name.is_empty()
            || !self
                .name
                .chars()
                .all(|c| c.is_ascii_alphanumeric() || "-_.".contains(c))
        {
            return Err(Error::config(
                "name",
                "must be non-empty and use only letters, digits, '-', '_' or '.'",
            ));
        }
        if self.runs == 0 {
            return Err(Error::config("runs", "must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon", "must be positive"));
        }
        let window = self.effective_window();
        if window == 0 {
            return Err(Error::config("window", "must be positive"));
        }
        if window > self.horizon {
            return Err(Error::config(
                "window",
                format!("{window} exceeds the horizon {}", self.horizon),
            ));
        }
        if self.effective_record_every() == 0 {
            return Err(Error::config("record_every", "must be positive"));
        }
        check_gamma("gamma", self.gamma)?;
        check_gamma("gamma_model", self.gamma_model)?;
        self.oracle.validate()?;
        match &self.stream {
            StreamSpec::Covertype { rows: Some(0), .. } => {
                return Err(Error::config("stream.rows", "must be positive"));
            }
            StreamSpec::Linear {
                input_bits, arms, ..
            } => {
                if *input_bits == 0 {
                    return Err(Error::config("stream.input_bits", "must be positive"));
                }
                if *arms < 2 {
                    return Err(Error::config("stream.arms", "need at least 2 arms"));
                }
            }
            _ => {}
        }
        if let Some(d) = self.stream.drift() {
            d.validate()
                .map_err(|_| Error::config("stream.drift.period", "must be positive"))?;
        }
        if self.policies.is_empty() {
            return Err(Error::config("policies", "at least one policy is required"));
        }
        let mut seen = HashSet::new();
        for (i, p) in self.policies.iter().enumerate() {
            let id = p.id();
            if !seen.insert(id.clone()) {
                return Err(Error::config(
                    format!("policies[{i}].id"),
                    format!("duplicate id `{id}`; give each policy a distinct id"),
                ));
            }
            if id.is_empty() || id.contains([',', '"', '\n']) {
                return Err(Error::config(
                    format!("policies[{i}].id"),
                    "must be non-empty without commas, quotes or newlines",
                ));
            }
            validate_policy(i, p, self.gamma, self.gamma_model)?;
        }
        Ok(())
    }

    /// Settings that are legal but probably unintended.
    pub fn warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in &self.policies {
            if p.gamma(self.gamma) == Some(0.0) && !matches!(p, PolicySpec::Banditron { .. }) {
                out.push(format!(
                    "policy `{}` has gamma = 0: arms off the greedy choice are never played, so their networks never learn",
                    p.id()
                ));
            }
            if p.gamma_model(self.gamma_model) == Some(0.0) {
                out.push(format!(
                    "policy `{}` has gamma_model = 0: its model weights can lock onto one model",
                    p.id()
                ));
            }
        }
        out
    }
}

fn validate_policy(i: usize, p: &PolicySpec, gamma: f64, gamma_model: f64) -> Result<()> {
    let field = |name: &str| format!("policies[{i}].{name}");
    if let Some(g) = p.gamma(gamma) {
        check_gamma(&field("gamma"), g)?;
    }
    if let Some(g) = p.gamma_model(gamma_model) {
        check_gamma(&field("gamma_model"), g)?;
    }
    let check_lambda = |name: String, l: f64| {
        if l > 0.0 && l <= 1.0 {
            Ok(())
        } else {
            Err(Error::config(name, format!("{l} is outside (0, 1]")))
        }
    };
    match p {
        PolicySpec::NeuralBandit1 { lambda, hidden, .. } => {
            check_lambda(field("lambda"), *lambda)?;
            if *hidden == 0 {
                return Err(Error::config(field("hidden"), "must be positive"));
            }
        }
        PolicySpec::NeuralBandit2 {
            hidden, lambdas, ..
        }
        | PolicySpec::NeuralBandit3 {
            hidden, lambdas, ..
        } => {
            if hidden.is_empty() || hidden.contains(&0) {
                return Err(Error::config(
                    field("hidden"),
                    "needs at least one size, all positive",
                ));
            }
            if lambdas.is_empty() {
                return Err(Error::config(field("lambdas"), "needs at least one step"));
            }
            for (j, l) in lambdas.iter().enumerate() {
                check_lambda(field(&format!("lambdas[{j}]")), *l)?;
            }
        }
        _ => {}
    }
    Ok(())
}
