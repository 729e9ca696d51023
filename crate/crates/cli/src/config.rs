//! Experiment configuration: a TOML document with `[model]`, `[run]` and
//! `[output]` sections. Unknown keys and duplicate keys are errors; every
//! field except `run.mode` has a default.

use std::path::PathBuf;

use dtdvp_core::fock::{NormKind, DEFAULT_DENSE_CAP};
use dtdvp_core::hubbard::HubbardParams;
use dtdvp_core::metrics::AlphaMetric;
use dtdvp_core::ode::TimeGrid;
use serde::{Deserialize, Serialize};

use crate::error::RunError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Exact,
    Gaussified,
    Tdvp,
    Compare,
    VerifyTheorem1,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Gaussified => "gaussified",
            Mode::Tdvp => "tdvp",
            Mode::Compare => "compare",
            Mode::VerifyTheorem1 => "verify-theorem1",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Csv,
    JsonLines,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::JsonLines => "jsonl",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Norm {
    #[default]
    Frobenius,
    Spectral,
}

impl From<Norm> for NormKind {
    fn from(n: Norm) -> Self {
        match n {
            Norm::Frobenius => NormKind::Frobenius,
            Norm::Spectral => NormKind::Spectral,
        }
    }
}

/// Hubbard chain parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub sites: usize,
    pub hopping: f64,
    pub interaction: f64,
    pub chemical_potential: f64,
    pub kappa: f64,
    pub periodic: bool,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let p = HubbardParams::default();
        Self {
            sites: p.sites,
            hopping: p.hopping,
            interaction: p.interaction,
            chemical_potential: p.chemical_potential,
            kappa: p.kappa,
            periodic: p.periodic,
        }
    }
}

impl ModelConfig {
    pub fn params(&self) -> HubbardParams {
        HubbardParams {
            sites: self.sites,
            hopping: self.hopping,
            interaction: self.interaction,
            chemical_potential: self.chemical_potential,
            kappa: self.kappa,
            periodic: self.periodic,
        }
    }
}

fn default_t_final() -> f64 {
    20.0
}
fn default_dt() -> f64 {
    dtdvp_core::ode::DEFAULT_DT
}
fn default_sample_interval() -> f64 {
    dtdvp_core::ode::DEFAULT_SAMPLE_INTERVAL
}
fn default_alpha() -> Vec<f64> {
    vec![0.1, 0.25, 0.5, 0.75, 0.9]
}
fn default_seed() -> u64 {
    7
}
fn default_verify_modes() -> usize {
    3
}
fn default_verify_samples() -> usize {
    10
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub mode: Mode,
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    #[serde(default = "default_sample_interval")]
    pub sample_interval: f64,
    /// Exponents for `tdvp` (one run each) and `verify-theorem1`.
    #[serde(default = "default_alpha")]
    pub alpha: Vec<f64>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default)]
    pub norm: Norm,
    /// Mode count of the random instances in `verify-theorem1`.
    #[serde(default = "default_verify_modes")]
    pub verify_modes: usize,
    /// Number of random instances in `verify-theorem1`.
    #[serde(default = "default_verify_samples")]
    pub verify_samples: usize,
}

impl RunConfig {
    pub fn new(mode: Mode) -> Self {
        Self {
            mode,
            t_final: default_t_final(),
            dt: default_dt(),
            sample_interval: default_sample_interval(),
            alpha: default_alpha(),
            seed: default_seed(),
            norm: Norm::default(),
            verify_modes: default_verify_modes(),
            verify_samples: default_verify_samples(),
        }
    }
}

fn default_directory() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default = "default_directory")]
    pub directory: PathBuf,
    #[serde(default)]
    pub format: Format,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self { directory: default_directory(), format: Format::default() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default)]
    pub model: ModelConfig,
    pub run: RunConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

impl ExperimentConfig {
    pub fn new(mode: Mode) -> Self {
        Self { model: ModelConfig::default(), run: RunConfig::new(mode), output: OutputConfig::default() }
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config is serializable")
    }

    pub fn grid(&self) -> Result<TimeGrid, RunError> {
        TimeGrid::new(self.run.t_final, self.run.dt, self.run.sample_interval)
            .map_err(|e| RunError::Config(format!("run: {e}")))
    }

    pub fn metrics(&self) -> Result<Vec<AlphaMetric>, RunError> {
        self.run
            .alpha
            .iter()
            .map(|&a| AlphaMetric::single(a).map_err(|e| RunError::Config(format!("run.alpha: {e}"))))
            .collect()
    }

    /// Semantic checks beyond what the parser enforces.
    pub fn validate(&self) -> Result<(), RunError> {
        if !(self.run.t_final > 0.0) {
            return Err(RunError::Config("run.t_final must be positive".into()));
        }
        self.grid()?;
        // TOML integers are signed 64-bit
        if i64::try_from(self.run.seed).is_err() {
            return Err(RunError::Config(format!("run.seed must not exceed {}", i64::MAX)));
        }
        if self.run.alpha.is_empty() {
            return Err(RunError::Config("run.alpha must list at least one exponent".into()));
        }
        self.metrics()?;
        self.model.params().validate().map_err(|e| RunError::Config(format!("model: {e}")))?;
        if 2 * self.model.sites > DEFAULT_DENSE_CAP {
            return Err(RunError::Config(format!(
                "model.sites = {} exceeds the dense limit of {} sites",
                self.model.sites,
                DEFAULT_DENSE_CAP / 2
            )));
        }
        if self.run.mode == Mode::VerifyTheorem1 {
            if !(1..=DEFAULT_DENSE_CAP).contains(&self.run.verify_modes) {
                return Err(RunError::Config(format!("run.verify_modes must lie in 1..={DEFAULT_DENSE_CAP}")));
            }
            if self.run.verify_samples == 0 {
                return Err(RunError::Config("run.verify_samples must be positive".into()));
            }
        }
        Ok(())
    }
}

/// Parses and validates a config document.
pub fn parse_config(text: &str) -> Result<ExperimentConfig, RunError> {
    let config: ExperimentConfig = toml::from_str(text).map_err(|e| RunError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}
