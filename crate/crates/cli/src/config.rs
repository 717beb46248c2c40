use serde::{Deserialize, Serialize};
use std::path::PathBuf;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Growth,
    Contraction,
    Schreier,
    Orbit,
    InvertedOrbit,
    Walk,
    Psi,
    Relators,
    Constants,
    Classify,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Text,
}

/// Everything a run needs. Every field has a default, so a config file only
/// lists what it changes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    /// Oracle in `PREFIX(PERIOD)*` form.
    pub oracle: String,
    pub format: Format,
    /// Ball radius for growth, contraction and orbit balls.
    pub radius: usize,
    /// Tree level for Schreier graphs; maximal substitution power for relators.
    pub level: usize,
    /// Walk length, or the largest `n` for inverted orbit growth.
    pub steps: usize,
    /// Boundary point for orbit commands, over `{0, 1}`.
    pub point: String,
    /// `uniform`, `kaimanovich`, or `word:weight` pairs such as `a:1/2,b:1/4,c:1/4`.
    pub measure: Option<String>,
    pub seed: u64,
    /// Monte Carlo samples; zero disables sampling where it is optional.
    pub samples: u64,
    pub path_cap: usize,
    /// Use the truncated-exact ψ-map with this length cap instead of sampling.
    pub length_cap: Option<usize>,
    pub vertex: u8,
    pub lambda: f64,
    pub tol: f64,
    pub constant: f64,
    pub anti_level: usize,
    pub anti_ratio: f64,
    /// Second oracle for the ball-prefix comparison in `growth`.
    pub compare: Option<String>,
    pub shared_prefix: Option<usize>,
    pub include_elements: bool,
    pub max_elements: usize,
    pub max_seconds: Option<f64>,
    pub max_vertices: usize,
    pub expansion_cap: usize,
    pub max_inverted_steps: usize,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    /// Columnar file for external plotting.
    pub plot: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            command: Command::Growth,
            oracle: "(012)*".into(),
            format: Format::Json,
            radius: 8,
            level: 4,
            steps: 10,
            point: "(0)*".into(),
            measure: None,
            seed: 0,
            samples: 100_000,
            path_cap: selfsim_core::walks::DEFAULT_PATH_CAP,
            length_cap: None,
            vertex: 0,
            lambda: 0.5,
            tol: 0.01,
            constant: 1.0,
            anti_level: 1,
            anti_ratio: 2.0,
            compare: None,
            shared_prefix: None,
            include_elements: false,
            max_elements: selfsim_core::growth::DEFAULT_MAX_ELEMENTS,
            max_seconds: None,
            max_vertices: selfsim_core::orbits::DEFAULT_MAX_VERTICES,
            expansion_cap: selfsim_core::orbits::DEFAULT_EXPANSION_CAP,
            max_inverted_steps: 16,
            threads: None,
            output: None,
            plot: None,
        }
    }
}

pub const ENV_MAX_ELEMENTS: &str = "SELFSIM_MAX_ELEMENTS";
pub const ENV_MAX_SECONDS: &str = "SELFSIM_MAX_SECONDS";
pub const ENV_MAX_VERTICES: &str = "SELFSIM_MAX_VERTICES";
pub const ENV_PATH_CAP: &str = "SELFSIM_PATH_CAP";

fn env_value<T: std::str::FromStr>(name: &str) -> Result<Option<T>, CliError> {
    match std::env::var(name) {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| CliError::Config(format!("{name}={v:?} is not a valid value"))),
        Err(_) => Ok(None),
    }
}

impl RunConfig {
    /// Defaults with budget overrides from the environment applied.
    pub fn from_env() -> Result<Self, CliError> {
        let mut c = RunConfig::default();
        if let Some(v) = env_value(ENV_MAX_ELEMENTS)? {
            c.max_elements = v;
        }
        if let Some(v) = env_value(ENV_MAX_SECONDS)? {
            c.max_seconds = Some(v);
        }
        if let Some(v) = env_value(ENV_MAX_VERTICES)? {
            c.max_vertices = v;
        }
        if let Some(v) = env_value(ENV_PATH_CAP)? {
            c.path_cap = v;
        }
        Ok(c)
    }

    /// Parses a TOML document on top of `base`.
    pub fn from_toml_over(base: &RunConfig, text: &str) -> Result<Self, CliError> {
        let mut doc = toml::Value::try_from(base).map_err(|e| CliError::Config(e.to_string()))?;
        let overlay: toml::Value =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        if let (Some(d), toml::Value::Table(o)) = (doc.as_table_mut(), overlay) {
            d.extend(o);
        }
        doc.try_into()
            .map_err(|e: toml::de::Error| CliError::Config(e.to_string()))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        RunConfig::from_toml_over(&RunConfig::default(), text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}
