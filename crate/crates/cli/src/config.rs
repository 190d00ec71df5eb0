//! Run configuration: flags, then environment, then an optional TOML file,
//! then built-in defaults.

use std::path::Path;

use mdpsynth::values::{Backend, FloatOptions, ITERATION_CAP, TOLERANCE};
use serde::Deserialize;

use crate::CliError;

pub const ENV_SEED: &str = "MDPSYNTH_SEED";
pub const ENV_BACKEND: &str = "MDPSYNTH_BACKEND";

pub const DEFAULT_SEED: u64 = 42;

#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub backend: Option<String>,
    pub tolerance: Option<f64>,
    pub iteration_cap: Option<u64>,
    pub radius: Option<usize>,
    pub branch_cap: Option<usize>,
    pub seed: Option<u64>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input(format!("bad config {}: {e}", path.display())))
    }
}

/// Values given on the command line; `None` means "not given".
#[derive(Clone, Debug, Default)]
pub struct Overrides {
    pub backend: Option<Backend>,
    pub tolerance: Option<f64>,
    pub iteration_cap: Option<u64>,
    pub radius: Option<usize>,
    pub branch_cap: Option<usize>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub backend: Backend,
    pub tolerance: f64,
    pub iteration_cap: u64,
    /// Truncation radius; commands that cannot guess one require it.
    pub radius: Option<usize>,
    pub branch_cap: Option<usize>,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            backend: Backend::Auto,
            tolerance: TOLERANCE,
            iteration_cap: ITERATION_CAP,
            radius: None,
            branch_cap: None,
            seed: DEFAULT_SEED,
        }
    }
}

impl Config {
    pub fn resolve(
        flags: &Overrides,
        env: &dyn Fn(&str) -> Option<String>,
        file: Option<&FileConfig>,
    ) -> Result<Config, CliError> {
        let file = file.cloned().unwrap_or_default();
        let d = Config::default();
        let env_seed = match env(ENV_SEED) {
            Some(s) => {
                Some(s.trim().parse::<u64>().map_err(|_| CliError::Usage(format!("{ENV_SEED}: bad seed `{s}`")))?)
            }
            None => None,
        };
        let env_backend = match env(ENV_BACKEND) {
            Some(s) => Some(parse_backend(&s).map_err(|e| CliError::Usage(format!("{ENV_BACKEND}: {e}")))?),
            None => None,
        };
        let file_backend = match &file.backend {
            Some(s) => Some(parse_backend(s).map_err(CliError::Input)?),
            None => None,
        };
        let config = Config {
            backend: flags.backend.or(env_backend).or(file_backend).unwrap_or(d.backend),
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(d.tolerance),
            iteration_cap: flags.iteration_cap.or(file.iteration_cap).unwrap_or(d.iteration_cap),
            radius: flags.radius.or(file.radius),
            branch_cap: flags.branch_cap.or(file.branch_cap),
            seed: flags.seed.or(env_seed).or(file.seed).unwrap_or(d.seed),
        };
        config.float().check().map_err(|e| CliError::Usage(e.to_string()))?;
        if config.branch_cap == Some(0) {
            return Err(CliError::Usage("branch cap must be at least 1".into()));
        }
        Ok(config)
    }

    pub fn float(&self) -> FloatOptions {
        FloatOptions { tolerance: self.tolerance, iteration_cap: self.iteration_cap }
    }
}

/// Accepts `rational` as well as the library's own names.
pub fn parse_backend(s: &str) -> Result<Backend, String> {
    s.trim().to_ascii_lowercase().parse::<Backend>().map_err(|e| e.to_string())
}
