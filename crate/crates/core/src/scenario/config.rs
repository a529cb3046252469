//! Experiment files.
//!
//! ```toml
//! [system]
//! rate_1 = 0.3333333333333333
//! omega_x = 1.0
//! seed = 7
//!
//! [sweep_total_power]
//! grid = "-10:30:2"
//! trials = 200000
//! out = "fig3.csv"
//!
//! [power_gains]
//! grid = [0.001, 0.01, 0.1, 0.5]
//! ```
//!
//! Precedence, lowest first: built-in defaults, `[system]`, the scenario's
//! own section, command-line overrides.

use std::path::{Path, PathBuf};

use serde::Deserialize;

use super::{parse_grid, ScenarioKind, ScenarioSpec};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub rate_1: Option<f64>,
    pub rate_2: Option<f64>,
    pub omega_x: Option<f64>,
    pub omega_y: Option<f64>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(untagged)]
pub enum GridValue {
    Range(String),
    List(Vec<f64>),
}

impl GridValue {
    pub fn resolve(&self) -> Result<Vec<f64>> {
        match self {
            GridValue::Range(text) => parse_grid(text),
            GridValue::List(values) => Ok(values.clone()),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSection {
    pub grid: Option<GridValue>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    #[serde(default)]
    pub system: SystemSection,
    pub sweep_total_power: Option<ScenarioSection>,
    pub power_gains: Option<ScenarioSection>,
    pub validate: Option<ScenarioSection>,
}

impl ConfigFile {
    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{origin}: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text, &path.display().to_string())
    }

    pub fn section(&self, kind: ScenarioKind) -> Option<&ScenarioSection> {
        match kind {
            ScenarioKind::SweepTotalPower => self.sweep_total_power.as_ref(),
            ScenarioKind::PowerGains => self.power_gains.as_ref(),
            ScenarioKind::Validate => self.validate.as_ref(),
        }
    }
}

/// Command-line values that win over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SpecOverrides {
    pub grid: Option<String>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

/// Builds and validates the spec for `kind`.
pub fn build_spec(
    kind: ScenarioKind,
    file: Option<&ConfigFile>,
    overrides: &SpecOverrides,
) -> Result<ScenarioSpec> {
    let mut spec = ScenarioSpec::new(kind);
    if let Some(file) = file {
        let sys = &file.system;
        spec.rate_1 = sys.rate_1.unwrap_or(spec.rate_1);
        spec.rate_2 = sys.rate_2.unwrap_or(spec.rate_2);
        spec.omega_x = sys.omega_x.unwrap_or(spec.omega_x);
        spec.omega_y = sys.omega_y.unwrap_or(spec.omega_y);
        spec.trials = sys.trials.unwrap_or(spec.trials);
        spec.seed = sys.seed.unwrap_or(spec.seed);
        if let Some(section) = file.section(kind) {
            let context = |e: Error| Error::Config(format!("[{}] grid: {e}", kind.section()));
            if let Some(grid) = &section.grid {
                spec.grid = grid.resolve().map_err(context)?;
            }
            spec.trials = section.trials.unwrap_or(spec.trials);
            spec.seed = section.seed.unwrap_or(spec.seed);
            spec.output_path = section.out.clone().or(spec.output_path);
        }
    }
    if let Some(grid) = &overrides.grid {
        spec.grid = parse_grid(grid)?;
    }
    spec.trials = overrides.trials.unwrap_or(spec.trials);
    spec.seed = overrides.seed.unwrap_or(spec.seed);
    spec.output_path = overrides.out.clone().or(spec.output_path);
    spec.validate()?;
    Ok(spec)
}
