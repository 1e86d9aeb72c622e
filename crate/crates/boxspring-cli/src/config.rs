//! Flat JSON scenario configuration. Keys mirror the command-line flags
//! one to one; flags override file values.

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::{CliError, OutputFormat};

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub mass: Option<f64>,
    pub stiffness: Option<f64>,
    pub gravity: Option<f64>,
    pub drops: Option<u64>,
    pub photon_energy: Option<f64>,
    pub capacitance: Option<f64>,
    pub charge: Option<f64>,
    pub resistance: Option<f64>,
    pub jobs: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<OutputFormat>,
    pub sweep: Option<Vec<u64>>,
    pub step_fraction: Option<f64>,
    pub horizon_multiplier: Option<f64>,
}

/// Read and parse a config file. Unreadable or malformed files are usage
/// errors (exit 2); whether the values make sense is checked later, when
/// the selected command resolves them (exit 1).
pub fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
    serde_json::from_str(&text)
        .map_err(|e| CliError::Usage(format!("cannot parse config {}: {e}", path.display())))
}
