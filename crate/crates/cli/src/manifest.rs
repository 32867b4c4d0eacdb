use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, Seed};
use crate::CliError;

pub const TOOL: &str = "toomqca";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Record of one run, stored as `<experiment>.manifest.toml` next to its CSVs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub master_seed: Seed,
    /// RFC 3339, UTC.
    pub started: String,
    pub finished: String,
    pub config: RunConfig,
    pub derived_seeds: BTreeMap<String, Seed>,
    /// CSV file name to sha256 of its bytes.
    pub outputs: BTreeMap<String, String>,
}

impl RunManifest {
    pub fn file_name(experiment: &str) -> String {
        format!("{experiment}.manifest.toml")
    }

    pub fn to_toml(&self) -> Result<String, CliError> {
        toml::to_string(self).map_err(|e| CliError::Other(format!("manifest encoding: {e}")))
    }

    pub fn from_toml(text: &str) -> Result<Self, CliError> {
        toml::from_str(text).map_err(|e| CliError::Config(format!("manifest: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(&text)
    }

    pub fn save(&self, dir: &Path) -> Result<std::path::PathBuf, CliError> {
        let path = dir.join(Self::file_name(self.config.experiment.name()));
        std::fs::write(&path, self.to_toml()?)?;
        Ok(path)
    }
}
