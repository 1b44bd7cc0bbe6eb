use std::fs;
use std::path::{Path, PathBuf};

use anisoheat::asymptotics::ExperimentSetup;
use serde::{Deserialize, Serialize};

use crate::UsageError;

/// A rate experiment and where its outputs go.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    #[serde(flatten)]
    pub setup: ExperimentSetup,
    #[serde(default)]
    pub output: OutputPaths,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OutputPaths {
    /// Defaults to `<experiment>_report.json` in the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    /// Defaults to `<experiment>_errors.csv` in the working directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
}

impl ExperimentConfig {
    pub fn new(setup: ExperimentSetup) -> Self {
        ExperimentConfig { setup, output: OutputPaths::default() }
    }

    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = fs::read_to_string(path).map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| UsageError(format!("{}: {e}", path.display())))
    }

    pub fn parse(text: &str) -> Result<Self, UsageError> {
        serde_json::from_str(text).map_err(|e| UsageError(format!("invalid config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn json_path(&self) -> PathBuf {
        self.output.json.clone().unwrap_or_else(|| PathBuf::from(format!("{}_report.json", self.setup.experiment)))
    }

    pub fn csv_path(&self) -> PathBuf {
        self.output.csv.clone().unwrap_or_else(|| PathBuf::from(format!("{}_errors.csv", self.setup.experiment)))
    }
}
