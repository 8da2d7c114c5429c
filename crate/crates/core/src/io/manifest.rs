//! Provenance record written before any other output of an invocation and
//! rewritten when it finishes.

use super::config::ExperimentConfig;
use crate::error::{Error, Result};
use serde::Serialize;
use serde_json::Value;
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::{Instant, SystemTime, UNIX_EPOCH};

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Running,
    Completed,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: String,
    pub version: String,
    pub experiment: String,
    pub master_seed: u64,
    pub threads: usize,
    /// The fully resolved configuration.
    pub config: ExperimentConfig,
    /// Output files, relative to the manifest's directory.
    pub artifacts: Vec<PathBuf>,
    pub started_unix_secs: u64,
    pub wall_secs: Option<f64>,
    pub status: RunStatus,
    pub error: Option<String>,
    /// Headline results such as plateaus, ranks and circulation.
    pub notes: BTreeMap<String, Value>,
    #[serde(skip)]
    started: Option<Instant>,
}

impl RunManifest {
    pub fn new(experiment: &str, config: &ExperimentConfig, threads: usize) -> Self {
        RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            experiment: experiment.to_string(),
            master_seed: config.seed,
            threads,
            config: config.clone(),
            artifacts: Vec::new(),
            started_unix_secs: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            wall_secs: None,
            status: RunStatus::Running,
            error: None,
            notes: BTreeMap::new(),
            started: Some(Instant::now()),
        }
    }

    /// Register an output file; each path may be claimed once.
    pub fn claim(&mut self, relative: impl Into<PathBuf>) -> Result<PathBuf> {
        let rel = relative.into();
        if self.artifacts.contains(&rel) {
            return Err(Error::Config(format!("artifact `{}` claimed twice", rel.display())));
        }
        self.artifacts.push(rel.clone());
        Ok(rel)
    }

    pub fn note(&mut self, key: &str, value: impl Serialize) {
        let v = serde_json::to_value(value).unwrap_or(Value::Null);
        self.notes.insert(key.to_string(), v);
    }

    pub fn finish(&mut self, outcome: &Result<()>) {
        self.wall_secs = self.started.map(|s| s.elapsed().as_secs_f64());
        match outcome {
            Ok(()) => self.status = RunStatus::Completed,
            Err(e) => {
                self.status = RunStatus::Failed;
                self.error = Some(e.to_string());
            }
        }
    }

    /// Write to `dir/manifest.json` via a temporary file, so readers never
    /// see a half-written manifest.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let text = serde_json::to_string_pretty(self).map_err(|e| Error::Config(e.to_string()))?;
        let tmp = dir.join(format!("{MANIFEST_FILE}.tmp"));
        std::fs::write(&tmp, text + "\n")?;
        std::fs::rename(&tmp, dir.join(MANIFEST_FILE))?;
        Ok(())
    }
}
