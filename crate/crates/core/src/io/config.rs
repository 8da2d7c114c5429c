//! Declarative experiment configuration: a single TOML document whose
//! sections hold the trial template and the settings of each study.

use crate::error::{Error, Result};
use crate::experiments::{FlowSettings, SearchSettings, TrialConfig};
use crate::field::FieldSpec;
use serde::{Deserialize, Serialize};
use std::path::Path;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Master seed from which every trial seed is derived.
    pub seed: u64,
    /// Template for every trial; studies override the fields they vary.
    pub trial: TrialConfig,
    pub run: RunSettings,
    pub sweep: SweepSettings,
    pub perturb: PerturbSettings,
    pub ablate: AblateSettings,
    pub search: SearchSettings,
    pub flow: FlowSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            seed: 1,
            trial: TrialConfig::default(),
            run: RunSettings::default(),
            sweep: SweepSettings::default(),
            perturb: PerturbSettings::default(),
            ablate: AblateSettings::default(),
            search: SearchSettings::default(),
            flow: FlowSettings::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunSettings {
    /// Dump a frame every N steps; 0 disables frame dumps.
    pub frames_every: u64,
    /// Pixels per world unit of rendered frames.
    pub frame_scale: f64,
    /// Write one CSV row per robot decision.
    pub trace: bool,
}

impl Default for RunSettings {
    fn default() -> Self {
        RunSettings {
            frames_every: 0,
            frame_scale: 1.0,
            trace: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SweepSettings {
    pub counts: Vec<usize>,
    pub trials: usize,
}

impl Default for SweepSettings {
    fn default() -> Self {
        SweepSettings {
            counts: vec![1, 2, 4, 8, 16],
            trials: 30,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PerturbSettings {
    pub robots: usize,
    pub trials: usize,
    pub scatter_step: u64,
    /// Width of the pre- and post-scatter plateau windows, in steps.
    pub window: u64,
}

impl Default for PerturbSettings {
    fn default() -> Self {
        PerturbSettings {
            robots: 4,
            trials: 30,
            scatter_step: 10_000,
            window: 2000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblateSettings {
    /// Shape the study runs on; replaces the trial template's field.
    pub field: FieldSpec,
    pub robots: usize,
    pub radii: Vec<f64>,
    pub trials: usize,
    /// Render the final world of the first trial at every radius.
    pub frames: bool,
}

impl Default for AblateSettings {
    fn default() -> Self {
        AblateSettings {
            field: FieldSpec::l_shape(),
            robots: 4,
            radii: vec![420.0, 100.0, 80.0],
            trials: 10,
            frames: true,
        }
    }
}

fn prefixed(prefix: &str, e: Error) -> Error {
    match e {
        Error::Param { key, msg } => Error::Param {
            key: format!("{prefix}.{key}"),
            msg,
        },
        other => other,
    }
}

fn check(ok: bool, key: &str, msg: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Param {
            key: key.to_string(),
            msg: msg.to_string(),
        })
    }
}

impl ExperimentConfig {
    /// Parse a TOML document; missing keys take their defaults.
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_toml(&text).map_err(|e| match e {
            Error::Config(msg) => Error::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        self.trial.validate().map_err(|e| prefixed("trial", e))?;
        check(self.run.frame_scale > 0.0, "run.frame_scale", "must be > 0")?;
        check(!self.sweep.counts.is_empty(), "sweep.counts", "must not be empty")?;
        check(self.sweep.trials >= 2, "sweep.trials", "must be >= 2")?;
        check(self.perturb.trials >= 2, "perturb.trials", "must be >= 2")?;
        check(
            self.perturb.window >= 1 && self.perturb.window <= self.perturb.scatter_step,
            "perturb.window",
            "must lie in 1..=perturb.scatter_step",
        )?;
        check(!self.ablate.radii.is_empty(), "ablate.radii", "must not be empty")?;
        check(self.ablate.radii.iter().all(|r| *r > 0.0), "ablate.radii", "every radius must be > 0")?;
        check(self.ablate.trials >= 1, "ablate.trials", "must be >= 1")?;
        check(self.search.trials_per_combo >= 1, "search.trials_per_combo", "must be >= 1")?;
        check(self.search.reduced_steps >= 1, "search.reduced_steps", "must be >= 1")?;
        check(self.flow.steps >= 1, "flow.steps", "must be >= 1")?;
        check(self.flow.headings >= 1, "flow.headings", "must be >= 1")?;
        check(self.flow.spacing > 0.0, "flow.spacing", "must be > 0")?;
        Ok(())
    }
}
