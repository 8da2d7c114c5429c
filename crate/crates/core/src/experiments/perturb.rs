//! Mid-trial perturbation: every puck is scattered at a fixed step and the
//! swarm has to rebuild the structure.

use super::sweep::{group_seeds, run_trials, SweepSummary};
use super::trial::{run_trial, Arena, TrialConfig, TrialRecord};
use crate::error::{param, Result};

/// One trial whose pucks are all repositioned at `scatter_step`.
pub fn perturbation_trial(config: &TrialConfig, arena: &Arena, scatter_step: u64, seed: u64) -> Result<TrialRecord> {
    let config = TrialConfig {
        scatter_step: Some(scatter_step),
        ..config.clone()
    };
    run_trial(&config, arena, seed)
}

/// Aggregate over many perturbation trials.
#[derive(Debug, Clone, PartialEq)]
pub struct PerturbationStudy {
    pub summary: SweepSummary,
    pub scatter_step: u64,
    /// Width of the plateau windows, in steps.
    pub window: u64,
    /// Mean proportion over the window ending at the scatter.
    pub pre_plateau: f64,
    /// Mean proportion over the window ending at the last step.
    pub post_plateau: f64,
    /// Mean proportion sampled just before the scatter.
    pub before: f64,
    /// Mean proportion at the first sample after the scatter.
    pub after: f64,
}

pub fn perturbation_study(
    config: &TrialConfig,
    arena: &Arena,
    scatter_step: u64,
    trials: usize,
    window: u64,
    master: u64,
) -> Result<PerturbationStudy> {
    if scatter_step >= config.max_steps {
        return Err(param("perturb.scatter_step", "must be < max_steps"));
    }
    if window == 0 || window > scatter_step {
        return Err(param("perturb.window", "must lie in 1..=scatter_step"));
    }
    let config = TrialConfig {
        scatter_step: Some(scatter_step),
        ..config.clone()
    };
    let seeds = group_seeds(master, "perturb", config.robots as u64, trials);
    let summary = SweepSummary::from_records(config.robots as u64, run_trials(&config, arena, &seeds)?)?;
    let end = config.max_steps + 1;
    let before = summary.at(scatter_step).unwrap_or(f64::NAN);
    let after = summary
        .steps
        .iter()
        .position(|s| *s > scatter_step)
        .map_or(f64::NAN, |k| summary.mean[k]);
    Ok(PerturbationStudy {
        pre_plateau: summary.plateau(scatter_step + 1 - window, scatter_step + 1),
        post_plateau: summary.plateau(end - window, end),
        before,
        after,
        scatter_step,
        window,
        summary,
    })
}
