//! Puck-sensing radius study on a shape with a concavity.

use super::stats::mean;
use super::sweep::{group_seeds, run_trials};
use super::trial::{run_trial_with_world, Arena, TrialConfig, TrialRecord};
use crate::error::{param, Result};
use crate::world::World;

/// All trials at one sensing radius.
#[derive(Debug, Clone, PartialEq)]
pub struct AblationRow {
    pub radius: f64,
    pub records: Vec<TrialRecord>,
    pub mean_proportion: f64,
    pub mean_coverage: f64,
}

/// The config with its puck-sensing radius replaced. The robot-sensing
/// circle is the smaller of the two, so it shrinks along with it.
pub fn with_puck_radius(config: &TrialConfig, radius: f64) -> TrialConfig {
    let mut c = config.clone();
    c.sensors.puck_fov_radius = radius;
    c.sensors.robot_fov_radius = c.sensors.robot_fov_radius.min(radius);
    c
}

/// Every radius uses the same seeds, so the rows differ only by radius.
pub fn radius_ablation(
    config: &TrialConfig,
    arena: &Arena,
    radii: &[f64],
    trials: usize,
    master: u64,
) -> Result<Vec<AblationRow>> {
    if trials == 0 {
        return Err(param("ablate.trials", "must be >= 1"));
    }
    let seeds = group_seeds(master, "ablate", 0, trials);
    radii
        .iter()
        .map(|&radius| {
            if !(radius > 0.0) {
                return Err(param("ablate.radii", "every radius must be > 0"));
            }
            let records = run_trials(&with_puck_radius(config, radius), arena, &seeds)?;
            Ok(AblationRow {
                radius,
                mean_proportion: mean(&records.iter().map(|r| r.final_proportion).collect::<Vec<_>>()),
                mean_coverage: mean(&records.iter().map(|r| r.final_coverage).collect::<Vec<_>>()),
                records,
            })
        })
        .collect()
}

/// Final world of the first ablation trial at `radius`, for rendering.
pub fn ablation_final_world(config: &TrialConfig, arena: &Arena, radius: f64, master: u64) -> Result<World> {
    let seed = group_seeds(master, "ablate", 0, 1)[0];
    run_trial_with_world(&with_puck_radius(config, radius), arena, seed, &mut ()).map(|(_, w)| w)
}
