//! Flow of a lone robot over the field, with no pucks and no other robots.

use super::seed::trial_seed;
use super::trial::{Arena, Simulation, TrialConfig};
use crate::error::{param, Result};
use crate::field::ScalarField;
use crate::geom::{wrap_angle, Vec2};
use crate::world::{RobotBody, World};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::TAU;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FlowSettings {
    /// Distance between grid points, world units.
    pub spacing: f64,
    /// Rollout length K; the first K/2 steps are discarded.
    pub steps: u64,
    /// Number of evenly spaced initial headings averaged per point.
    pub headings: usize,
}

impl Default for FlowSettings {
    fn default() -> Self {
        FlowSettings {
            spacing: 50.0,
            steps: 40,
            headings: 8,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlowVector {
    pub point: Vec2,
    pub displacement: Vec2,
}

/// Grid points `spacing/2 + k·spacing` that keep a robot off the walls.
pub fn flow_grid(extent: Vec2, spacing: f64, robot_radius: f64) -> Vec<Vec2> {
    let axis = |len: f64| -> Vec<f64> {
        (0..)
            .map(|k| spacing * (k as f64 + 0.5))
            .take_while(|&x| x < len)
            .filter(|&x| x >= robot_radius && x <= len - robot_radius)
            .collect()
    };
    let xs = axis(extent.x);
    let ys = axis(extent.y);
    ys.iter().flat_map(|&y| xs.iter().map(move |&x| Vec2::new(x, y))).collect()
}

/// Displacement from step K/2 to step K of one rollout.
fn rollout(config: &TrialConfig, arena: &Arena, start: Vec2, heading: f64, steps: u64, seed: u64) -> Result<Vec2> {
    let mut world = World::new(arena.field.extent().x, arena.field.extent().y);
    world.robots.push(RobotBody {
        id: 0,
        position: start,
        heading: wrap_angle(heading),
        radius: config.world.robot_radius,
    });
    let mut sim = Simulation::with_world(config, arena, world, ChaCha8Rng::seed_from_u64(seed))?;
    let burn_in = steps / 2;
    for _ in 0..burn_in {
        sim.step(&mut ());
    }
    let from = sim.world.robots[0].position;
    for _ in burn_in..steps {
        sim.step(&mut ());
    }
    Ok(sim.world.robots[0].position - from)
}

/// Mean post-burn-in displacement at every grid point. The seed depends
/// only on the heading index, so every point sees the same random stream.
pub fn flow_field(config: &TrialConfig, arena: &Arena, settings: &FlowSettings, master: u64) -> Result<Vec<FlowVector>> {
    if settings.steps == 0 {
        return Err(param("flow.steps", "must be >= 1"));
    }
    if settings.headings == 0 {
        return Err(param("flow.headings", "must be >= 1"));
    }
    if !(settings.spacing > 0.0) {
        return Err(param("flow.spacing", "must be > 0"));
    }
    config.validate()?;
    let points = flow_grid(arena.field.extent(), settings.spacing, config.world.robot_radius);
    points
        .par_iter()
        .map(|&p| {
            let mut sum = Vec2::ZERO;
            for h in 0..settings.headings {
                let heading = TAU * h as f64 / settings.headings as f64;
                let seed = trial_seed(master, "flow", 0, h as u64);
                sum = sum + rollout(config, arena, p, heading, settings.steps, seed)?;
            }
            Ok(FlowVector {
                point: p,
                displacement: sum * (1.0 / settings.headings as f64),
            })
        })
        .collect()
}

/// Centroid of the goal cells.
pub fn goal_centroid(field: &ScalarField) -> Option<Vec2> {
    let mut sum = Vec2::ZERO;
    let mut n = 0usize;
    for (ix, iy) in field.goal_cells() {
        sum = sum + field.cell_centre(ix, iy);
        n += 1;
    }
    (n > 0).then(|| sum * (1.0 / n as f64))
}

/// Net tangential sense of the flow about `centre`: the mean of
/// `r̂ × v` over all vectors. Positive is counter-clockwise, negative
/// clockwise.
pub fn circulation(vectors: &[FlowVector], centre: Vec2) -> f64 {
    let terms: Vec<f64> = vectors
        .iter()
        .filter_map(|v| {
            let r = v.point - centre;
            let n = r.norm();
            (n > 0.0).then(|| r.cross(v.displacement) / n)
        })
        .collect();
    super::stats::mean(&terms)
}
