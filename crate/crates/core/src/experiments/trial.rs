//! A single seeded trial: spawn, then sense, decide and step each tick.

use super::metrics::{goal_coverage, proportion_in_goal};
use crate::controller::{decide, ControllerParams, ControllerState, Decision};
use crate::distance::{goal_distance_map, GoalDistanceMap};
use crate::error::{param, Result};
use crate::field::{FieldSpec, SampleMode, ScalarField};
use crate::sensors::{make_field_sensor, sense, FieldSensor, SensorGeometry, SensorSnapshot};
use crate::world::{scatter_pucks, spawn_random_where, Action, World, WorldConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use std::time::Instant;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrialConfig {
    pub field: FieldSpec,
    pub sample_mode: SampleMode,
    pub robots: usize,
    pub pucks: usize,
    pub max_steps: u64,
    pub sample_interval: u64,
    pub dt: f64,
    /// Field-sensing strategy name: `ideal` or `queued`.
    pub sensing: String,
    pub world: WorldConfig,
    pub sensors: SensorGeometry,
    pub controller: ControllerParams,
    /// Scatter every puck at this step (perturbation trials).
    pub scatter_step: Option<u64>,
    /// Spawn robots with their whole body off the goal region. A robot whose
    /// left sensor starts on the goal only ever turns left and circles there.
    pub robots_off_goal: bool,
}

impl Default for TrialConfig {
    fn default() -> Self {
        TrialConfig {
            field: FieldSpec::default(),
            sample_mode: SampleMode::default(),
            robots: 4,
            pucks: 40,
            max_steps: 20000,
            sample_interval: 10,
            dt: 1.0,
            sensing: "ideal".into(),
            world: WorldConfig::default(),
            sensors: SensorGeometry::default(),
            controller: ControllerParams::default(),
            scatter_step: None,
            robots_off_goal: true,
        }
    }
}

impl TrialConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_steps == 0 {
            return Err(param("max_steps", "must be > 0"));
        }
        if self.sample_interval == 0 {
            return Err(param("sample_interval", "must be > 0"));
        }
        if !(self.dt > 0.0) {
            return Err(param("dt", "must be > 0"));
        }
        if let Some(s) = self.scatter_step {
            if s >= self.max_steps {
                return Err(param("scatter_step", "must be < max_steps"));
            }
        }
        self.world.validate()?;
        self.sensors.validate(self.world.robot_radius)?;
        self.controller.validate()?;
        make_field_sensor(&self.sensing, &self.sensors).map_err(|e| param("sensing", e.to_string()))?;
        Ok(())
    }
}

/// The immutable inputs shared by every trial on one field.
#[derive(Debug, Clone)]
pub struct Arena {
    pub field: Arc<ScalarField>,
    pub dmap: Arc<GoalDistanceMap>,
}

impl Arena {
    pub fn new(field: ScalarField) -> Result<Self> {
        let dmap = goal_distance_map(&field)?;
        Ok(Arena {
            field: Arc::new(field),
            dmap: Arc::new(dmap),
        })
    }

    pub fn from_config(config: &TrialConfig) -> Result<Self> {
        Arena::new(config.field.build()?.with_sample_mode(config.sample_mode))
    }
}

/// Hooks for tracing and frame dumps.
pub trait TrialObserver {
    fn on_decision(&mut self, _step: u64, _robot: u32, _snapshot: &SensorSnapshot, _decision: &Decision) {}
    fn on_step(&mut self, _world: &World) -> Result<()> {
        Ok(())
    }
}

impl TrialObserver for () {}

/// A running trial.
pub struct Simulation {
    pub world: World,
    pub config: TrialConfig,
    arena: Arena,
    states: Vec<ControllerState>,
    field_sensors: Vec<Box<dyn FieldSensor>>,
    rng: ChaCha8Rng,
    actions: Vec<Action>,
}

impl Simulation {
    pub fn new(config: &TrialConfig, arena: &Arena, seed: u64) -> Result<Self> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let clearance = config.world.robot_radius;
        let off_goal = |p| !config.robots_off_goal || arena.dmap.at_point(p) > clearance;
        let world = spawn_random_where(
            arena.field.extent(),
            &config.world,
            config.robots,
            config.pucks,
            &mut rng,
            &off_goal,
        )?;
        Self::with_world(config, arena, world, rng)
    }

    /// Start from an explicit world instead of a random spawn.
    pub fn with_world(config: &TrialConfig, arena: &Arena, mut world: World, rng: ChaCha8Rng) -> Result<Self> {
        world.collision_iterations = config.world.collision_iterations;
        world.puck_wall_clearance = config.world.wall_clearance();
        let n = world.robots.len();
        let field_sensors = (0..n)
            .map(|_| make_field_sensor(&config.sensing, &config.sensors))
            .collect::<Result<Vec<_>>>()?;
        Ok(Simulation {
            states: vec![ControllerState::new(&config.controller); n],
            field_sensors,
            actions: vec![Action::STOP; n],
            world,
            config: config.clone(),
            arena: arena.clone(),
            rng,
        })
    }

    pub fn arena(&self) -> &Arena {
        &self.arena
    }

    pub fn proportion_in_goal(&self) -> f64 {
        proportion_in_goal(&self.world, &self.arena.dmap)
    }

    pub fn goal_coverage(&self) -> f64 {
        goal_coverage(&self.world, &self.arena.field)
    }

    pub fn scatter(&mut self) -> Result<()> {
        scatter_pucks(&mut self.world, self.config.world.margin(), &mut self.rng)
    }

    /// One tick: read every robot's sensors against the same world state,
    /// decide, then move everything at once.
    pub fn step(&mut self, observer: &mut dyn TrialObserver) {
        let step = self.world.step_count;
        for i in 0..self.world.robots.len() {
            let snap = sense(
                i,
                &self.world.robots,
                &self.world.pucks,
                &self.arena.field,
                &self.config.sensors,
                self.field_sensors[i].as_mut(),
            );
            let d = decide(&snap, &self.config.controller, &mut self.states[i], &mut self.rng);
            observer.on_decision(step, self.world.robots[i].id, &snap, &d);
            self.actions[i] = d.action;
        }
        self.world.step(&self.actions, self.config.dt);
    }
}

/// Outcome of one trial.
#[derive(Debug, Clone, PartialEq)]
pub struct TrialRecord {
    pub seed: u64,
    pub robots: usize,
    /// (step, proportion in goal), sampled every `sample_interval` steps
    /// starting at step 0 and always including the final step.
    pub series: Vec<(u64, f64)>,
    pub final_proportion: f64,
    pub final_coverage: f64,
    pub wall_time_secs: f64,
}

impl TrialRecord {
    /// First sampled step at which the proportion reaches `threshold`.
    pub fn time_to(&self, threshold: f64) -> Option<u64> {
        self.series.iter().find(|(_, p)| *p >= threshold).map(|(s, _)| *s)
    }

    /// Mean proportion over samples with step in `[from, to)`.
    pub fn plateau(&self, from: u64, to: u64) -> f64 {
        let xs: Vec<f64> = self
            .series
            .iter()
            .filter(|(s, _)| (from..to).contains(s))
            .map(|(_, p)| *p)
            .collect();
        super::stats::mean(&xs)
    }
}

pub fn run_trial(config: &TrialConfig, arena: &Arena, seed: u64) -> Result<TrialRecord> {
    run_trial_observed(config, arena, seed, &mut ())
}

pub fn run_trial_observed(
    config: &TrialConfig,
    arena: &Arena,
    seed: u64,
    observer: &mut dyn TrialObserver,
) -> Result<TrialRecord> {
    run_trial_with_world(config, arena, seed, observer).map(|(record, _)| record)
}

/// As [`run_trial_observed`], also handing back the final world.
pub fn run_trial_with_world(
    config: &TrialConfig,
    arena: &Arena,
    seed: u64,
    observer: &mut dyn TrialObserver,
) -> Result<(TrialRecord, World)> {
    let started = Instant::now();
    let mut sim = Simulation::new(config, arena, seed)?;
    let mut series = vec![(0, sim.proportion_in_goal())];
    observer.on_step(&sim.world)?;
    for step in 0..config.max_steps {
        if config.scatter_step == Some(step) {
            sim.scatter()?;
        }
        sim.step(observer);
        observer.on_step(&sim.world)?;
        let now = step + 1;
        if now % config.sample_interval == 0 || now == config.max_steps {
            series.push((now, sim.proportion_in_goal()));
        }
    }
    let record = TrialRecord {
        seed,
        robots: config.robots,
        final_proportion: series.last().map_or(0.0, |s| s.1),
        final_coverage: sim.goal_coverage(),
        series,
        wall_time_secs: started.elapsed().as_secs_f64(),
    };
    Ok((record, sim.world))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn robots_on_goal(config: &TrialConfig, arena: &Arena, seeds: u64) -> usize {
        (0..seeds)
            .map(|s| {
                let sim = Simulation::new(config, arena, s).unwrap();
                sim.world
                    .robots
                    .iter()
                    .filter(|r| arena.dmap.at_point(r.position) <= r.radius)
                    .count()
            })
            .sum()
    }

    #[test]
    fn robots_spawn_off_goal_unless_disabled() {
        let config = TrialConfig {
            robots: 8,
            ..TrialConfig::default()
        };
        let arena = Arena::from_config(&config).unwrap();
        assert_eq!(robots_on_goal(&config, &arena, 100), 0);
        let uniform = TrialConfig {
            robots_off_goal: false,
            ..config
        };
        assert!(robots_on_goal(&uniform, &arena, 100) > 0);
    }

    #[test]
    fn sample_series_covers_both_ends() {
        let config = TrialConfig {
            robots: 1,
            max_steps: 95,
            ..TrialConfig::default()
        };
        let arena = Arena::from_config(&config).unwrap();
        let rec = run_trial(&config, &arena, 4).unwrap();
        let steps: Vec<u64> = rec.series.iter().map(|s| s.0).collect();
        assert_eq!(steps.first(), Some(&0));
        assert_eq!(steps.last(), Some(&95));
        assert_eq!(rec.final_proportion, rec.series.last().unwrap().1);
    }
}
