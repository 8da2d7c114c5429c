//! Stuck detection in full simulations: a wedged robot starts its reverse
//! manoeuvre promptly, a free-running one never does.

use oc2_core::controller::{decide, Branch, ControllerParams, ControllerState, Decision};
use oc2_core::experiments::{Arena, Simulation, TrialConfig, TrialObserver};
use oc2_core::geom::Vec2;
use oc2_core::sensors::{make_field_sensor, sense, SensorSnapshot};
use oc2_core::world::{Action, RobotBody, World};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

#[derive(Default)]
struct Branches(Vec<Branch>);

impl TrialObserver for Branches {
    fn on_decision(&mut self, _step: u64, _robot: u32, _s: &SensorSnapshot, d: &Decision) {
        self.0.push(d.branch);
    }
}

/// Drive robot 0 with the controller while robot 1 has stalled. Robot 0
/// starts beside the bottom wall, angled down and towards robot 1, which
/// sits in the bottom-left corner. Returns per step whether robot 0 moved
/// and which branch it took.
fn stalled_neighbour_trial(steps: usize) -> Vec<(bool, Branch)> {
    let config = TrialConfig::default();
    let arena = Arena::from_config(&config).unwrap();
    let r = config.world.robot_radius;
    let mut world = World::new(800.0, 800.0);
    world.puck_wall_clearance = config.world.wall_clearance();
    for (id, x, heading) in [(0, 3.0 * r + 0.5, -0.5 * PI - 0.2), (1, r, 0.0)] {
        world.robots.push(RobotBody {
            id,
            position: Vec2::new(x, r),
            heading,
            radius: r,
        });
    }
    let mut state = ControllerState::new(&config.controller);
    let mut sensor = make_field_sensor(&config.sensing, &config.sensors).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut out = Vec::with_capacity(steps);
    for _ in 0..steps {
        let s = sense(0, &world.robots, &world.pucks, &arena.field, &config.sensors, sensor.as_mut());
        let d = decide(&s, &config.controller, &mut state, &mut rng);
        let before = world.robots[0].position;
        world.step(&[d.action, Action::STOP], config.dt);
        assert!(world.max_overlap() <= 1e-6);
        // at rest: well under the slowest commanded speed
        out.push(((world.robots[0].position - before).norm() > 1e-3, d.branch));
    }
    out
}

#[test]
fn wedged_robot_starts_recovery_within_the_window() {
    let window = ControllerParams::default().stuck_window;
    let trace = stalled_neighbour_trial(600);
    let first_recovery = trace.iter().position(|t| t.1 == Branch::Recovery).expect("recovery never started");
    // last step on which the robot still moved before recovery began
    let last_move = trace[..first_recovery].iter().rposition(|t| t.0).expect("robot never moved");
    let stopped = last_move + 1;
    assert!(stopped < first_recovery, "robot still moving when recovery began");
    assert!(
        first_recovery <= stopped + window + 1,
        "stopped at {stopped}, recovery at {first_recovery}"
    );
    // during the wedge it was pushing forward, not turning on the spot
    assert!(trace[stopped..first_recovery].iter().all(|t| t.1 == Branch::SlowForward));
    // recovery reverses out of the wedge
    assert!(trace[first_recovery..first_recovery + 5].iter().all(|t| t.0 && t.1 == Branch::Recovery));
}

#[test]
fn free_orbit_never_triggers_recovery() {
    let config = TrialConfig {
        robots: 1,
        pucks: 0,
        ..TrialConfig::default()
    };
    let arena = Arena::from_config(&config).unwrap();
    for seed in 0..5 {
        let mut sim = Simulation::new(&config, &arena, seed).unwrap();
        let mut seen = Branches::default();
        for _ in 0..5000 {
            sim.step(&mut seen);
        }
        let n = seen.0.iter().filter(|b| **b == Branch::Recovery).count();
        assert_eq!(n, 0, "seed {seed}: {n} recovery steps");
    }
}
