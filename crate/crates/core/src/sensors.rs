//! Per-robot sensing: three field readings plus left/right detections.
//!
//! Field readings come from a [`FieldSensor`] strategy. `ideal` samples the
//! field at a body-frame triangle of points. `queued` emulates a co-linear
//! four-element array whose outer readings are delayed through fixed-length
//! queues so they stand in for sensors mounted further back.

use crate::error::{param, Error, Result};
use crate::field::ScalarField;
use crate::geom::Vec2;
use crate::world::{PuckBody, RobotBody};
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::f64::consts::FRAC_PI_2;

/// Everything the controller sees on one step.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SensorSnapshot {
    pub l: f64,
    pub c: f64,
    pub r: f64,
    pub left_puck: bool,
    pub left_robot: bool,
    pub right_robot: bool,
}

/// Left, centre and right field values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FieldReading {
    pub l: f64,
    pub c: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorGeometry {
    /// Body-frame sample points for the `ideal` triangle.
    pub left: Vec2,
    pub centre: Vec2,
    pub right: Vec2,
    /// Body-frame points of the co-linear array used by `queued`: the outer
    /// pair (left, right) and the inner pair that is averaged into C.
    pub array_outer_left: Vec2,
    pub array_outer_right: Vec2,
    pub array_inner_left: Vec2,
    pub array_inner_right: Vec2,
    pub puck_fov_radius: f64,
    pub robot_fov_radius: f64,
    /// Half-width of the camera's angular range about the heading.
    pub camera_half_angle: f64,
    pub queue_len: usize,
    /// Count a puck on a side when any part of its disc, rather than its
    /// centre, lies there (the camera's block-straddle rule).
    pub puck_by_extent: bool,
}

impl Default for SensorGeometry {
    fn default() -> Self {
        SensorGeometry::for_radius(18.0)
    }
}

impl SensorGeometry {
    pub fn for_radius(radius: f64) -> Self {
        SensorGeometry {
            left: Vec2::new(0.4 * radius, 0.6 * radius),
            centre: Vec2::new(radius, 0.0),
            right: Vec2::new(0.4 * radius, -0.6 * radius),
            array_outer_left: Vec2::new(radius, 0.6 * radius),
            array_outer_right: Vec2::new(radius, -0.6 * radius),
            array_inner_left: Vec2::new(radius, 0.2 * radius),
            array_inner_right: Vec2::new(radius, -0.2 * radius),
            puck_fov_radius: 420.0,
            robot_fov_radius: 150.0,
            camera_half_angle: FRAC_PI_2,
            queue_len: 8,
            puck_by_extent: true,
        }
    }

    pub fn validate(&self, robot_radius: f64) -> Result<()> {
        if !(self.puck_fov_radius > 0.0) {
            return Err(param("sensors.puck_fov_radius", "must be > 0"));
        }
        if !(self.robot_fov_radius > 0.0 && self.robot_fov_radius <= self.puck_fov_radius) {
            return Err(param(
                "sensors.robot_fov_radius",
                "must be > 0 and <= sensors.puck_fov_radius",
            ));
        }
        if !(self.camera_half_angle > 0.0 && self.camera_half_angle <= std::f64::consts::PI) {
            return Err(param("sensors.camera_half_angle", "must lie in (0, pi]"));
        }
        if self.queue_len == 0 {
            return Err(param("sensors.queue_len", "must be >= 1"));
        }
        let limit = 2.0 * robot_radius;
        let offsets = [
            ("left", self.left),
            ("centre", self.centre),
            ("right", self.right),
            ("array_outer_left", self.array_outer_left),
            ("array_outer_right", self.array_outer_right),
            ("array_inner_left", self.array_inner_left),
            ("array_inner_right", self.array_inner_right),
        ];
        for (name, o) in offsets {
            if !(o.norm() <= limit) {
                return Err(param(
                    &format!("sensors.{name}"),
                    format!("offset must lie within {limit} of the robot centre"),
                ));
            }
        }
        Ok(())
    }
}

fn world_point(robot: &RobotBody, offset: Vec2) -> Vec2 {
    robot.position + offset.rotate(robot.heading)
}

/// Sample the field at the three triangle offsets.
pub fn read_field_triangle(robot: &RobotBody, field: &ScalarField, g: &SensorGeometry) -> FieldReading {
    FieldReading {
        l: field.sample(world_point(robot, g.left)),
        c: field.sample(world_point(robot, g.centre)),
        r: field.sample(world_point(robot, g.right)),
    }
}

/// Delay lines for the outer array elements.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorQueueState {
    left: VecDeque<f64>,
    right: VecDeque<f64>,
    queue_len: usize,
}

impl SensorQueueState {
    pub fn new(queue_len: usize) -> Self {
        SensorQueueState {
            left: VecDeque::with_capacity(queue_len + 1),
            right: VecDeque::with_capacity(queue_len + 1),
            queue_len,
        }
    }

    pub fn is_primed(&self) -> bool {
        self.left.len() >= self.queue_len
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    /// Push the current outer samples; returns the delayed pair.
    fn push(&mut self, l: f64, r: f64) -> (f64, f64) {
        self.left.push_back(l);
        self.right.push_back(r);
        if self.left.len() > self.queue_len {
            let dl = self.left.pop_front().unwrap_or(l);
            let dr = self.right.pop_front().unwrap_or(r);
            (dl, dr)
        } else {
            (l, r)
        }
    }
}

/// Instantaneous co-linear array readings: (outer left, inner mean, outer right).
pub fn read_array(robot: &RobotBody, field: &ScalarField, g: &SensorGeometry) -> FieldReading {
    let inner_l = field.sample(world_point(robot, g.array_inner_left));
    let inner_r = field.sample(world_point(robot, g.array_inner_right));
    FieldReading {
        l: field.sample(world_point(robot, g.array_outer_left)),
        c: 0.5 * (inner_l + inner_r),
        r: field.sample(world_point(robot, g.array_outer_right)),
    }
}

/// Read the array, pushing the outer samples and returning the values that
/// entered the queues `queue_len` reads ago (current values until primed).
pub fn read_field_queued(
    robot: &RobotBody,
    field: &ScalarField,
    g: &SensorGeometry,
    state: &mut SensorQueueState,
) -> FieldReading {
    let now = read_array(robot, field, g);
    let (l, r) = state.push(now.l, now.r);
    FieldReading { l, c: now.c, r }
}

/// Strategy producing the three field readings for one robot.
pub trait FieldSensor: Send {
    fn name(&self) -> &'static str;
    fn read(&mut self, robot: &RobotBody, field: &ScalarField, geometry: &SensorGeometry) -> FieldReading;
}

#[derive(Debug, Default, Clone)]
pub struct TriangleSensor;

impl FieldSensor for TriangleSensor {
    fn name(&self) -> &'static str {
        "ideal"
    }

    fn read(&mut self, robot: &RobotBody, field: &ScalarField, geometry: &SensorGeometry) -> FieldReading {
        read_field_triangle(robot, field, geometry)
    }
}

#[derive(Debug, Clone)]
pub struct QueuedArraySensor {
    state: SensorQueueState,
}

impl QueuedArraySensor {
    pub fn new(queue_len: usize) -> Self {
        QueuedArraySensor {
            state: SensorQueueState::new(queue_len),
        }
    }
}

impl FieldSensor for QueuedArraySensor {
    fn name(&self) -> &'static str {
        "queued"
    }

    fn read(&mut self, robot: &RobotBody, field: &ScalarField, geometry: &SensorGeometry) -> FieldReading {
        read_field_queued(robot, field, geometry, &mut self.state)
    }
}

type SensorCtor = fn(&SensorGeometry) -> Box<dyn FieldSensor>;

/// Named field-sensing strategies.
pub const FIELD_SENSORS: &[(&str, SensorCtor)] = &[
    ("ideal", |_| Box::new(TriangleSensor)),
    ("queued", |g| Box::new(QueuedArraySensor::new(g.queue_len))),
];

/// Instantiate a field sensor by registry name (one per robot).
pub fn make_field_sensor(name: &str, geometry: &SensorGeometry) -> Result<Box<dyn FieldSensor>> {
    FIELD_SENSORS
        .iter()
        .find(|(n, _)| *n == name)
        .map(|(_, ctor)| ctor(geometry))
        .ok_or_else(|| Error::UnknownStrategy {
            kind: "sensing mode",
            name: name.to_string(),
            expected: FIELD_SENSORS.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", "),
        })
}

fn in_camera(robot: &RobotBody, rel: Vec2, g: &SensorGeometry) -> bool {
    let h = Vec2::from_angle(robot.heading);
    h.cross(rel).atan2(h.dot(rel)).abs() <= g.camera_half_angle
}

/// (left, right) puck detections by centre position. Only the left flag
/// feeds the controller.
pub fn detect_pucks(robot: &RobotBody, pucks: &[PuckBody], g: &SensorGeometry) -> (bool, bool) {
    let h = Vec2::from_angle(robot.heading);
    let r2 = g.puck_fov_radius * g.puck_fov_radius;
    let (mut left, mut right) = (false, false);
    for p in pucks {
        let rel = p.position - robot.position;
        if rel.norm_sq() > r2 || !in_camera(robot, rel, g) {
            continue;
        }
        let side = h.cross(rel);
        let pad = if g.puck_by_extent { p.radius } else { 0.0 };
        left |= side + pad > 0.0;
        right |= side - pad < 0.0;
        if left && right {
            break;
        }
    }
    (left, right)
}

pub fn detect_pucks_left(robot: &RobotBody, pucks: &[PuckBody], g: &SensorGeometry) -> bool {
    detect_pucks(robot, pucks, g).0
}

/// (leftRobot, rightRobot) for robot `me`. A peer whose disc crosses the
/// heading axis counts on both sides.
pub fn detect_robots(me: usize, robots: &[RobotBody], g: &SensorGeometry) -> (bool, bool) {
    let robot = &robots[me];
    let h = Vec2::from_angle(robot.heading);
    let r2 = g.robot_fov_radius * g.robot_fov_radius;
    let (mut left, mut right) = (false, false);
    for (i, peer) in robots.iter().enumerate() {
        if i == me {
            continue;
        }
        let rel = peer.position - robot.position;
        if rel.norm_sq() > r2 || !in_camera(robot, rel, g) {
            continue;
        }
        let side = h.cross(rel);
        left |= side + peer.radius > 0.0;
        right |= side - peer.radius < 0.0;
    }
    (left, right)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BlockSide {
    Left,
    Right,
    Both,
}

/// Which half of a `width`-pixel image a camera block of centre `bx` and
/// width `bw` occupies.
pub fn classify_block_side(bx: f64, bw: f64, width: f64) -> BlockSide {
    let half = width / 2.0;
    let left = bx - bw / 2.0 < half;
    let right = bx + bw / 2.0 > half;
    match (left, right) {
        (true, true) => BlockSide::Both,
        (true, false) => BlockSide::Left,
        _ => BlockSide::Right,
    }
}

/// Assemble the snapshot for robot `me`.
pub fn sense(
    me: usize,
    robots: &[RobotBody],
    pucks: &[PuckBody],
    field: &ScalarField,
    g: &SensorGeometry,
    field_sensor: &mut dyn FieldSensor,
) -> SensorSnapshot {
    let robot = &robots[me];
    let FieldReading { l, c, r } = field_sensor.read(robot, field, g);
    let (left_robot, right_robot) = detect_robots(me, robots, g);
    SensorSnapshot {
        l,
        c,
        r,
        left_puck: detect_pucks_left(robot, pucks, g),
        left_robot,
        right_robot,
    }
}
