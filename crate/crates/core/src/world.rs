//! Circle-only planar physics: unicycle robots, passive pucks, walls.

use crate::error::{param, Error, Result};
use crate::geom::{wrap_angle, Vec2};
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Largest overlap depth tolerated after collision resolution.
pub const OVERLAP_TOLERANCE: f64 = 1e-6;

/// Rejection-sampling bound per body in [`spawn_random`].
pub const SPAWN_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotBody {
    pub id: u32,
    pub position: Vec2,
    /// Radians in [-pi, pi), counter-clockwise from +x.
    pub heading: f64,
    pub radius: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PuckBody {
    pub id: u32,
    pub position: Vec2,
    pub radius: f64,
}

/// Forward speed (world units per step) and angular speed (radians per
/// step, positive turns left).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Action {
    pub v: f64,
    pub omega: f64,
}

impl Action {
    pub const STOP: Action = Action { v: 0.0, omega: 0.0 };

    pub const fn new(v: f64, omega: f64) -> Self {
        Action { v, omega }
    }
}

/// Body sizes and solver settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorldConfig {
    pub robot_radius: f64,
    pub puck_radius: f64,
    /// Clearance kept from the walls when scattering bodies. Defaults to one
    /// robot diameter.
    pub spawn_margin: Option<f64>,
    /// Upper bound on relaxation sweeps per step.
    pub collision_iterations: usize,
    /// Extra gap kept between pucks and the walls, so a robot can always
    /// get behind a puck that was pushed to the edge. Defaults to one robot
    /// radius.
    pub puck_wall_clearance: Option<f64>,
}

impl Default for WorldConfig {
    fn default() -> Self {
        WorldConfig {
            robot_radius: 18.0,
            puck_radius: 12.0,
            spawn_margin: None,
            collision_iterations: 64,
            puck_wall_clearance: None,
        }
    }
}

impl WorldConfig {
    pub fn margin(&self) -> f64 {
        self.spawn_margin.unwrap_or(2.0 * self.robot_radius)
    }

    pub fn wall_clearance(&self) -> f64 {
        self.puck_wall_clearance.unwrap_or(self.robot_radius)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.robot_radius > 0.0) {
            return Err(param("world.robot_radius", "must be > 0"));
        }
        if !(self.puck_radius > 0.0) {
            return Err(param("world.puck_radius", "must be > 0"));
        }
        if !(self.margin() >= 0.0) {
            return Err(param("world.spawn_margin", "must be >= 0"));
        }
        if self.collision_iterations == 0 {
            return Err(param("world.collision_iterations", "must be >= 1"));
        }
        if !(self.wall_clearance() >= 0.0 && self.wall_clearance() <= self.margin()) {
            return Err(param(
                "world.puck_wall_clearance",
                "must be >= 0 and <= world.spawn_margin",
            ));
        }
        Ok(())
    }
}

/// The mutable simulation state.
#[derive(Debug, Clone, PartialEq)]
pub struct World {
    pub width: f64,
    pub height: f64,
    pub robots: Vec<RobotBody>,
    pub pucks: Vec<PuckBody>,
    pub step_count: u64,
    pub collision_iterations: usize,
    /// See [`WorldConfig::puck_wall_clearance`].
    pub puck_wall_clearance: f64,
}

/// Advance a unicycle pose: rotate first, then translate along the new heading.
pub fn integrate_unicycle(pose: RobotBody, a: Action, dt: f64) -> RobotBody {
    debug_assert!(dt > 0.0);
    let heading = wrap_angle(pose.heading + a.omega * dt);
    RobotBody {
        heading,
        position: pose.position + Vec2::from_angle(heading) * (a.v * dt),
        ..pose
    }
}

/// Bodies closer than this count as touching when tracing push chains.
const CONTACT_SLOP: f64 = 1e-6;

/// Penetration depth of two discs (negative when apart).
fn overlap_depth(a: Vec2, ra: f64, b: Vec2, rb: f64) -> f64 {
    let rsum = ra + rb;
    let delta = a - b;
    if delta.x.abs() >= rsum + CONTACT_SLOP || delta.y.abs() >= rsum + CONTACT_SLOP {
        return -CONTACT_SLOP - 1.0;
    }
    rsum - delta.norm()
}

/// Separation axis (pointing from `b` to `a`) and depth of an overlapping pair.
fn contact(a: Vec2, ra: f64, b: Vec2, rb: f64) -> Option<(Vec2, f64)> {
    let rsum = ra + rb;
    let delta = a - b;
    if delta.x.abs() >= rsum || delta.y.abs() >= rsum {
        return None;
    }
    let d = delta.norm();
    let pen = rsum - d;
    (pen > 0.0).then(|| (separation_axis(a, b, d), pen))
}

/// Unit vector from `b` to `a`, or +x when the centres coincide.
fn separation_axis(a: Vec2, b: Vec2, d: f64) -> Vec2 {
    if d > 0.0 {
        (a - b) * (1.0 / d)
    } else {
        Vec2::new(1.0, 0.0)
    }
}

impl World {
    pub fn new(width: f64, height: f64) -> Self {
        World {
            width,
            height,
            robots: Vec::new(),
            pucks: Vec::new(),
            step_count: 0,
            collision_iterations: WorldConfig::default().collision_iterations,
            puck_wall_clearance: 0.0,
        }
    }

    pub fn extent(&self) -> Vec2 {
        Vec2::new(self.width, self.height)
    }

    /// Integrate every robot, resolve overlaps, clamp to the walls.
    ///
    /// If relaxation cannot remove every overlap within the iteration budget,
    /// the robots involved first yield to the pucks they press on (they are
    /// pushed back and may slide along them), and if that fails too they are
    /// held at their previous positions (their headings still update). Pucks
    /// are rolled back before each retry. A world that started overlap-free
    /// always ends overlap-free.
    ///
    /// # Panics
    /// If `actions.len()` differs from the robot count.
    pub fn step(&mut self, actions: &[Action], dt: f64) {
        assert_eq!(
            actions.len(),
            self.robots.len(),
            "one action per robot is required"
        );
        let prev_robots: Vec<Vec2> = self.robots.iter().map(|r| r.position).collect();
        let prev_pucks: Vec<Vec2> = self.pucks.iter().map(|p| p.position).collect();
        for (r, a) in self.robots.iter_mut().zip(actions) {
            *r = integrate_unicycle(*r, *a, dt);
        }
        let moved: Vec<Vec2> = self.robots.iter().map(|r| r.position).collect();
        let mut mode = vec![Contact::Push; self.robots.len()];

        loop {
            if self.relax(&mode) {
                break;
            }
            let mut changed = escalate(&mut mode, self.overlapping_robots());
            if !changed {
                // only pucks remain in conflict: escalate the robots pressing on them
                changed = escalate(&mut mode, self.robots_behind_conflicts());
            }
            if !changed {
                mode.iter_mut().for_each(|m| *m = Contact::Held);
            }
            for (i, r) in self.robots.iter_mut().enumerate() {
                r.position = if mode[i] == Contact::Held { prev_robots[i] } else { moved[i] };
            }
            for (p, &q) in self.pucks.iter_mut().zip(&prev_pucks) {
                p.position = q;
            }
            if mode.iter().all(|&m| m == Contact::Held) {
                self.relax(&mode);
                break;
            }
        }
        self.step_count += 1;
    }

    /// Run relaxation sweeps; returns true once the state is overlap-free.
    fn relax(&mut self, mode: &[Contact]) -> bool {
        for _ in 0..self.collision_iterations {
            let deepest = self.sweep(mode);
            self.clamp_to_walls();
            if deepest <= OVERLAP_TOLERANCE && self.max_overlap() <= OVERLAP_TOLERANCE {
                return true;
            }
        }
        self.max_overlap() <= OVERLAP_TOLERANCE
    }

    /// One Gauss-Seidel sweep over all overlapping pairs. Robot pairs split
    /// the correction and a robot pushes a puck the full depth. Between two
    /// pucks, the one further along the chain of contacts from a robot
    /// yields fully, so a pushed row of pucks moves as a unit; pucks at the
    /// same depth split the correction. Returns the deepest overlap met.
    pub fn resolve_pass(&mut self) -> f64 {
        self.sweep(&vec![Contact::Push; self.robots.len()])
    }

    /// [`World::resolve_pass`] where robots not in [`Contact::Push`] mode
    /// are moved out of pucks instead of moving them.
    fn sweep(&mut self, mode: &[Contact]) -> f64 {
        let mut deepest: f64 = 0.0;
        let nr = self.robots.len();
        for i in 0..nr {
            for j in i + 1..nr {
                let (a, b) = (self.robots[i], self.robots[j]);
                if let Some((n, pen)) = contact(a.position, a.radius, b.position, b.radius) {
                    deepest = deepest.max(pen);
                    self.robots[i].position += n * (0.5 * pen);
                    self.robots[j].position -= n * (0.5 * pen);
                }
            }
        }
        for (r, &m) in self.robots.iter_mut().zip(mode) {
            for p in self.pucks.iter_mut() {
                if let Some((n, pen)) = contact(p.position, p.radius, r.position, r.radius) {
                    deepest = deepest.max(pen);
                    if m == Contact::Push {
                        p.position += n * pen;
                    } else {
                        r.position -= n * pen;
                    }
                }
            }
        }
        let depth = self.push_depths(mode);
        let np = self.pucks.len();
        let mut pairs = Vec::new();
        for i in 0..np {
            for j in i + 1..np {
                let (a, b) = (self.pucks[i], self.pucks[j]);
                if overlap_depth(a.position, a.radius, b.position, b.radius) > 0.0 {
                    pairs.push((depth[i].min(depth[j]), i, j));
                }
            }
        }
        pairs.sort_unstable();
        for (_, i, j) in pairs {
            let (a, b) = (self.pucks[i], self.pucks[j]);
            if let Some((n, pen)) = contact(a.position, a.radius, b.position, b.radius) {
                deepest = deepest.max(pen);
                let (wi, wj) = match depth[i].cmp(&depth[j]) {
                    std::cmp::Ordering::Less => (0.0, 1.0),
                    std::cmp::Ordering::Greater => (1.0, 0.0),
                    std::cmp::Ordering::Equal => (0.5, 0.5),
                };
                self.pucks[i].position += n * (wi * pen);
                self.pucks[j].position -= n * (wj * pen);
            }
        }
        deepest
    }

    /// Contact-graph distance of each puck from the nearest pushing robot:
    /// 1 for pucks touching one, `u32::MAX` for pucks no pushing robot reaches.
    fn push_depths(&self, mode: &[Contact]) -> Vec<u32> {
        let np = self.pucks.len();
        let mut depth = vec![u32::MAX; np];
        let mut frontier = Vec::new();
        for (k, p) in self.pucks.iter().enumerate() {
            if self.robots.iter().zip(mode).any(|(r, &m)| {
                m == Contact::Push && overlap_depth(p.position, p.radius, r.position, r.radius) > -CONTACT_SLOP
            })
            {
                depth[k] = 1;
                frontier.push(k);
            }
        }
        let mut level = 1;
        while !frontier.is_empty() {
            level += 1;
            let mut next = Vec::new();
            for &k in &frontier {
                let a = self.pucks[k];
                for (m, b) in self.pucks.iter().enumerate() {
                    if depth[m] == u32::MAX
                        && overlap_depth(a.position, a.radius, b.position, b.radius) > -CONTACT_SLOP
                    {
                        depth[m] = level;
                        next.push(m);
                    }
                }
            }
            frontier = next;
        }
        depth
    }

    /// Fixed number of relaxation sweeps followed by wall clamping.
    pub fn resolve_collisions(&mut self, iterations: usize) {
        for _ in 0..iterations {
            self.resolve_pass();
        }
        self.clamp_to_walls();
    }

    pub fn clamp_to_walls(&mut self) {
        let (w, h) = (self.width, self.height);
        for r in self.robots.iter_mut() {
            r.position = clamp_inside(r.position, r.radius, w, h);
        }
        let gap = self.puck_wall_clearance;
        for p in self.pucks.iter_mut() {
            p.position = clamp_inside(p.position, p.radius + gap, w, h);
        }
    }

    /// Deepest overlap between any two bodies (0 when none overlap).
    pub fn max_overlap(&self) -> f64 {
        let mut worst: f64 = 0.0;
        self.for_each_overlap(|_, _, pen| worst = worst.max(pen));
        worst
    }

    fn overlapping_robots(&self) -> Vec<usize> {
        let nr = self.robots.len();
        let mut out = Vec::new();
        self.for_each_overlap(|a, b, pen| {
            if pen > OVERLAP_TOLERANCE {
                for k in [a, b] {
                    if k < nr {
                        out.push(k);
                    }
                }
            }
        });
        out.sort_unstable();
        out.dedup();
        out
    }

    /// Robots connected through touching bodies to a remaining overlap.
    fn robots_behind_conflicts(&self) -> Vec<usize> {
        let nr = self.robots.len();
        let n = nr + self.pucks.len();
        let body = |k: usize| {
            if k < nr {
                (self.robots[k].position, self.robots[k].radius)
            } else {
                (self.pucks[k - nr].position, self.pucks[k - nr].radius)
            }
        };
        let mut seen = vec![false; n];
        let mut frontier = Vec::new();
        self.for_each_overlap(|a, b, pen| {
            if pen > OVERLAP_TOLERANCE {
                for k in [a, b] {
                    if !seen[k] {
                        seen[k] = true;
                        frontier.push(k);
                    }
                }
            }
        });
        while let Some(k) = frontier.pop() {
            let (pa, ra) = body(k);
            for m in 0..n {
                if !seen[m] {
                    let (pb, rb) = body(m);
                    if overlap_depth(pa, ra, pb, rb) > -CONTACT_SLOP {
                        seen[m] = true;
                        frontier.push(m);
                    }
                }
            }
        }
        (0..nr).filter(|&k| seen[k]).collect()
    }

    /// Visit overlapping pairs; bodies are indexed robots first, then pucks.
    fn for_each_overlap(&self, mut f: impl FnMut(usize, usize, f64)) {
        let nr = self.robots.len();
        let body = |k: usize| {
            if k < nr {
                (self.robots[k].position, self.robots[k].radius)
            } else {
                (self.pucks[k - nr].position, self.pucks[k - nr].radius)
            }
        };
        let n = nr + self.pucks.len();
        for i in 0..n {
            let (pa, ra) = body(i);
            for j in i + 1..n {
                let (pb, rb) = body(j);
                let rsum = ra + rb;
                let delta = pa - pb;
                if delta.x.abs() >= rsum || delta.y.abs() >= rsum {
                    continue;
                }
                let pen = rsum - delta.norm();
                if pen > 0.0 {
                    f(i, j, pen);
                }
            }
        }
    }

    /// True when every body centre lies within `[radius, extent - radius]`.
    pub fn is_contained(&self) -> bool {
        let ok = |p: Vec2, r: f64| {
            p.x >= r && p.x <= self.width - r && p.y >= r && p.y <= self.height - r
        };
        self.robots.iter().all(|b| ok(b.position, b.radius))
            && self.pucks.iter().all(|b| ok(b.position, b.radius))
    }

    /// Plain-text snapshot: a header line, then one body per line as
    /// `kind id x y heading radius` (pucks report heading 0).
    pub fn snapshot(&self) -> String {
        let mut s = format!(
            "# step {} width {} height {}\n",
            self.step_count, self.width, self.height
        );
        for r in &self.robots {
            let _ = writeln!(
                s,
                "robot {} {} {} {} {}",
                r.id, r.position.x, r.position.y, r.heading, r.radius
            );
        }
        for p in &self.pucks {
            let _ = writeln!(
                s,
                "puck {} {} {} 0 {}",
                p.id, p.position.x, p.position.y, p.radius
            );
        }
        s
    }

    pub fn from_snapshot(text: &str) -> Result<World> {
        let bad = |line: &str| Error::Format(format!("bad snapshot line `{line}`"));
        let mut lines = text.lines();
        let header = lines.next().ok_or_else(|| bad(""))?;
        let h: Vec<&str> = header.split_whitespace().collect();
        if h.len() != 7 || h[0] != "#" || h[1] != "step" || h[3] != "width" || h[5] != "height" {
            return Err(bad(header));
        }
        let num = |s: &str, line: &str| s.parse::<f64>().map_err(|_| bad(line));
        let mut world = World::new(num(h[4], header)?, num(h[6], header)?);
        world.step_count = h[2].parse().map_err(|_| bad(header))?;
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let f: Vec<&str> = line.split_whitespace().collect();
            if f.len() != 6 {
                return Err(bad(line));
            }
            let id = f[1].parse::<u32>().map_err(|_| bad(line))?;
            let position = Vec2::new(num(f[2], line)?, num(f[3], line)?);
            let radius = num(f[5], line)?;
            match f[0] {
                "robot" => world.robots.push(RobotBody {
                    id,
                    position,
                    heading: num(f[4], line)?,
                    radius,
                }),
                "puck" => world.pucks.push(PuckBody { id, position, radius }),
                _ => return Err(bad(line)),
            }
        }
        Ok(world)
    }
}

/// How a robot takes part in collision resolution during a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Contact {
    /// Moves freely and pushes pucks out of its way.
    Push,
    /// Moves, but is pushed back by pucks instead of pushing them.
    Yield,
    /// Kept at its position from the start of the step.
    Held,
}

/// Move each of `robots` one mode further from [`Contact::Push`]; true if
/// any of them changed.
fn escalate(mode: &mut [Contact], robots: Vec<usize>) -> bool {
    let mut changed = false;
    for i in robots {
        let next = match mode[i] {
            Contact::Push => Contact::Yield,
            _ => Contact::Held,
        };
        changed |= next != mode[i];
        mode[i] = next;
    }
    changed
}

fn clamp_inside(p: Vec2, r: f64, w: f64, h: f64) -> Vec2 {
    Vec2::new(p.x.clamp(r, w - r), p.y.clamp(r, h - r))
}

/// Uniformly place `robots` then `pucks` inside the margin with no overlaps.
pub fn spawn_random(
    extent: Vec2,
    config: &WorldConfig,
    robots: usize,
    pucks: usize,
    rng: &mut impl Rng,
) -> Result<World> {
    spawn_random_where(extent, config, robots, pucks, rng, &|_| true)
}

/// [`spawn_random`], with robot centres restricted to points where
/// `robot_allowed` holds (rejection sampling).
pub fn spawn_random_where(
    extent: Vec2,
    config: &WorldConfig,
    robots: usize,
    pucks: usize,
    rng: &mut impl Rng,
    robot_allowed: &dyn Fn(Vec2) -> bool,
) -> Result<World> {
    config.validate()?;
    let mut world = World::new(extent.x, extent.y);
    world.collision_iterations = config.collision_iterations;
    world.puck_wall_clearance = config.wall_clearance();
    let mut placed: Vec<(Vec2, f64)> = Vec::with_capacity(robots + pucks);
    for i in 0..robots {
        let position = place(extent, config.margin(), config.robot_radius, &placed, i, rng, robot_allowed)?;
        placed.push((position, config.robot_radius));
        world.robots.push(RobotBody {
            id: i as u32,
            position,
            heading: rng.gen_range(-PI..PI),
            radius: config.robot_radius,
        });
    }
    for i in 0..pucks {
        let position = place(extent, config.margin(), config.puck_radius, &placed, robots + i, rng, &|_| true)?;
        placed.push((position, config.puck_radius));
        world.pucks.push(PuckBody {
            id: i as u32,
            position,
            radius: config.puck_radius,
        });
    }
    Ok(world)
}

/// Move every puck to a fresh uniform position that overlaps nothing.
pub fn scatter_pucks(world: &mut World, margin: f64, rng: &mut impl Rng) -> Result<()> {
    let extent = world.extent();
    let mut placed: Vec<(Vec2, f64)> = world.robots.iter().map(|r| (r.position, r.radius)).collect();
    for i in 0..world.pucks.len() {
        let r = world.pucks[i].radius;
        let position = place(extent, margin, r, &placed, world.robots.len() + i, rng, &|_| true)?;
        placed.push((position, r));
        world.pucks[i].position = position;
    }
    Ok(())
}

fn place(
    extent: Vec2,
    margin: f64,
    radius: f64,
    placed: &[(Vec2, f64)],
    index: usize,
    rng: &mut impl Rng,
    allowed: &dyn Fn(Vec2) -> bool,
) -> Result<Vec2> {
    let lo = margin + radius;
    let (hx, hy) = (extent.x - lo, extent.y - lo);
    if hx < lo || hy < lo {
        return Err(Error::Capacity {
            index,
            attempts: 0,
        });
    }
    for _ in 0..SPAWN_ATTEMPTS {
        let p = Vec2::new(uniform(rng, lo, hx), uniform(rng, lo, hy));
        if allowed(p)
            && placed
                .iter()
                .all(|&(q, rq)| (p - q).norm_sq() >= (radius + rq) * (radius + rq))
        {
            return Ok(p);
        }
    }
    Err(Error::Capacity {
        index,
        attempts: SPAWN_ATTEMPTS,
    })
}

fn uniform(rng: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    if hi > lo {
        rng.gen_range(lo..hi)
    } else {
        lo
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::FRAC_PI_2;

    fn robot(id: u32, x: f64, y: f64, heading: f64) -> RobotBody {
        RobotBody {
            id,
            position: Vec2::new(x, y),
            heading,
            radius: 35.0,
        }
    }

    fn puck(id: u32, x: f64, y: f64) -> PuckBody {
        PuckBody {
            id,
            position: Vec2::new(x, y),
            radius: 14.0,
        }
    }

    #[test]
    fn unicycle_identity_rotation_translation() {
        let r = robot(0, 10.0, 20.0, 0.0);
        assert_eq!(integrate_unicycle(r, Action::STOP, 1.0), r);
        let spun = integrate_unicycle(r, Action::new(0.0, FRAC_PI_2), 1.0);
        assert_eq!(spun.heading, FRAC_PI_2);
        assert_eq!(spun.position, r.position);
        let moved = integrate_unicycle(r, Action::new(1.0, 0.0), 10.0);
        assert_eq!(moved.position, Vec2::new(20.0, 20.0));
    }

    #[test]
    fn empty_world_step_only_counts() {
        let mut w = World::new(100.0, 100.0);
        w.step(&[], 1.0);
        assert_eq!(w.step_count, 1);
        assert!(w.robots.is_empty() && w.pucks.is_empty());
    }

    #[test]
    #[should_panic(expected = "one action per robot")]
    fn action_count_mismatch_panics() {
        let mut w = World::new(100.0, 100.0);
        w.robots.push(robot(0, 50.0, 50.0, 0.0));
        w.step(&[], 1.0);
    }

    #[test]
    fn head_on_push_moves_puck_along_normal() {
        let mut w = World::new(800.0, 800.0);
        w.robots.push(robot(0, 100.0, 400.0, 0.0));
        w.pucks.push(puck(0, 150.0, 400.0));
        // gap between surfaces is 1; driving 3 forward penetrates by 2
        w.step(&[Action::new(3.0, 0.0)], 1.0);
        assert_eq!(w.robots[0].position, Vec2::new(103.0, 400.0));
        assert!((w.pucks[0].position.x - (103.0 + 49.0)).abs() < 1e-12);
        assert_eq!(w.pucks[0].position.y, 400.0);
        assert!(w.max_overlap() <= OVERLAP_TOLERANCE);
    }

    #[test]
    fn symmetric_robot_collision_preserves_midpoint() {
        let mut w = World::new(800.0, 800.0);
        w.robots.push(robot(0, 360.0, 400.0, 0.0));
        w.robots.push(robot(1, 440.0, 400.0, -PI));
        w.step(&[Action::new(8.0, 0.0), Action::new(8.0, 0.0)], 1.0);
        let (a, b) = (w.robots[0].position, w.robots[1].position);
        assert!(((a.x + b.x) * 0.5 - 400.0).abs() < 1e-9);
        assert!((b.x - a.x - 70.0).abs() < 1e-9);
        assert!((a.y - 400.0).abs() < 1e-9 && (b.y - 400.0).abs() < 1e-9);
    }

    #[test]
    fn coincident_pucks_split_along_x() {
        let mut w = World::new(800.0, 800.0);
        w.pucks.push(puck(0, 400.0, 400.0));
        w.pucks.push(puck(1, 400.0, 400.0));
        w.resolve_collisions(1);
        assert_eq!(w.pucks[0].position, Vec2::new(414.0, 400.0));
        assert_eq!(w.pucks[1].position, Vec2::new(386.0, 400.0));
    }

    #[test]
    fn robot_pushes_puck_full_depth() {
        let mut w = World::new(800.0, 800.0);
        w.robots.push(robot(0, 400.0, 400.0, 0.0));
        w.pucks.push(puck(0, 400.0, 445.0));
        w.resolve_collisions(1);
        assert_eq!(w.robots[0].position, Vec2::new(400.0, 400.0));
        assert_eq!(w.pucks[0].position, Vec2::new(400.0, 449.0));
    }

    #[test]
    fn relaxation_reduces_max_overlap() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..50 {
            let mut w = World::new(800.0, 800.0);
            for i in 0..20 {
                let p = Vec2::new(rng.gen_range(350.0..450.0), rng.gen_range(350.0..450.0));
                if i < 5 {
                    w.robots.push(robot(i, p.x, p.y, 0.0));
                } else {
                    w.pucks.push(puck(i, p.x, p.y));
                }
            }
            let before = w.max_overlap();
            w.resolve_collisions(3);
            assert!(w.max_overlap() < before);
        }
    }

    #[test]
    fn puck_pinned_to_wall_blocks_robot() {
        let mut w = World::new(800.0, 800.0);
        w.robots.push(robot(0, 800.0 - 14.0 * 2.0 - 35.0 - 0.5, 400.0, 0.0));
        w.pucks.push(puck(0, 800.0 - 14.0, 400.0));
        let before = w.clone();
        w.step(&[Action::new(2.0, 0.0)], 1.0);
        assert!(w.max_overlap() <= OVERLAP_TOLERANCE);
        assert!(w.is_contained());
        // robot closes the gap but cannot advance into the pinned puck
        assert!((w.robots[0].position.x - (800.0 - 14.0 * 2.0 - 35.0)).abs() < 1e-6);
        assert_eq!(w.robots[0].position.y, 400.0);
        assert_eq!(w.pucks[0].position, before.pucks[0].position);
    }

    #[test]
    fn robot_slides_along_pinned_puck() {
        let mut w = World::new(800.0, 800.0);
        w.robots.push(robot(0, 800.0 - 14.0 * 2.0 - 35.0, 390.0, 0.5));
        w.pucks.push(puck(0, 800.0 - 14.0, 400.0));
        let start = w.robots[0].position;
        for _ in 0..5 {
            w.step(&[Action::new(2.0, 0.0)], 1.0);
            assert!(w.max_overlap() <= OVERLAP_TOLERANCE);
        }
        assert_eq!(w.pucks[0].position, Vec2::new(800.0 - 14.0, 400.0));
        // deflected along the puck rather than stopped dead
        assert!((w.robots[0].position - start).norm() > 1.0, "{:?}", w.robots[0].position);
    }

    #[test]
    fn spawn_examples() {
        let cfg = WorldConfig::default();
        let ext = Vec2::new(800.0, 800.0);
        let w = spawn_random(ext, &cfg, 0, 0, &mut ChaCha8Rng::seed_from_u64(1)).unwrap();
        assert!(w.robots.is_empty() && w.pucks.is_empty());
        let a = spawn_random(ext, &cfg, 4, 40, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = spawn_random(ext, &cfg, 4, 40, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spawn_respects_margin_and_overlap_over_many_seeds() {
        let cfg = WorldConfig::default();
        let ext = Vec2::new(800.0, 800.0);
        let m = cfg.margin();
        for seed in 0..1000 {
            let w = spawn_random(ext, &cfg, 8, 40, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            assert_eq!(w.max_overlap(), 0.0, "seed {seed}");
            for (p, r) in w
                .robots
                .iter()
                .map(|b| (b.position, b.radius))
                .chain(w.pucks.iter().map(|b| (b.position, b.radius)))
            {
                assert!(p.x >= m + r && p.x <= 800.0 - m - r);
                assert!(p.y >= m + r && p.y <= 800.0 - m - r);
            }
            assert!(w.robots.iter().all(|r| (-PI..PI).contains(&r.heading)));
        }
    }

    #[test]
    fn spawn_capacity_error() {
        let cfg = WorldConfig::default();
        let r = spawn_random(Vec2::new(200.0, 200.0), &cfg, 20, 0, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(r, Err(Error::Capacity { .. })));
    }

    #[test]
    fn snapshot_round_trip() {
        let cfg = WorldConfig::default();
        let w = spawn_random(Vec2::new(800.0, 800.0), &cfg, 3, 5, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
        let text = w.snapshot();
        assert!(text.starts_with("# step 0 width 800 height 800\nrobot 0 "));
        let back = World::from_snapshot(&text).unwrap();
        assert_eq!(back.robots, w.robots);
        assert_eq!(back.pucks, w.pucks);
        assert!(World::from_snapshot("nonsense").is_err());
    }
}
