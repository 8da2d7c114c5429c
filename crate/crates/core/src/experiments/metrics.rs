//! Construction-quality metrics.

use crate::distance::GoalDistanceMap;
use crate::field::ScalarField;
use crate::world::{PuckBody, World};

/// Whether a puck touches the goal region: the goal distance of the cell
/// under its centre is at most its radius.
pub fn puck_touches_goal(puck: &PuckBody, dmap: &GoalDistanceMap) -> bool {
    dmap.at_point(puck.position) <= puck.radius
}

/// Fraction of pucks touching the goal region; 0 when there are no pucks.
pub fn proportion_in_goal(world: &World, dmap: &GoalDistanceMap) -> f64 {
    if world.pucks.is_empty() {
        return 0.0;
    }
    let n = world.pucks.iter().filter(|p| puck_touches_goal(p, dmap)).count();
    n as f64 / world.pucks.len() as f64
}

/// Fraction of goal cells whose centre lies within a puck radius of some
/// puck centre; 0 when there are no pucks or no goal cells.
pub fn goal_coverage(world: &World, field: &ScalarField) -> f64 {
    let total = field.values().iter().filter(|&&v| v == 0.0).count();
    if total == 0 || world.pucks.is_empty() {
        return 0.0;
    }
    let (w, h, cs) = (field.width(), field.height(), field.cell_size());
    let mut covered = vec![false; w * h];
    let mut count = 0usize;
    for p in &world.pucks {
        let lo_x = (((p.position.x - p.radius) / cs - 0.5).floor().max(0.0)) as usize;
        let lo_y = (((p.position.y - p.radius) / cs - 0.5).floor().max(0.0)) as usize;
        let hi_x = ((((p.position.x + p.radius) / cs - 0.5).ceil()).max(0.0) as usize).min(w - 1);
        let hi_y = ((((p.position.y + p.radius) / cs - 0.5).ceil()).max(0.0) as usize).min(h - 1);
        let r2 = p.radius * p.radius;
        for iy in lo_y..=hi_y {
            for ix in lo_x..=hi_x {
                let k = iy * w + ix;
                if covered[k] || field.values()[k] != 0.0 {
                    continue;
                }
                if (field.cell_centre(ix, iy) - p.position).norm_sq() <= r2 {
                    covered[k] = true;
                    count += 1;
                }
            }
        }
    }
    count as f64 / total as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distance::goal_distance_map;
    use crate::geom::Vec2;
    use rand::{Rng, SeedableRng};

    fn puck(x: f64, y: f64, r: f64) -> PuckBody {
        PuckBody {
            id: 0,
            position: Vec2::new(x, y),
            radius: r,
        }
    }

    fn field_with_goal(w: usize, h: usize, goal: impl Fn(usize, usize) -> bool) -> ScalarField {
        let values = (0..w * h)
            .map(|i| if goal(i % w, i / w) { 0.0 } else { 0.6 })
            .collect();
        ScalarField::from_values(w, h, 1.0, values).unwrap()
    }

    #[test]
    fn all_pucks_on_goal() {
        let f = field_with_goal(20, 20, |x, _| x < 10);
        let dm = goal_distance_map(&f).unwrap();
        let mut w = World::new(20.0, 20.0);
        w.pucks = vec![puck(2.0, 2.0, 1.0), puck(5.5, 15.0, 1.0)];
        assert_eq!(proportion_in_goal(&w, &dm), 1.0);
        w.pucks.clear();
        assert_eq!(proportion_in_goal(&w, &dm), 0.0);
    }

    #[test]
    fn touching_is_a_closed_inequality() {
        // single goal cell at (0, 0); the cell 14 to the right is exactly 14 away
        let f = field_with_goal(40, 5, |x, y| x == 0 && y == 0);
        let dm = goal_distance_map(&f).unwrap();
        let mut w = World::new(40.0, 5.0);
        w.pucks = vec![puck(14.5, 0.5, 14.0)];
        assert_eq!(proportion_in_goal(&w, &dm), 1.0);
        w.pucks = vec![puck(15.5, 0.5, 14.0)];
        assert_eq!(proportion_in_goal(&w, &dm), 0.0);
    }

    #[test]
    fn coverage_examples() {
        let f = field_with_goal(10, 10, |x, y| x == 4 && y == 4);
        let mut w = World::new(10.0, 10.0);
        assert_eq!(goal_coverage(&w, &f), 0.0);
        w.pucks = vec![puck(4.2, 4.9, 1.0)];
        assert_eq!(goal_coverage(&w, &f), 1.0);

        let f = field_with_goal(10, 10, |x, y| (2..6).contains(&x) && (2..4).contains(&y));
        w.pucks = vec![puck(3.0, 3.0, 1.0), puck(5.0, 3.0, 1.0)];
        assert_eq!(goal_coverage(&w, &f), 1.0);
        w.pucks = vec![puck(3.0, 3.0, 0.8)];
        assert_eq!(goal_coverage(&w, &f), 0.5);
    }

    #[test]
    fn coverage_matches_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        for _ in 0..50 {
            let f = field_with_goal(30, 24, |x, y| (x + 2 * y) % 7 == 0 || (10..14).contains(&x));
            let mut w = World::new(30.0, 24.0);
            for _ in 0..rng.gen_range(1..8) {
                w.pucks.push(puck(rng.gen_range(0.0..30.0), rng.gen_range(0.0..24.0), rng.gen_range(0.5..5.0)));
            }
            let goals: Vec<_> = f.goal_cells().collect();
            let covered = goals
                .iter()
                .filter(|&&(x, y)| {
                    let c = f.cell_centre(x, y);
                    w.pucks.iter().any(|p| (c - p.position).norm() <= p.radius)
                })
                .count();
            assert_eq!(goal_coverage(&w, &f), covered as f64 / goals.len() as f64);
        }
    }
}
