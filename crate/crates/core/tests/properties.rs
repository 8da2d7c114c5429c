use oc2_core::controller::{compute_order, decide, Branch, ControllerParams, ControllerState};
use oc2_core::geom::Vec2;
use oc2_core::sensors::SensorSnapshot;
use oc2_core::world::{spawn_random, Action, WorldConfig};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn snapshot() -> impl Strategy<Value = SensorSnapshot> {
    (0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64, any::<[bool; 3]>()).prop_map(|(l, c, r, b)| SensorSnapshot {
        l,
        c,
        r,
        left_puck: b[0],
        left_robot: b[1],
        right_robot: b[2],
    })
}

proptest! {
    #[test]
    fn order_code_is_one_hot(l in -1.0..2.0f64, c in -1.0..2.0f64, r in -1.0..2.0f64) {
        let bits = compute_order(l, c, r).bits();
        prop_assert_eq!(bits.count_ones(), 1);
        prop_assert!(bits <= 32);
    }

    #[test]
    fn outside_recovery_the_robot_moves_forward(s in snapshot(), p in 0u8..64, a in 0u8..64) {
        let params = ControllerParams { puck_variant: p, align_variant: a, ..Default::default() };
        let mut state = ControllerState::new(&params);
        let d = decide(&s, &params, &mut state, &mut ChaCha8Rng::seed_from_u64(0));
        prop_assert!(d.branch != Branch::Recovery);
        prop_assert!(d.action.v > 0.0);
        prop_assert!(d.action.omega.abs() <= params.omega_max);
    }

    #[test]
    fn one_step_keeps_the_world_valid(
        seed in any::<u64>(),
        robots in 0usize..10,
        pucks in 0usize..40,
        actions in proptest::collection::vec((-2.0..2.0f64, -0.3..0.3f64), 10),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut world = spawn_random(Vec2::new(300.0, 300.0), &WorldConfig::default(), robots, pucks, &mut rng).unwrap();
        let acts: Vec<Action> = actions[..robots].iter().map(|&(v, w)| Action::new(v, w)).collect();
        for _ in 0..20 {
            world.step(&acts, 1.0);
            prop_assert!(world.is_contained());
            prop_assert!(world.max_overlap() <= 1e-6);
        }
        prop_assert_eq!(world.robots.len(), robots);
        prop_assert_eq!(world.pucks.len(), pucks);
        prop_assert_eq!(world.step_count, 20);
    }
}
