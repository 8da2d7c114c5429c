//! Orbital Construction 2.0: a reactive map from one sensor snapshot to a
//! forward/angular speed pair. The stuck-recovery timer is the only state.

use crate::error::{param, Result};
use crate::sensors::SensorSnapshot;
use crate::world::Action;
use rand::Rng;
use serde::{Deserialize, Serialize};
use std::collections::VecDeque;
use std::fmt;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerParams {
    pub v_max: f64,
    pub omega_max: f64,
    /// Order codes (6-bit mask) for which a puck on the left pulls the robot left.
    pub puck_variant: u8,
    /// Order codes for which the robot veers left to follow the field.
    pub align_variant: u8,
    /// A reading below this counts as "black", i.e. on the goal region.
    pub black_threshold: f64,
    pub stuck_window: usize,
    pub stuck_epsilon: f64,
    pub recovery_duration: u32,
}

impl Default for ControllerParams {
    fn default() -> Self {
        ControllerParams {
            v_max: 2.0,
            omega_max: 0.3,
            puck_variant: 13,
            align_variant: 18,
            black_threshold: 0.05,
            stuck_window: 60,
            stuck_epsilon: 0.005,
            recovery_duration: 30,
        }
    }
}

impl ControllerParams {
    pub fn validate(&self) -> Result<()> {
        if self.puck_variant > 63 {
            return Err(param("controller.puck_variant", "must lie in 0..=63"));
        }
        if self.align_variant > 63 {
            return Err(param("controller.align_variant", "must lie in 0..=63"));
        }
        if !(self.v_max > 0.0) {
            return Err(param("controller.v_max", "must be > 0"));
        }
        if !(self.omega_max > 0.0) {
            return Err(param("controller.omega_max", "must be > 0"));
        }
        if !(self.black_threshold >= 0.0) {
            return Err(param("controller.black_threshold", "must be >= 0"));
        }
        if self.stuck_window == 0 {
            return Err(param("controller.stuck_window", "must be >= 1"));
        }
        if !(self.stuck_epsilon >= 0.0) {
            return Err(param("controller.stuck_epsilon", "must be >= 0"));
        }
        Ok(())
    }
}

/// One-hot code of the ranking of the three field readings.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderCode(u8);

impl OrderCode {
    pub const ALL: [OrderCode; 6] = [
        OrderCode(1),
        OrderCode(2),
        OrderCode(4),
        OrderCode(8),
        OrderCode(16),
        OrderCode(32),
    ];

    pub fn bits(self) -> u8 {
        self.0
    }

    pub fn in_mask(self, mask: u8) -> bool {
        mask & self.0 != 0
    }
}

/// First matching guard wins, so ties resolve to the earliest branch.
pub fn compute_order(l: f64, c: f64, r: f64) -> OrderCode {
    let code = if r >= c && c >= l {
        1
    } else if c >= r && r >= l {
        2
    } else if r >= l && l >= c {
        4
    } else if l >= r && r >= c {
        8
    } else if c >= l && l >= r {
        16
    } else {
        // l >= c && c >= r is the only ordering left
        32
    };
    OrderCode(code)
}

/// Which rule produced an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Recovery,
    AvoidGoal,
    GatherPuck,
    Align,
    VeerRight,
    SlowForward,
}

impl Branch {
    pub fn as_str(self) -> &'static str {
        match self {
            Branch::Recovery => "recovery",
            Branch::AvoidGoal => "avoid_goal",
            Branch::GatherPuck => "gather_puck",
            Branch::Align => "align",
            Branch::VeerRight => "veer_right",
            Branch::SlowForward => "slow_forward",
        }
    }
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ControllerState {
    pub recovery_remaining: u32,
    pub recovery_action: Action,
    history: VecDeque<[f64; 3]>,
    window: usize,
}

impl ControllerState {
    pub fn new(params: &ControllerParams) -> Self {
        ControllerState {
            recovery_remaining: 0,
            recovery_action: Action::STOP,
            history: VecDeque::with_capacity(params.stuck_window + 1),
            window: params.stuck_window,
        }
    }

    pub fn history(&self) -> &VecDeque<[f64; 3]> {
        &self.history
    }

    fn record(&mut self, reading: [f64; 3]) {
        self.history.push_back(reading);
        while self.history.len() > self.window {
            self.history.pop_front();
        }
    }
}

/// True when the window is full and no channel moved by `epsilon` or more.
pub fn is_stuck(history: &VecDeque<[f64; 3]>, window: usize, epsilon: f64) -> bool {
    if history.len() < window || history.is_empty() {
        return false;
    }
    (0..3).all(|ch| {
        let (lo, hi) = history
            .iter()
            .rev()
            .take(window)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), s| {
                (lo.min(s[ch]), hi.max(s[ch]))
            });
        hi - lo < epsilon
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub action: Action,
    pub branch: Branch,
}

/// Choose this step's action. Rules are evaluated in a fixed order and the
/// first that applies wins. `rng` is consulted only when recovery starts.
pub fn decide(
    s: &SensorSnapshot,
    params: &ControllerParams,
    state: &mut ControllerState,
    rng: &mut impl Rng,
) -> Decision {
    state.record([s.l, s.c, s.r]);
    if is_stuck(&state.history, params.stuck_window, params.stuck_epsilon) {
        state.recovery_remaining = params.recovery_duration;
        let w = params.omega_max;
        state.recovery_action = Action::new(-params.v_max, rng.gen_range(-w..=w));
        state.history.clear();
    }
    if state.recovery_remaining > 0 {
        state.recovery_remaining -= 1;
        return Decision {
            action: state.recovery_action,
            branch: Branch::Recovery,
        };
    }

    let (v, w) = (params.v_max, params.omega_max);
    let order = compute_order(s.l, s.c, s.r);
    let (action, branch) = if s.r < params.black_threshold && s.c >= s.l {
        (Action::new(v, w), Branch::AvoidGoal)
    } else if order.in_mask(params.puck_variant) && s.left_puck && !s.left_robot {
        (Action::new(v, w), Branch::GatherPuck)
    } else if order.in_mask(params.align_variant) && !s.left_robot {
        (Action::new(v, w), Branch::Align)
    } else if !s.right_robot {
        (Action::new(v, -w), Branch::VeerRight)
    } else {
        (Action::new(0.25 * v, 0.0), Branch::SlowForward)
    };
    Decision { action, branch }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn snap(l: f64, c: f64, r: f64) -> SensorSnapshot {
        SensorSnapshot {
            l,
            c,
            r,
            ..Default::default()
        }
    }

    #[test]
    fn order_examples() {
        assert_eq!(compute_order(0.1, 0.2, 0.3).bits(), 1);
        assert_eq!(compute_order(0.5, 0.5, 0.5).bits(), 1);
    }

    #[test]
    fn strict_permutations_hit_each_code_once() {
        let vals = [0.1, 0.2, 0.3];
        let perms = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let mut seen = Vec::new();
        for p in perms {
            let (l, c, r) = (vals[p[0]], vals[p[1]], vals[p[2]]);
            // independent table: rank pattern -> code
            let expected = if r > c && c > l {
                1
            } else if c > r && r > l {
                2
            } else if r > l && l > c {
                4
            } else if l > r && r > c {
                8
            } else if c > l && l > r {
                16
            } else {
                32
            };
            let got = compute_order(l, c, r).bits();
            assert_eq!(got, expected);
            seen.push(got);
        }
        seen.sort_unstable();
        assert_eq!(seen, vec![1, 2, 4, 8, 16, 32]);
    }

    #[test]
    fn default_masks_gate_expected_orders() {
        let p = ControllerParams::default();
        let puck: Vec<u8> = OrderCode::ALL.iter().filter(|o| o.in_mask(p.puck_variant)).map(|o| o.bits()).collect();
        let align: Vec<u8> = OrderCode::ALL.iter().filter(|o| o.in_mask(p.align_variant)).map(|o| o.bits()).collect();
        assert_eq!(puck, vec![1, 4, 8]);
        assert_eq!(align, vec![2, 16]);
    }

    #[test]
    fn decide_examples() {
        let p = ControllerParams::default();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let mut st = ControllerState::new(&p);
        let d = decide(&snap(0.1, 0.2, 0.3), &p, &mut st, &mut rng);
        assert_eq!((d.action, d.branch), (Action::new(2.0, -0.3), Branch::VeerRight));

        // order 8: L >= R >= C
        let s = SensorSnapshot {
            left_puck: true,
            ..snap(0.3, 0.1, 0.2)
        };
        assert_eq!(compute_order(s.l, s.c, s.r).bits(), 8);
        let d = decide(&s, &p, &mut st, &mut rng);
        assert_eq!((d.action, d.branch), (Action::new(2.0, 0.3), Branch::GatherPuck));

        let s = SensorSnapshot {
            left_robot: true,
            right_robot: true,
            ..snap(0.1, 0.2, 0.3)
        };
        let d = decide(&s, &p, &mut st, &mut rng);
        assert_eq!((d.action, d.branch), (Action::new(0.5, 0.0), Branch::SlowForward));

        for (pv, av) in [(0, 0), (63, 63), (13, 18)] {
            let q = ControllerParams {
                puck_variant: pv,
                align_variant: av,
                ..p.clone()
            };
            let d = decide(&snap(0.2, 0.5, 0.0), &q, &mut st, &mut rng);
            assert_eq!((d.action, d.branch), (Action::new(2.0, 0.3), Branch::AvoidGoal));
        }
    }

    #[test]
    fn stuck_detection() {
        let mut h = VecDeque::new();
        for _ in 0..59 {
            h.push_back([0.4, 0.4, 0.4]);
        }
        assert!(!is_stuck(&h, 60, 0.005));
        h.push_back([0.4, 0.4, 0.4]);
        assert!(is_stuck(&h, 60, 0.005));
        h[10][2] = 0.405;
        assert!(!is_stuck(&h, 60, 0.005));
        h[10][2] = 0.4049;
        assert!(is_stuck(&h, 60, 0.005));
    }

    #[test]
    fn recovery_reverses_then_resumes() {
        let p = ControllerParams {
            stuck_window: 5,
            recovery_duration: 3,
            ..Default::default()
        };
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let mut st = ControllerState::new(&p);
        let s = snap(0.1, 0.2, 0.3);
        let branches: Vec<Branch> = (0..10).map(|_| decide(&s, &p, &mut st, &mut rng).branch).collect();
        use Branch::*;
        assert_eq!(
            branches,
            vec![VeerRight, VeerRight, VeerRight, VeerRight, Recovery, Recovery, Recovery, VeerRight, VeerRight, Recovery]
        );
        assert_eq!(st.recovery_action.v, -2.0);
        assert!(st.recovery_action.omega.abs() <= 0.3);
    }

    #[test]
    fn replaying_rng_reproduces_actions() {
        let p = ControllerParams {
            stuck_window: 4,
            ..Default::default()
        };
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(5);
            let mut st = ControllerState::new(&p);
            (0..200)
                .map(|i| decide(&snap(0.3, 0.3, if i % 50 < 25 { 0.3 } else { 0.6 }), &p, &mut st, &mut rng).action)
                .collect::<Vec<_>>()
        };
        assert_eq!(run(), run());
    }

    #[test]
    fn validation_names_the_key() {
        let p = ControllerParams {
            puck_variant: 64,
            ..Default::default()
        };
        let msg = p.validate().unwrap_err().to_string();
        assert!(msg.contains("puck_variant") && msg.contains("0..=63"), "{msg}");
    }
}
