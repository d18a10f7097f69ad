//! Planar robot models integrated with explicit Euler at a fixed step.
//!
//! Both models expose a three-entry state (`x`, `y`, heading) and a two-entry
//! control; the single integrator ignores the heading slot.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub type State = [f64; 3];
pub type Control = [f64; 2];

/// Default start: workspace centre, heading along +x.
pub const DEFAULT_START: State = [0.5, 0.5, 0.0];
pub const DEFAULT_DT: f64 = 0.1;
pub const DEFAULT_STEPS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RobotKind {
    /// Unicycle with controls `(v, omega)`, forward motion only.
    DifferentialDrive,
    /// Controls are planar velocities `(vx, vy)`.
    SingleIntegrator,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobotModel {
    pub kind: RobotKind,
    /// `v_max` for the differential drive, per-axis speed bound for the integrator.
    pub max_speed: f64,
    /// `omega_max`; unused by the integrator.
    pub max_turn_rate: f64,
    pub dt: f64,
    /// Workspace box `[0, L_1] x [0, L_2]`.
    pub workspace: [f64; 2],
}

impl Default for RobotModel {
    fn default() -> Self {
        Self::differential_drive(1.0, 3.0, DEFAULT_DT)
    }
}

impl RobotModel {
    pub fn differential_drive(max_speed: f64, max_turn_rate: f64, dt: f64) -> Self {
        Self {
            kind: RobotKind::DifferentialDrive,
            max_speed,
            max_turn_rate,
            dt,
            workspace: [1.0, 1.0],
        }
    }

    pub fn single_integrator(max_speed: f64, dt: f64) -> Self {
        Self {
            kind: RobotKind::SingleIntegrator,
            max_speed,
            max_turn_rate: 0.0,
            dt,
            workspace: [1.0, 1.0],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.max_speed.is_finite() && self.max_speed > 0.0) {
            return Err(Error::param("max_speed", "must be positive"));
        }
        if self.kind == RobotKind::DifferentialDrive
            && !(self.max_turn_rate.is_finite() && self.max_turn_rate > 0.0)
        {
            return Err(Error::param("max_turn_rate", "must be positive"));
        }
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::param("dt", "must be positive"));
        }
        if self.workspace.iter().any(|l| !(l.is_finite() && *l > 0.0)) {
            return Err(Error::param("workspace", "box lengths must be positive"));
        }
        Ok(())
    }

    pub fn state_dim(&self) -> usize {
        match self.kind {
            RobotKind::DifferentialDrive => 3,
            RobotKind::SingleIntegrator => 2,
        }
    }

    pub fn control_dim(&self) -> usize {
        2
    }

    pub fn control_bounds(&self) -> [(f64, f64); 2] {
        match self.kind {
            RobotKind::DifferentialDrive => [
                (0.0, self.max_speed),
                (-self.max_turn_rate, self.max_turn_rate),
            ],
            RobotKind::SingleIntegrator => [
                (-self.max_speed, self.max_speed),
                (-self.max_speed, self.max_speed),
            ],
        }
    }

    pub fn project(&self, u: Control) -> Control {
        let b = self.control_bounds();
        [u[0].clamp(b[0].0, b[0].1), u[1].clamp(b[1].0, b[1].1)]
    }

    pub fn contains_position(&self, p: [f64; 2]) -> bool {
        (0..2).all(|j| p[j] >= 0.0 && p[j] <= self.workspace[j])
    }

    /// One unclamped Euler step.
    pub fn step(&self, s: &State, u: &Control) -> State {
        let dt = self.dt;
        match self.kind {
            RobotKind::DifferentialDrive => {
                let (sin, cos) = s[2].sin_cos();
                [s[0] + u[0] * cos * dt, s[1] + u[0] * sin * dt, s[2] + u[1] * dt]
            }
            RobotKind::SingleIntegrator => [s[0] + u[0] * dt, s[1] + u[1] * dt, s[2]],
        }
    }

    /// Jacobians of [`step`](Self::step) with respect to state and control.
    pub fn step_jacobians(&self, s: &State, u: &Control) -> ([[f64; 3]; 3], [[f64; 2]; 3]) {
        let dt = self.dt;
        match self.kind {
            RobotKind::DifferentialDrive => {
                let (sin, cos) = s[2].sin_cos();
                (
                    [
                        [1.0, 0.0, -u[0] * sin * dt],
                        [0.0, 1.0, u[0] * cos * dt],
                        [0.0, 0.0, 1.0],
                    ],
                    [[cos * dt, 0.0], [sin * dt, 0.0], [0.0, dt]],
                )
            }
            RobotKind::SingleIntegrator => (
                [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]],
                [[dt, 0.0], [0.0, dt], [0.0, 0.0]],
            ),
        }
    }

    /// Clamps the position entries into the workspace, returning the signed overshoot per axis.
    pub fn clamp(&self, s: &State) -> (State, [f64; 2]) {
        let mut out = *s;
        let mut over = [0.0; 2];
        for j in 0..2 {
            let c = s[j].clamp(0.0, self.workspace[j]);
            over[j] = s[j] - c;
            out[j] = c;
        }
        (out, over)
    }
}

/// Control inputs `u_0 .. u_{N-1}`; the horizon is `N * dt`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ControlSequence(pub Vec<Control>);

impl ControlSequence {
    pub fn zeros(steps: usize) -> Self {
        Self(vec![[0.0; 2]; steps])
    }

    pub fn constant(steps: usize, u: Control) -> Self {
        Self(vec![u; steps])
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn horizon(&self, dt: f64) -> f64 {
        self.0.len() as f64 * dt
    }

    pub fn as_slice(&self) -> &[Control] {
        &self.0
    }

    pub fn within_bounds(&self, model: &RobotModel) -> bool {
        self.0.iter().all(|u| model.project(*u) == *u)
    }
}

/// A position that was pulled back into the workspace during rollout.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ClampEvent {
    /// Index of the produced state (1-based in the state array).
    pub step: usize,
    pub axis: usize,
    /// Pre-clamp coordinate minus the boundary it was clamped to.
    pub overshoot: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    /// `N + 1` states, starting with the start state.
    pub states: Vec<State>,
    pub clamps: Vec<ClampEvent>,
    pub dt: f64,
}

impl Trajectory {
    pub fn positions(&self) -> Vec<[f64; 2]> {
        self.states.iter().map(|s| [s[0], s[1]]).collect()
    }

    /// Positions reached after each control, the samples entering the time average.
    pub fn samples(&self) -> Vec<[f64; 2]> {
        self.states[1..].iter().map(|s| [s[0], s[1]]).collect()
    }

    pub fn penalty(&self) -> f64 {
        self.clamps.iter().map(|c| c.overshoot * c.overshoot).sum()
    }
}

pub fn rollout(model: &RobotModel, start: &State, u: &ControlSequence) -> Trajectory {
    let mut states = Vec::with_capacity(u.len() + 1);
    let mut clamps = Vec::new();
    states.push(*start);
    let mut s = *start;
    for (i, ui) in u.0.iter().enumerate() {
        let (next, over) = model.clamp(&model.step(&s, ui));
        for (axis, &o) in over.iter().enumerate() {
            if o != 0.0 {
                clamps.push(ClampEvent {
                    step: i + 1,
                    axis,
                    overshoot: o,
                });
            }
        }
        states.push(next);
        s = next;
    }
    Trajectory {
        states,
        clamps,
        dt: model.dt,
    }
}

pub fn project_controls(model: &RobotModel, u: &ControlSequence) -> ControlSequence {
    ControlSequence(u.0.iter().map(|c| model.project(*c)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_controls_stay_put() {
        let m = RobotModel::default();
        let t = rollout(&m, &DEFAULT_START, &ControlSequence::zeros(20));
        assert!(t.states.iter().all(|s| *s == DEFAULT_START));
        assert!(t.clamps.is_empty());
    }

    #[test]
    fn straight_line_reaches_boundary() {
        let m = RobotModel::differential_drive(1.0, 1.0, 0.1);
        let t = rollout(&m, &DEFAULT_START, &ControlSequence::constant(10, [0.5, 0.0]));
        let last = t.states.last().unwrap();
        assert!((last[0] - 1.0).abs() < 1e-12);
        assert_eq!(last[1], 0.5);
        assert!(last[0] <= 1.0);

        let t = rollout(&m, &DEFAULT_START, &ControlSequence::constant(12, [0.5, 0.0]));
        assert_eq!(t.states.last().unwrap()[0], 1.0);
        assert!(t.clamps.iter().any(|c| c.axis == 0 && c.overshoot > 0.0));
    }

    #[test]
    fn integrator_euler_step() {
        let m = RobotModel::single_integrator(1.0, 1.0);
        let t = rollout(&m, &[0.5, 0.5, 0.0], &ControlSequence(vec![[0.1, -0.1]]));
        assert!((t.states[1][0] - 0.6).abs() < 1e-15);
        assert!((t.states[1][1] - 0.4).abs() < 1e-15);
    }

    #[test]
    fn projection_examples() {
        let m = RobotModel::differential_drive(0.8, 2.0, 0.1);
        assert_eq!(m.project([-0.2, 0.1]), [0.0, 0.1]);
        assert_eq!(m.project([1.6, 0.0]), [0.8, 0.0]);
        assert_eq!(m.project([0.3, -1.5]), [0.3, -1.5]);
        assert_eq!(m.project([0.3, -2.5]), [0.3, -2.0]);
    }

    #[test]
    fn validation() {
        assert!(RobotModel::default().validate().is_ok());
        assert!(RobotModel::differential_drive(0.0, 1.0, 0.1).validate().is_err());
        assert!(RobotModel::differential_drive(1.0, 0.0, 0.1).validate().is_err());
        assert!(RobotModel::differential_drive(1.0, 1.0, -0.1).validate().is_err());
        assert!(RobotModel::single_integrator(1.0, 0.1).validate().is_ok());
    }

    #[test]
    fn jacobians_match_finite_differences() {
        for m in [RobotModel::default(), RobotModel::single_integrator(1.0, 0.1)] {
            let s = [0.3, 0.6, 0.7];
            let u = [0.4, -0.9];
            let (a, b) = m.step_jacobians(&s, &u);
            let h = 1e-7;
            for j in 0..3 {
                let mut sp = s;
                let mut sm = s;
                sp[j] += h;
                sm[j] -= h;
                let (fp, fm) = (m.step(&sp, &u), m.step(&sm, &u));
                for i in 0..3 {
                    assert!(((fp[i] - fm[i]) / (2.0 * h) - a[i][j]).abs() < 1e-8);
                }
            }
            for j in 0..2 {
                let mut up = u;
                let mut um = u;
                up[j] += h;
                um[j] -= h;
                let (fp, fm) = (m.step(&s, &up), m.step(&s, &um));
                for i in 0..3 {
                    assert!(((fp[i] - fm[i]) / (2.0 * h) - b[i][j]).abs() < 1e-8);
                }
            }
        }
    }

    fn controls() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((-2.0..2.0f64, -5.0..5.0f64), 1..60)
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(u in controls()) {
            let m = RobotModel::default();
            let seq = ControlSequence(u.iter().map(|&(a, b)| [a, b]).collect());
            let once = project_controls(&m, &seq);
            prop_assert!(once.within_bounds(&m));
            prop_assert_eq!(project_controls(&m, &once), once);
        }

        #[test]
        fn rollouts_are_deterministic_and_consistent(u in controls()) {
            let m = RobotModel::default();
            let seq = project_controls(&m, &ControlSequence(u.iter().map(|&(a, b)| [a, b]).collect()));
            let t1 = rollout(&m, &DEFAULT_START, &seq);
            let t2 = rollout(&m, &DEFAULT_START, &seq);
            prop_assert_eq!(&t1, &t2);
            prop_assert_eq!(t1.states[0], DEFAULT_START);
            for (i, c) in seq.0.iter().enumerate() {
                let (next, _) = m.clamp(&m.step(&t1.states[i], c));
                prop_assert_eq!(next, t1.states[i + 1]);
            }
            if t1.clamps.is_empty() {
                for p in t1.positions() {
                    prop_assert!(m.contains_position(p));
                }
            }
        }
    }
}
