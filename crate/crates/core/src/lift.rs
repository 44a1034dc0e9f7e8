//! Continuous lifting of sampled orientation paths into SU(2).
//!
//! Every increment is lifted to the SU(2) element with the same axis and an
//! angle strictly below π, the unique lift nearest the identity. Paths whose
//! consecutive samples are π or more apart are rejected rather than guessed.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rotor::{So3, Spinor, Su2, Vec3};

/// Largest admissible single-step angle.
pub const MAX_STEP_ANGLE: f64 = PI - 1e-6;

/// Default Frobenius tolerance for deciding that a loop is closed.
pub const DEFAULT_CLOSURE_TOL: f64 = 1e-6;

/// Frame in which rotation increments are expressed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frame {
    /// Increments about fixed world axes (left multiplication).
    #[default]
    World,
    /// Increments about axes glued to the ball (right multiplication), as a
    /// gyroscope mounted inside the ball reports them.
    Body,
}

/// Orientation of the ball together with its lifted history.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BallState {
    pub orientation: So3,
    pub lift: Su2,
    pub spinor: Spinor,
    pub principal_axis: Vec3,
    pub step_count: u64,
    /// Spinor the lift acts on: `spinor = lift · reference`. Reset by a
    /// measurement collapse.
    pub reference: Spinor,
}

impl Default for BallState {
    fn default() -> Self {
        BallState::init(Spinor::UP).expect("|up> is normalized")
    }
}

impl BallState {
    /// Ball at rest (principal axis along ẑ) displaying `initial`.
    pub fn init(initial: Spinor) -> Result<BallState> {
        let initial = Spinor::new(initial.alpha, initial.beta)?;
        Ok(BallState {
            orientation: So3::IDENTITY,
            lift: Su2::IDENTITY,
            spinor: initial,
            principal_axis: Vec3::Z,
            step_count: 0,
            reference: initial,
        })
    }

    /// Applies one world-frame increment.
    pub fn step(&self, axis: Vec3, angle: f64) -> Result<BallState> {
        self.step_in(Frame::World, axis, angle)
    }

    /// Applies one increment of rotation `angle` about `axis`, lifted to the
    /// SU(2) element with the same axis and angle.
    pub fn step_in(&self, frame: Frame, axis: Vec3, angle: f64) -> Result<BallState> {
        let axis = axis.require_unit()?;
        if !angle.is_finite() {
            return Err(Error::NonFinite("angle"));
        }
        if angle.abs() >= MAX_STEP_ANGLE {
            return Err(Error::StepTooLarge { angle });
        }
        let du = Su2::from_axis_angle(axis, angle)?;
        let dr = So3::from_axis_angle(axis, angle)?;
        let (lift, orientation) = match frame {
            Frame::World => (du.compose(&self.lift), dr.compose(&self.orientation)),
            Frame::Body => (self.lift.compose(&du), self.orientation.compose(&dr)),
        };
        Ok(self.with_motion(lift, orientation))
    }

    /// Applies a sequence of increments in order.
    pub fn follow(&self, frame: Frame, increments: &[(Vec3, f64)]) -> Result<BallState> {
        increments
            .iter()
            .try_fold(*self, |s, &(axis, angle)| s.step_in(frame, axis, angle))
    }

    fn with_motion(&self, lift: Su2, orientation: So3) -> BallState {
        BallState {
            orientation,
            lift,
            spinor: lift.apply(&self.reference),
            principal_axis: orientation.rotate(Vec3::Z),
            step_count: self.step_count + 1,
            reference: self.reference,
        }
    }

    /// Replaces the displayed spinor and restarts the lift from the identity
    /// while keeping the physical orientation.
    pub fn reanchored(&self, spinor: Spinor) -> BallState {
        BallState {
            lift: Su2::IDENTITY,
            spinor,
            reference: spinor,
            ..*self
        }
    }
}

/// Lifts a sampled orientation path starting from `initial`.
///
/// The returned states correspond one-to-one with `orientations`; the first
/// one is reached from `initial.orientation` by the same rule as the rest.
pub fn lift_path(orientations: &[So3], initial: &BallState) -> Result<Vec<BallState>> {
    let mut out = Vec::with_capacity(orientations.len());
    let mut current = *initial;
    for (k, target) in orientations.iter().enumerate() {
        let (axis, angle) = current.orientation.relative(target).map_err(|e| e.at_event(k))?;
        current = current.step(axis, angle).map_err(|e| e.at_event(k))?;
        out.push(current);
    }
    Ok(out)
}

/// Which of the two homotopy classes of SO(3) a closed loop belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HomotopyClass {
    pub is_trivial: bool,
    pub endpoint_sign: i8,
    /// Phase picked up by the spinor, 0 or π (mod 2π).
    pub gamma: f64,
}

impl HomotopyClass {
    fn from_sign(positive: bool) -> Self {
        HomotopyClass {
            is_trivial: positive,
            endpoint_sign: if positive { 1 } else { -1 },
            gamma: if positive { 0.0 } else { PI },
        }
    }
}

/// Classifies the closed loop traced by `states` (first to last).
pub fn classify_loop(states: &[BallState], closure_tol: f64) -> Result<HomotopyClass> {
    let (first, last) = match (states.first(), states.last()) {
        (Some(f), Some(l)) => (f, l),
        _ => return Ok(HomotopyClass::from_sign(true)),
    };
    classify_endpoints(first, last, closure_tol)
}

/// Same as [`classify_loop`] given only the endpoints of the loop.
pub fn classify_endpoints(first: &BallState, last: &BallState, closure_tol: f64) -> Result<HomotopyClass> {
    let mismatch = first.orientation.distance(&last.orientation);
    if !(mismatch <= closure_tol) {
        return Err(Error::LoopNotClosed {
            mismatch,
            tol: closure_tol,
        });
    }
    Ok(HomotopyClass::from_sign(last.lift.dot(&first.lift) > 0.0))
}
