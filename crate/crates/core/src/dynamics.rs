//! Hamiltonian evolution `∂ₜψ = −i Ω(t)·σ ψ` realized as ball rotations.
//!
//! ħ = 1. A field `Ω` generates the SU(2) element `exp(−i Ω·σ dt)`, i.e. a
//! turn of `2|Ω|dt` about `Ω̂`, so the physical ball spins at twice the rate
//! at which the spinor phases advance.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{BallState, MAX_STEP_ANGLE};
use crate::rotor::{Spinor, Vec3};

/// The instantaneous rotation generator `Ω(t)`, in rad/s.
#[derive(Clone)]
pub enum Omega {
    Constant(Vec3),
    Varying(Arc<dyn Fn(f64) -> Vec3 + Send + Sync>),
}

impl Omega {
    pub fn varying(f: impl Fn(f64) -> Vec3 + Send + Sync + 'static) -> Self {
        Omega::Varying(Arc::new(f))
    }

    pub fn at(&self, t: f64) -> Vec3 {
        match self {
            Omega::Constant(v) => *v,
            Omega::Varying(f) => f(t),
        }
    }
}

impl fmt::Debug for Omega {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Omega::Constant(v) => f.debug_tuple("Constant").field(v).finish(),
            Omega::Varying(_) => f.write_str("Varying(..)"),
        }
    }
}

/// `Ω` held over `[t0, t1]`, integrated with step `dt`.
#[derive(Debug, Clone)]
pub struct FieldSegment {
    pub omega: Omega,
    pub t0: f64,
    pub t1: f64,
    pub dt: f64,
}

#[derive(Serialize, Deserialize)]
struct ConstantSegment {
    omega: Vec3,
    t0: f64,
    t1: f64,
    dt: f64,
}

impl Serialize for FieldSegment {
    fn serialize<S: serde::Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        match self.omega {
            Omega::Constant(omega) => ConstantSegment {
                omega,
                t0: self.t0,
                t1: self.t1,
                dt: self.dt,
            }
            .serialize(ser),
            Omega::Varying(_) => Err(serde::ser::Error::custom(
                "time-dependent field segments cannot be serialized",
            )),
        }
    }
}

impl<'de> Deserialize<'de> for FieldSegment {
    fn deserialize<D: serde::Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let c = ConstantSegment::deserialize(de)?;
        Ok(FieldSegment::constant(c.omega, c.t0, c.t1, c.dt))
    }
}

impl FieldSegment {
    pub fn new(omega: Omega, t0: f64, t1: f64, dt: f64) -> Self {
        FieldSegment { omega, t0, t1, dt }
    }

    pub fn constant(omega: Vec3, t0: f64, t1: f64, dt: f64) -> Self {
        Self::new(Omega::Constant(omega), t0, t1, dt)
    }

    /// Segment for `H = −B·σ`: the generator is `Ω = −B`.
    pub fn magnetic(b: Omega, t0: f64, t1: f64, dt: f64) -> Self {
        let omega = match b {
            Omega::Constant(b) => Omega::Constant(-b),
            Omega::Varying(f) => Omega::varying(move |t| -f(t)),
        };
        Self::new(omega, t0, t1, dt)
    }

    /// Number of uniform steps and their length (never longer than `dt`).
    pub fn steps(&self) -> Result<(usize, f64)> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.dt.is_finite()) {
            return Err(Error::InvalidSegment("non-finite time bounds".into()));
        }
        if !(self.t1 > self.t0) {
            return Err(Error::InvalidSegment(format!("t1 = {} must exceed t0 = {}", self.t1, self.t0)));
        }
        if !(self.dt > 0.0) {
            return Err(Error::InvalidSegment("dt must be positive".into()));
        }
        let ratio = (self.t1 - self.t0) / self.dt;
        let n = if (ratio - ratio.round()).abs() < 1e-9 * ratio.max(1.0) {
            ratio.round()
        } else {
            ratio.ceil()
        }
        .max(1.0) as usize;
        Ok((n, (self.t1 - self.t0) / n as f64))
    }

    /// Checks the segment bounds, and the lift-safety bound for constant fields.
    pub fn validate(&self) -> Result<()> {
        let (_, h) = self.steps()?;
        if let Omega::Constant(w) = self.omega {
            if !w.is_finite() {
                return Err(Error::NonFinite("omega"));
            }
            if at_lift_limit(w, h) {
                return Err(Error::StepTooLarge { angle: 2.0 * w.norm() * h });
            }
        }
        Ok(())
    }
}

/// Angular velocity of the physical ball realizing the generator `Ω`.
pub fn field_to_rotation_rate(omega: Vec3) -> Vec3 {
    omega.scale(2.0)
}

/// True when one step of length `dt` under `omega` would turn the ball by
/// π or more, beyond what the continuous lift accepts.
pub fn at_lift_limit(omega: Vec3, dt: f64) -> bool {
    2.0 * omega.norm() * dt >= MAX_STEP_ANGLE
}

/// Midpoint-exponential integration of the segment; each step is a ball
/// rotation pushed through [`BallState::step`].
pub fn evolve(state: &BallState, seg: &FieldSegment) -> Result<BallState> {
    seg.validate()?;
    let (n, h) = seg.steps()?;
    let mut s = *state;
    for k in 0..n {
        let t_mid = seg.t0 + (k as f64 + 0.5) * h;
        let w = seg.omega.at(t_mid);
        if !w.is_finite() {
            return Err(Error::NonFinite("omega"));
        }
        let Some(axis) = w.normalized() else {
            continue;
        };
        s = s.step(axis, 2.0 * w.norm() * h)?;
    }
    Ok(s)
}

/// Hermitian 2×2 Hamiltonian `a·I + v·σ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Hamiltonian {
    pub trace_half: f64,
    pub field: Vec3,
}

impl Hamiltonian {
    /// `exp(−iH h)` as a complex matrix, row-major.
    pub fn propagator(&self, h: f64) -> [[Complex64; 2]; 2] {
        let norm = self.field.norm();
        let (s, c) = (norm * h).sin_cos();
        let n = self.field.normalized().unwrap_or(Vec3::Z);
        let i = Complex64::i();
        let global = Complex64::from_polar(1.0, -self.trace_half * h);
        let sn = |x: f64| -i * s * x;
        [
            [global * (c + sn(n.z)), global * (sn(n.x) - s * n.y)],
            [global * (sn(n.x) + s * n.y), global * (c - sn(n.z))],
        ]
    }
}

/// Integrates a general Hermitian Hamiltonian directly on the amplitudes,
/// without going through the ball's rotation group.
pub fn evolve_amplitudes(
    s: &Spinor,
    h: impl Fn(f64) -> Hamiltonian,
    t0: f64,
    t1: f64,
    steps: usize,
) -> Spinor {
    let dt = (t1 - t0) / steps as f64;
    (0..steps).fold(*s, |acc, k| {
        let m = h(t0 + (k as f64 + 0.5) * dt).propagator(dt);
        Spinor {
            alpha: m[0][0] * acc.alpha + m[0][1] * acc.beta,
            beta: m[1][0] * acc.alpha + m[1][1] * acc.beta,
        }
    })
}

/// Result of comparing evolution under `H` and `H + c·I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceShift {
    /// `arg⟨ψ_H|ψ_{H+c}⟩`.
    pub phase: f64,
    /// `|ψ_{H+c} − e^{i·phase} ψ_H|`, zero when the states share a ray.
    pub ray_mismatch: f64,
}

/// Evolves `state` once on the ball under `H = Ω·σ` and once on the bare
/// amplitudes under `H + c·I`, and reports the relative global phase.
pub fn trace_shift_check(state: &BallState, seg: &FieldSegment, c: f64) -> Result<TraceShift> {
    let on_ball = evolve(state, seg)?.spinor;
    let (n, _) = seg.steps()?;
    let omega = seg.omega.clone();
    let shifted = evolve_amplitudes(
        &state.spinor,
        |t| Hamiltonian {
            trace_half: c,
            field: omega.at(t),
        },
        seg.t0,
        seg.t1,
        n,
    );
    let overlap = on_ball.inner(&shifted);
    let phase = overlap.arg();
    let ray_mismatch = shifted.distance(&on_ball.scale(Complex64::from_polar(1.0, phase)));
    Ok(TraceShift { phase, ray_mismatch })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::wrap_angle;
    use std::f64::consts::PI;

    #[test]
    fn zero_field_is_identity() {
        let s = BallState::init(Spinor::normalize(Complex64::new(0.3, 0.1), Complex64::new(0.2, -0.9)).unwrap()).unwrap();
        let out = evolve(&s, &FieldSegment::constant(Vec3::ZERO, 0.0, 5.0, 0.01)).unwrap();
        assert_eq!(out.spinor, s.spinor);
        let out = evolve(&s, &FieldSegment::magnetic(Omega::Constant(Vec3::ZERO), 0.0, 1.0, 0.1)).unwrap();
        assert_eq!(out.spinor, s.spinor);
    }

    #[test]
    fn larmor_phases() {
        let b0 = 1.5;
        let t = 2.0;
        let s0 = Spinor::normalize(Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)).unwrap();
        let seg = FieldSegment::constant(Vec3::Z.scale(b0), 0.0, t, t / 1e4);
        let out = evolve(&BallState::init(s0).unwrap(), &seg).unwrap();
        let a = s0.alpha * Complex64::from_polar(1.0, -b0 * t);
        let b = s0.beta * Complex64::from_polar(1.0, b0 * t);
        assert!((out.spinor.alpha - a).norm() < 1e-8);
        assert!((out.spinor.beta - b).norm() < 1e-8);
    }

    #[test]
    fn rotation_rate_is_twice_the_generator() {
        assert_eq!(field_to_rotation_rate(Vec3::ZERO), Vec3::ZERO);
        assert_eq!(field_to_rotation_rate(Vec3::Z.scale(0.7)), Vec3::Z.scale(1.4));
        let dt = 0.01;
        assert!(at_lift_limit(Vec3::Z.scale(PI / dt / 2.0), dt));
        assert!(!at_lift_limit(Vec3::Z.scale(0.99 * PI / dt / 2.0), dt));
    }

    #[test]
    fn magnetic_field_precesses_bloch_vector() {
        // H = −B₀σz: from +x̂ the Bloch vector turns by −2B₀t about ẑ.
        let b0 = 0.4;
        let t = 1.0;
        let x = Spinor::normalize(Complex64::new(1.0, 0.0), Complex64::new(1.0, 0.0)).unwrap();
        let seg = FieldSegment::magnetic(Omega::Constant(Vec3::Z.scale(b0)), 0.0, t, 1e-3);
        let out = evolve(&BallState::init(x).unwrap(), &seg).unwrap();
        let v = crate::state::bloch_vector(&out.spinor);
        let expect = Vec3::new((2.0 * b0 * t).cos(), -(2.0 * b0 * t).sin(), 0.0);
        assert!((v - expect).norm() < 1e-10);
    }

    #[test]
    fn segment_validation() {
        assert!(FieldSegment::constant(Vec3::Z, 1.0, 1.0, 0.1).validate().is_err());
        assert!(FieldSegment::constant(Vec3::Z, 0.0, 1.0, 0.0).validate().is_err());
        assert!(matches!(
            FieldSegment::constant(Vec3::Z.scale(100.0), 0.0, 1.0, 0.1).validate(),
            Err(Error::StepTooLarge { .. })
        ));
        let seg = FieldSegment::constant(Vec3::Z, 0.0, 1.0, 0.3);
        let (n, h) = seg.steps().unwrap();
        assert_eq!(n, 4);
        assert!((h - 0.25).abs() < 1e-15);
    }

    #[test]
    fn trace_shift_examples() {
        let s = BallState::init(Spinor::normalize(Complex64::new(0.5, 0.5), Complex64::new(0.1, 0.7)).unwrap()).unwrap();
        let seg = FieldSegment::constant(Vec3::new(0.3, -0.2, 0.5), 0.0, 1.0, 1e-3);
        let z = trace_shift_check(&s, &seg, 0.0).unwrap();
        assert!(z.phase.abs() < 1e-10 && z.ray_mismatch < 1e-10);
        let one = trace_shift_check(&s, &seg, 1.0).unwrap();
        assert!((one.phase + 1.0).abs() < 1e-8 && one.ray_mismatch < 1e-8);
        let full = trace_shift_check(&s, &seg, 2.0 * PI).unwrap();
        assert!(wrap_angle(full.phase).abs() < 1e-8);
    }

    #[test]
    fn segment_json() {
        let seg = FieldSegment::constant(Vec3::Z, 0.0, 1.0, 0.5);
        let json = serde_json::to_string(&seg).unwrap();
        assert_eq!(json, r#"{"omega":[0.0,0.0,1.0],"t0":0.0,"t1":1.0,"dt":0.5}"#);
        let back: FieldSegment = serde_json::from_str(&json).unwrap();
        assert!(matches!(back.omega, Omega::Constant(v) if v == Vec3::Z));
        let varying = FieldSegment::new(Omega::varying(|_| Vec3::Z), 0.0, 1.0, 0.5);
        assert!(serde_json::to_string(&varying).is_err());
    }
}
