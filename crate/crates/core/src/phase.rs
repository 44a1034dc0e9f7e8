//! Geodesic (parallel-transport) motions of the principal axis, signed
//! spherical areas, and Berry phases read off the lifted spinor.
//!
//! Area sign convention: a loop circulating counterclockwise when seen from
//! outside the sphere encloses positive solid angle. With it, the phase
//! acquired by the state aligned with the loop start is `−Ω/2`, and `+Ω/2`
//! for the anti-aligned state.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lift::{classify_endpoints, BallState, Frame, DEFAULT_CLOSURE_TOL};
use crate::rotor::{Spinor, Vec3};
use crate::state::wrap_angle;

/// Samples per quarter turn of arc used when no count is given.
pub const DEFAULT_SAMPLES_PER_QUARTER: usize = 90;

pub const MIN_SAMPLES_PER_EDGE: usize = 8;

/// Agreement tolerance between the lifted phase and the area prediction.
pub const BERRY_TOL: f64 = 1e-6;

const ANTIPODAL_TOL: f64 = 1e-6;

/// World-frame increments carrying `from` to `to` along the great circle,
/// with no spin about the moving axis.
pub fn geodesic_increments(from: Vec3, to: Vec3, steps: usize) -> Result<Vec<(Vec3, f64)>> {
    let from = from.require_unit()?;
    let to = to.require_unit()?;
    if steps == 0 {
        return Err(Error::InvalidLoop("geodesic needs at least one step".into()));
    }
    if (from + to).norm() <= ANTIPODAL_TOL {
        return Err(Error::AmbiguousGeodesic);
    }
    let cross = from.cross(to);
    let angle = cross.norm().atan2(from.dot(to));
    let axis = cross.normalized().unwrap_or_else(|| from.any_orthogonal());
    let per_step = angle / steps as f64;
    Ok(vec![(axis, per_step); steps])
}

/// Closed polygon of great-circle arcs; the last vertex connects back to
/// the first.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicLoop {
    pub vertices: Vec<Vec3>,
    #[serde(default = "default_samples")]
    pub samples_per_edge: usize,
}

fn default_samples() -> usize {
    DEFAULT_SAMPLES_PER_QUARTER
}

impl GeodesicLoop {
    pub fn new(vertices: Vec<Vec3>) -> Self {
        GeodesicLoop {
            vertices,
            samples_per_edge: DEFAULT_SAMPLES_PER_QUARTER,
        }
    }

    /// The loop traversed in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut vertices = self.vertices.clone();
        if vertices.len() > 1 {
            vertices[1..].reverse();
        }
        GeodesicLoop {
            vertices,
            samples_per_edge: self.samples_per_edge,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.samples_per_edge < MIN_SAMPLES_PER_EDGE {
            return Err(Error::InvalidLoop(format!(
                "samples_per_edge must be at least {MIN_SAMPLES_PER_EDGE}"
            )));
        }
        if self.vertices.is_empty() {
            return Err(Error::InvalidLoop("no vertices".into()));
        }
        for v in &self.vertices {
            v.require_unit()?;
        }
        for (a, b) in self.edges() {
            if (a + b).norm() <= ANTIPODAL_TOL {
                return Err(Error::AmbiguousGeodesic);
            }
        }
        Ok(())
    }

    /// Consecutive vertex pairs including the closing edge.
    pub fn edges(&self) -> impl Iterator<Item = (Vec3, Vec3)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// All increments of the loop, edge after edge.
    pub fn increments(&self) -> Result<Vec<(Vec3, f64)>> {
        self.validate()?;
        let mut out = Vec::with_capacity(self.vertices.len() * self.samples_per_edge);
        for (a, b) in self.edges() {
            out.extend(geodesic_increments(a, b, self.samples_per_edge)?);
        }
        Ok(out)
    }
}

/// Signed solid angle of the spherical triangle `(a, b, c)`.
pub fn triangle_solid_angle(a: Vec3, b: Vec3, c: Vec3) -> f64 {
    let det = a.dot(b.cross(c));
    let denom = 1.0 + a.dot(b) + b.dot(c) + c.dot(a);
    2.0 * det.atan2(denom)
}

/// Signed area enclosed by the loop, by fan triangulation from the first
/// vertex. Does not touch the lifting code.
pub fn solid_angle(lp: &GeodesicLoop) -> f64 {
    let v = &lp.vertices;
    let mut distinct: Vec<Vec3> = Vec::with_capacity(v.len());
    for &p in v {
        if distinct.iter().all(|q| (p - *q).norm() > 1e-12) {
            distinct.push(p);
        }
    }
    if distinct.len() < 3 {
        return 0.0;
    }
    (1..v.len() - 1)
        .map(|i| triangle_solid_angle(v[0], v[i], v[i + 1]))
        .sum()
}

/// Which basis state relative to the loop start is transported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Spin {
    /// Aligned with the loop start.
    #[default]
    Up,
    /// Anti-aligned with the loop start.
    Down,
}

impl Spin {
    fn basis(self) -> Spinor {
        match self {
            Spin::Up => Spinor::UP,
            Spin::Down => Spinor::DOWN,
        }
    }

    fn sign(self) -> f64 {
        match self {
            Spin::Up => -1.0,
            Spin::Down => 1.0,
        }
    }
}

/// Outcome of transporting a basis state around a loop.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseReport {
    /// `arg⟨ψ_initial|ψ_final⟩`, in `(−π, π]`.
    pub overlap_phase: f64,
    pub solid_angle: f64,
    /// `∓Ω/2` wrapped to `(−π, π]`.
    pub berry_prediction: f64,
    pub tolerance: f64,
    pub agrees: bool,
    /// Homotopic phase, present when the whole orientation came back.
    pub gamma: Option<f64>,
}

impl PhaseReport {
    pub fn discrepancy(&self) -> f64 {
        wrap_angle(self.overlap_phase - self.berry_prediction).abs()
    }
}

/// Ball at rest displaying `spin`'s basis state, then carried along the
/// geodesic from ẑ to `start` (a half turn about x̂ when `start = −ẑ`).
pub fn prepare_at(start: Vec3, spin: Spin) -> Result<BallState> {
    let start = start.require_unit()?;
    let ball = BallState::init(spin.basis())?;
    let increments = if (start + Vec3::Z).norm() <= ANTIPODAL_TOL {
        vec![(Vec3::X, PI / DEFAULT_SAMPLES_PER_QUARTER as f64 / 2.0); 2 * DEFAULT_SAMPLES_PER_QUARTER]
    } else {
        let arc = Vec3::Z.cross(start).norm().atan2(start.z);
        let steps = samples_for_arc(arc);
        geodesic_increments(Vec3::Z, start, steps)?
    };
    ball.follow(Frame::World, &increments)
}

fn samples_for_arc(arc: f64) -> usize {
    ((arc.abs() / (PI / 2.0)) * DEFAULT_SAMPLES_PER_QUARTER as f64).ceil().max(1.0) as usize
}

fn report(start: &BallState, end: &BallState, omega: f64, spin: Spin) -> Result<PhaseReport> {
    let overlap = start.spinor.inner(&end.spinor);
    if overlap.norm() < 1e-9 {
        return Err(Error::UndefinedPhase);
    }
    let overlap_phase = wrap_angle(overlap.arg());
    let berry_prediction = wrap_angle(spin.sign() * omega / 2.0);
    let gamma = classify_endpoints(start, end, DEFAULT_CLOSURE_TOL)
        .ok()
        .map(|c| c.gamma);
    let mut r = PhaseReport {
        overlap_phase,
        solid_angle: omega,
        berry_prediction,
        tolerance: BERRY_TOL,
        agrees: false,
        gamma,
    };
    r.agrees = r.discrepancy() < r.tolerance;
    Ok(r)
}

/// Transports the chosen basis state around `lp` by lifting the geodesic
/// motion, and compares the acquired phase with the area prediction.
pub fn berry_experiment(lp: &GeodesicLoop, spin: Spin) -> Result<PhaseReport> {
    let increments = lp.increments()?;
    let start = prepare_at(lp.vertices[0], spin)?;
    let end = start.follow(Frame::World, &increments)?;
    let mismatch = (end.principal_axis - start.principal_axis).norm();
    if mismatch > DEFAULT_CLOSURE_TOL {
        return Err(Error::LoopNotClosed {
            mismatch,
            tol: DEFAULT_CLOSURE_TOL,
        });
    }
    report(&start, &end, solid_angle(lp), spin)
}

fn latitude_start(theta0: f64) -> Vec3 {
    Vec3::new(theta0.sin(), 0.0, theta0.cos())
}

/// Increments moving the principal axis once around the circle of polar
/// angle `theta0` (counterclockwise about ẑ), starting at azimuth 0.
///
/// Each step turns about ẑ and then about the current axis by
/// `−cos θ₀` of that amount, which cancels the spin the ẑ rotation would
/// otherwise give the frame about the principal axis. Two increments are
/// emitted per step.
pub fn parallel_transport_correction(theta0: f64, steps: usize) -> Result<Vec<(Vec3, f64)>> {
    if !(theta0 > 0.0 && theta0 < PI) {
        return Err(Error::InvalidLoop(format!(
            "latitude polar angle {theta0} must lie strictly between the poles"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidLoop("latitude needs at least one step".into()));
    }
    let d = TAU / steps as f64;
    let twist = -theta0.cos() * d;
    let p0 = latitude_start(theta0);
    let mut out = Vec::with_capacity(2 * steps);
    for k in 0..steps {
        let (s, c) = (k as f64 * d).sin_cos();
        let p = Vec3::new(c * p0.x - s * p0.y, s * p0.x + c * p0.y, p0.z);
        out.push((p, twist));
        out.push((Vec3::Z, d));
    }
    Ok(out)
}

/// Berry phase around the circle of polar angle `theta0`, compared with the
/// spherical cap area `2π(1 − cos θ₀)`.
pub fn latitude_experiment(theta0: f64, steps: usize, spin: Spin) -> Result<PhaseReport> {
    let increments = parallel_transport_correction(theta0, steps)?;
    let start = prepare_at(latitude_start(theta0), spin)?;
    let end = start.follow(Frame::World, &increments)?;
    let cap = TAU * (1.0 - theta0.cos());
    report(&start, &end, cap, spin)
}
