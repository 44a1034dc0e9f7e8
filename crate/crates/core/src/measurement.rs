//! Projective measurement of the displayed spinor.
//!
//! Randomness comes from [`SessionRng`], a ChaCha8 generator keyed by a
//! 64-bit seed. Independent consumers of one seed use distinct ChaCha
//! streams: a live or scripted session draws from stream
//! [`SESSION_STREAM`], batch statistics from [`STATISTICS_STREAM`] and,
//! when split across workers, from `STATISTICS_STREAM + worker`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::lift::BallState;
use crate::rotor::{Spinor, Su2, Vec3};
use crate::state::bloch_vector;

pub const SESSION_STREAM: u64 = 0;
pub const STATISTICS_STREAM: u64 = 1;

/// Seeded uniform source on `[0, 1)` that counts its draws.
#[derive(Debug, Clone)]
pub struct SessionRng {
    rng: ChaCha8Rng,
    draws: u64,
}

impl SessionRng {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        SessionRng { rng, draws: 0 }
    }

    pub fn draw(&mut self) -> f64 {
        self.draws += 1;
        self.rng.gen::<f64>()
    }

    /// Number of draws consumed so far.
    pub fn position(&self) -> u64 {
        self.draws
    }
}

/// One press of the measurement button.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasurementRecord {
    pub axis: Vec3,
    /// +1 for the state along `axis`, −1 for the opposite one.
    pub outcome: i8,
    pub p_up: f64,
    pub draw: f64,
    pub post_state: Spinor,
    /// Index of the draw within its generator stream.
    pub seed_position: u64,
}

/// Born probability of the `+axis` outcome from the projector
/// `(1 + axis·σ)/2`.
pub fn born_probability(s: &Spinor, axis: Vec3) -> f64 {
    (0.5 * (1.0 + axis.dot(bloch_vector(s)))).clamp(0.0, 1.0)
}

/// Up outcome iff `draw < p_up`; the surviving amplitude keeps its phase.
fn collapse(s: &Spinor, draw: f64) -> (i8, f64, Spinor) {
    let p_up = s.alpha.norm_sqr().clamp(0.0, 1.0);
    let zero = Complex64::new(0.0, 0.0);
    if draw < p_up {
        (
            1,
            p_up,
            Spinor {
                alpha: s.alpha / s.alpha.norm(),
                beta: zero,
            },
        )
    } else {
        (
            -1,
            p_up,
            Spinor {
                alpha: zero,
                beta: s.beta / s.beta.norm(),
            },
        )
    }
}

/// Measurement along ẑ. The orientation is kept; the lift restarts from the
/// collapsed state.
pub fn measure_z(state: &BallState, rng: &mut SessionRng) -> (MeasurementRecord, BallState) {
    let draw = rng.draw();
    let (outcome, p_up, post) = collapse(&state.spinor, draw);
    let record = MeasurementRecord {
        axis: Vec3::Z,
        outcome,
        p_up,
        draw,
        post_state: post,
        seed_position: rng.position() - 1,
    };
    (record, state.reanchored(post))
}

/// Rotation `S` taking ẑ to `axis` along the meridian; a half turn about x̂
/// for `axis = −ẑ`.
pub fn detector_rotation(axis: Vec3) -> Result<Su2> {
    let axis = axis.require_unit()?;
    let cross = Vec3::Z.cross(axis);
    match cross.normalized() {
        Some(k) if cross.norm() > 1e-12 => Su2::from_axis_angle(k, cross.norm().atan2(axis.z)),
        _ if axis.z > 0.0 => Ok(Su2::IDENTITY),
        _ => Su2::from_axis_angle(Vec3::X, std::f64::consts::PI),
    }
}

/// Measurement along `axis`: rotate by `S†`, measure along ẑ, rotate back
/// by `S`.
pub fn measure_axis(
    state: &BallState,
    axis: Vec3,
    rng: &mut SessionRng,
) -> Result<(MeasurementRecord, BallState)> {
    let s = detector_rotation(axis)?;
    let rotated = s.inverse().apply(&state.spinor);
    let draw = rng.draw();
    let (outcome, p_up, collapsed) = collapse(&rotated, draw);
    let post = s.apply(&collapsed);
    let record = MeasurementRecord {
        axis,
        outcome,
        p_up,
        draw,
        post_state: post,
        seed_position: rng.position() - 1,
    };
    Ok((record, state.reanchored(post)))
}

/// Empirical outcome frequency against the Born probability.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyReport {
    pub axis: Vec3,
    pub trials: u64,
    pub ups: u64,
    pub p_hat: f64,
    pub p_expected: f64,
    pub std_error: f64,
    /// Five standard errors.
    pub bound: f64,
    pub pass: bool,
    pub seed: u64,
}

/// Repeats the rotate–measure–derotate protocol `trials` times on fresh
/// copies of `state`.
pub fn statistics(state: &Spinor, axis: Vec3, trials: u64, seed: u64) -> Result<FrequencyReport> {
    let ball = BallState::init(*state)?;
    let trials = trials.max(1);
    let mut rng = SessionRng::new(seed, STATISTICS_STREAM);
    let mut ups = 0;
    for _ in 0..trials {
        let (rec, _) = measure_axis(&ball, axis, &mut rng)?;
        if rec.outcome > 0 {
            ups += 1;
        }
    }
    let p_hat = ups as f64 / trials as f64;
    let p_expected = born_probability(state, axis);
    let std_error = (p_expected * (1.0 - p_expected) / trials as f64).sqrt();
    let bound = 5.0 * std_error;
    let pass = (p_hat - p_expected).abs() <= bound.max(1e-12);
    Ok(FrequencyReport {
        axis,
        trials,
        ups,
        p_hat,
        p_expected,
        std_error,
        bound,
        pass,
        seed,
    })
}
