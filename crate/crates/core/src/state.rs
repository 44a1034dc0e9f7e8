//! Reading a spinor: Bloch point, Hopf (Euler) coordinates and the two panel
//! colors shown on the ball.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::rotor::{Spinor, Vec3};

/// Point on the Bloch sphere, `θ ∈ [0, π]`, `φ ∈ [0, 2π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochPoint {
    pub theta: f64,
    pub phi: f64,
    pub unit_vector: Vec3,
}

impl BlochPoint {
    /// Builds the point from a direction; `φ = 0` at the poles.
    pub fn from_vector(v: Vec3) -> BlochPoint {
        let u = v.normalized().unwrap_or(Vec3::Z);
        let rho = u.x.hypot(u.y);
        let theta = rho.atan2(u.z);
        let phi = if rho == 0.0 { 0.0 } else { wrap_positive(u.y.atan2(u.x), TAU) };
        BlochPoint {
            theta,
            phi,
            unit_vector: u,
        }
    }

    pub fn from_angles(theta: f64, phi: f64) -> BlochPoint {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        BlochPoint::from_vector(Vec3::new(cp * st, sp * st, ct))
    }
}

/// Bloch point together with the position along its fiber.
///
/// `fiber_phase` is the intrinsic angle `δ` of the Euler parametrization;
/// because the spinor turns by half of it, the fiber closes after `δ = 4π`
/// and the phase is reported in `[0, 4π)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HopfCoordinates {
    pub base: BlochPoint,
    pub fiber_phase: f64,
}

fn wrap_positive(x: f64, period: f64) -> f64 {
    let r = x.rem_euclid(period);
    if r >= period {
        0.0
    } else {
        r
    }
}

/// Wraps an angle into `(−π, π]`.
pub fn wrap_angle(x: f64) -> f64 {
    let r = (x + PI).rem_euclid(TAU) - PI;
    if r <= -PI {
        r + TAU
    } else {
        r
    }
}

/// Expectation values `(⟨σx⟩, ⟨σy⟩, ⟨σz⟩)`; unit length for normalized input.
pub fn bloch_vector(s: &Spinor) -> Vec3 {
    let c = s.alpha.conj() * s.beta;
    Vec3::new(2.0 * c.re, 2.0 * c.im, s.alpha.norm_sqr() - s.beta.norm_sqr())
}

/// Bloch point of `s`. Blind to the global phase.
pub fn bloch_point(s: &Spinor) -> BlochPoint {
    BlochPoint::from_vector(bloch_vector(s))
}

/// `sign · (e^{−i(δ+φ)/2} cos θ/2, e^{−i(δ−φ)/2} sin θ/2)`.
pub fn spinor_from_euler(theta: f64, phi: f64, delta: f64, sign: i8) -> Spinor {
    let sign = if sign < 0 { -1.0 } else { 1.0 };
    let (sh, ch) = (0.5 * theta).sin_cos();
    Spinor {
        alpha: Complex64::from_polar(sign * ch, -0.5 * (delta + phi)),
        beta: Complex64::from_polar(sign * sh, -0.5 * (delta - phi)),
    }
}

/// Bloch point and fiber phase, chosen so that
/// `spinor_from_euler(θ, φ, δ, +1)` rebuilds `s`.
pub fn hopf_coordinates(s: &Spinor) -> HopfCoordinates {
    let base = bloch_point(s);
    let delta = if s.alpha.norm() >= s.beta.norm() {
        -2.0 * s.alpha.arg() - base.phi
    } else {
        base.phi - 2.0 * s.beta.arg()
    };
    HopfCoordinates {
        base,
        fiber_phase: wrap_positive(delta, 2.0 * TAU),
    }
}

pub type Rgb = [u8; 3];

/// Color of a complex number in the closed unit disk: hue follows the
/// argument (0 → red, then yellow, green, cyan, blue, magenta), full
/// saturation, brightness linear in the modulus. Moduli above 1 are clamped.
pub fn color_encode(z: Complex64) -> Rgb {
    // The brightest channel is quantized first and the middle channel as a
    // fraction of it, so the decoded hue only carries the error of one
    // rounding: at most 30/max degrees.
    let v = z.norm().min(1.0);
    let top = if v > 0.0 { (v * 255.0).round() } else { 0.0 };
    if top == 0.0 {
        return [0, 0, 0];
    }
    let hue = wrap_positive(z.arg(), TAU) / TAU * 6.0;
    let sector = (hue.floor() as usize).min(5);
    let f = hue - sector as f64;
    let rising = (top * f).round();
    let falling = (top * (1.0 - f)).round();
    let (r, g, b) = match sector {
        0 => (top, rising, 0.0),
        1 => (falling, top, 0.0),
        2 => (0.0, top, rising),
        3 => (0.0, falling, top),
        4 => (rising, 0.0, top),
        _ => (top, 0.0, falling),
    };
    [r as u8, g as u8, b as u8]
}

/// Smallest modulus whose color decodes with hue error below 2 degrees.
pub const HUE_EXACT_MODULUS: f64 = 15.5 / 255.0;

/// Inverse of [`color_encode`] up to 8-bit quantization.
pub fn color_decode(rgb: Rgb) -> Complex64 {
    let [r, g, b] = rgb.map(f64::from);
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    if max == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let span = max - min;
    let sector = if span == 0.0 {
        0.0
    } else if max == r {
        ((g - b) / span).rem_euclid(6.0)
    } else if max == g {
        (b - r) / span + 2.0
    } else {
        (r - g) / span + 4.0
    };
    Complex64::from_polar(max / 255.0, sector / 6.0 * TAU)
}

/// What the ball displays: pentagons carry `α`, hexagons carry `β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PanelFrame {
    #[serde(rename = "pentagon")]
    pub pentagon_rgb: Rgb,
    #[serde(rename = "hexagon")]
    pub hexagon_rgb: Rgb,
    pub alpha: Complex64,
    pub beta: Complex64,
}

pub fn panel_frame(s: &Spinor) -> PanelFrame {
    PanelFrame {
        pentagon_rgb: color_encode(s.alpha),
        hexagon_rgb: color_encode(s.beta),
        alpha: s.alpha,
        beta: s.beta,
    }
}
