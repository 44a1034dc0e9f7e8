//! Browser bindings for the spinball model. Every function returns JSON so
//! the page never recomputes physics: it only draws what comes back.

use num_complex::Complex64;
use spinball::phase::{berry_experiment, latitude_experiment, GeodesicLoop, Spin};
use spinball::session::{Session, SessionConfig, SessionEvent, TraceFrame};
use spinball::{measurement, Spinor, Vec3};
use wasm_bindgen::prelude::*;

/// Per-event angle cap for drag gestures, well below the lift bound.
pub const MAX_DRAG_STEP: f64 = 0.05;

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("model types serialize")
}

fn axis(x: f64, y: f64, z: f64) -> Result<Vec3, String> {
    Vec3::new(x, y, z)
        .normalized()
        .ok_or_else(|| "axis must be nonzero".to_string())
}

fn spin(up: bool) -> Spin {
    if up {
        Spin::Up
    } else {
        Spin::Down
    }
}

/// A live ball: drag to rotate, press to measure.
#[wasm_bindgen]
pub struct Ball {
    session: Session,
    seed: u64,
}

#[wasm_bindgen]
impl Ball {
    #[wasm_bindgen(constructor)]
    pub fn new(seed: u64) -> Ball {
        let config = SessionConfig {
            seed,
            ..SessionConfig::default()
        };
        Ball {
            session: Session::new(config).expect("default spinor is valid"),
            seed,
        }
    }

    /// Current frame as JSON.
    pub fn frame(&self) -> String {
        json(&self.session.frame())
    }

    /// Turns the ball by `angle` about a world axis, in as many sub-events
    /// as the drag cap requires. Returns the last frame.
    pub fn rotate(&mut self, x: f64, y: f64, z: f64, angle: f64) -> Result<String, String> {
        let axis = axis(x, y, z)?;
        if !angle.is_finite() {
            return Err("angle must be finite".into());
        }
        let pieces = (angle.abs() / MAX_DRAG_STEP).ceil().max(1.0) as usize;
        let mut last: Option<TraceFrame> = None;
        for _ in 0..pieces {
            let ev = SessionEvent::Rotate {
                axis,
                angle: angle / pieces as f64,
                steps: Some(1),
            };
            last = Some(self.session.apply(&ev).map_err(|e| e.to_string())?);
        }
        Ok(json(&last.expect("at least one piece")))
    }

    pub fn measure(&mut self, x: f64, y: f64, z: f64) -> Result<String, String> {
        let ev = SessionEvent::Measure { axis: axis(x, y, z)? };
        self.session.apply(&ev).map(|f| json(&f)).map_err(|e| e.to_string())
    }

    pub fn reset(&mut self) {
        *self = Ball::new(self.seed);
    }
}

/// Berry phase around the circle of polar angle `theta` (radians).
#[wasm_bindgen]
pub fn berry_latitude(theta: f64, up: bool, samples: usize) -> Result<String, String> {
    latitude_experiment(theta, samples, spin(up))
        .map(|r| json(&r))
        .map_err(|e| e.to_string())
}

/// Berry phase around the geodesic triangle ẑ → b → c, vertices given as
/// flat `[bx, by, bz, cx, cy, cz]`.
#[wasm_bindgen]
pub fn berry_triangle(vertices: &[f64], up: bool) -> Result<String, String> {
    let [bx, by, bz, cx, cy, cz] = <[f64; 6]>::try_from(vertices).map_err(|_| "expected six numbers".to_string())?;
    let lp = GeodesicLoop::new(vec![Vec3::Z, axis(bx, by, bz)?, axis(cx, cy, cz)?]);
    berry_experiment(&lp, spin(up))
        .map(|r| json(&r))
        .map_err(|e| e.to_string())
}

/// Rotate-measure-derotate statistics for the state `(a, b)` along an axis.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn measurement_stats(
    a_re: f64,
    a_im: f64,
    b_re: f64,
    b_im: f64,
    x: f64,
    y: f64,
    z: f64,
    trials: u32,
    seed: u64,
) -> Result<String, String> {
    let state = Spinor::normalize(Complex64::new(a_re, a_im), Complex64::new(b_re, b_im)).map_err(|e| e.to_string())?;
    measurement::statistics(&state, axis(x, y, z)?, trials as u64, seed)
        .map(|r| json(&r))
        .map_err(|e| e.to_string())
}
