//! A software spinorial ball.
//!
//! The ball's orientation is tracked in SO(3) while its history is lifted
//! continuously to SU(2); the lifted element acts on a two-component spinor
//! that the ball shows as two colors (pentagons for `α`, hexagons for `β`).
//! On top of that sit Bloch/Hopf coordinates, geometric and homotopic
//! phases, Hamiltonian evolution, and projective measurement.
//!
//! ```
//! use spinball::{BallState, Vec3};
//!
//! let mut ball = BallState::default();
//! for _ in 0..360 {
//!     ball = ball.step(Vec3::X, std::f64::consts::PI / 180.0).unwrap();
//! }
//! // a full physical turn negates the displayed state
//! assert!((ball.spinor.alpha.re + 1.0).abs() < 1e-9);
//! ```

pub mod dynamics;
pub mod error;
pub mod lift;
pub mod measurement;
pub mod phase;
pub mod rotor;
pub mod session;
pub mod state;

pub use dynamics::{evolve, FieldSegment, Omega};
pub use error::{Error, Result};
pub use lift::{classify_loop, lift_path, BallState, Frame, HomotopyClass};
pub use measurement::{measure_axis, measure_z, statistics, MeasurementRecord, SessionRng};
pub use phase::{berry_experiment, solid_angle, GeodesicLoop, PhaseReport, Spin};
pub use rotor::{So3, Spinor, Su2, Vec3};
pub use session::{Session, SessionConfig, SessionEvent, TraceFrame};
pub use state::{bloch_point, hopf_coordinates, panel_frame, BlochPoint, HopfCoordinates, PanelFrame};
