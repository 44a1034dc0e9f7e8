use thiserror::Error;

/// Errors raised by the ball model.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("axis must be a unit vector (|axis| = {norm})")]
    NonUnitAxis { norm: f64 },

    #[error("spinor must be normalized (|alpha|^2 + |beta|^2 = {norm_sq})")]
    UnnormalizedSpinor { norm_sq: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(&'static str),

    #[error("relative rotation angle {angle} is within tolerance of pi; the lift is ambiguous")]
    AmbiguousRelativeRotation { angle: f64 },

    #[error("step angle {angle} is too large for a continuous lift (must be below pi)")]
    StepTooLarge { angle: f64 },

    #[error("loop is not closed: orientation mismatch {mismatch} exceeds tolerance {tol}")]
    LoopNotClosed { mismatch: f64, tol: f64 },

    #[error("geodesic between antipodal points is ambiguous")]
    AmbiguousGeodesic,

    #[error("final state is orthogonal to the initial one; overlap phase undefined")]
    UndefinedPhase,

    #[error("invalid loop: {0}")]
    InvalidLoop(String),

    #[error("invalid field segment: {0}")]
    InvalidSegment(String),

    #[error("invalid IMU log: {0}")]
    InvalidImu(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("event {index}: {source}")]
    Event {
        index: usize,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn at_event(self, index: usize) -> Self {
        Error::Event {
            index,
            source: Box::new(self),
        }
    }

    /// True for errors caused by invalid input, as opposed to failures
    /// while executing a valid request.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Event { source, .. } => source.is_validation(),
            Error::UndefinedPhase | Error::LoopNotClosed { .. } => false,
            _ => true,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
