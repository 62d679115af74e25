use thiserror::Error;

/// Errors raised by the geometry, quadrature and energy routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid dimension n = {n}: {reason}")]
    InvalidDimension { n: usize, reason: &'static str },

    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("point lies on the projection pole (angular distance {distance:e}); stereographic chart is singular there")]
    StereographicSingularity { distance: f64 },

    #[error("degenerate bubble: beta = {beta} must exceed 1")]
    DegenerateBubble { beta: f64 },

    #[error("bubble too concentrated: beta - 1 = {beta_minus_one:e} is below 1e-8")]
    BubbleTooConcentrated { beta_minus_one: f64 },

    #[error("coincident orbit points {i} and {j} (distance {distance:e}); interaction power is singular")]
    CoincidentPoints { i: usize, j: usize, distance: f64 },

    #[error("assumption (A1) violated: orbit has {size} points, group order is {order}")]
    IsotropyViolation { size: usize, order: usize },

    #[error("orbit is not free (single fixed point)")]
    OrbitNotFree,

    #[error("group is not closed: {0}")]
    NotClosed(String),

    #[error("non-finite integrand value {value} at node {node:?}")]
    NonFiniteIntegrand { value: f64, node: Vec<f64> },

    #[error("quadrature calibration failed: integral of 1 is {got}, expected {expected} (tolerance {tolerance:e})")]
    Calibration { got: f64, expected: f64, tolerance: f64 },

    #[error("pair ({i}, {j}): {source}")]
    Pair {
        i: usize,
        j: usize,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}
