use thiserror::Error;

/// Errors raised by the numerical core.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum DgError {
    #[error("polynomial degree must be at least 1, got {0}")]
    InvalidDegree(usize),

    #[error("length mismatch: expected {expected} values, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("adiabatic coefficient must exceed 1, got {0}")]
    InvalidGamma(f64),

    #[error("invalid state: non-positive {quantity} ({value:e})")]
    InvalidState { quantity: &'static str, value: f64 },

    #[error("invalid state in element {element}, node {node}: {source}")]
    StateAt {
        element: usize,
        node: usize,
        #[source]
        source: Box<DgError>,
    },

    #[error("log mean requires positive arguments, got ({0:e}, {1:e})")]
    NonPositiveMean(f64, f64),

    #[error("degenerate wave speed estimate: SL = SR = {0:e}")]
    DegenerateWaveSpeeds(f64),

    #[error("mesh element counts must be at least 1, got {0:?}")]
    InvalidMesh([usize; 3]),

    #[error("element index {index} out of range for {count} elements")]
    ElementOutOfRange { index: usize, count: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("non-finite solution at step {step}, t = {time:e}")]
    NonFinite { step: usize, time: f64 },

    #[error("invalid time step controls: {0}")]
    TimeControls(String),

    #[error("EOC requires at least two positive errors: {0}")]
    Eoc(String),

    #[error("level {level}: {source}")]
    AtLevel {
        level: usize,
        #[source]
        source: Box<DgError>,
    },
}

impl DgError {
    pub(crate) fn at_node(self, element: usize, node: usize) -> DgError {
        DgError::StateAt {
            element,
            node,
            source: Box::new(self),
        }
    }
}
