use thiserror::Error;

/// Errors raised by geometry, energy and experiment routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("non-finite coordinate in input")]
    NonFinite,

    #[error("coincident points: {0}")]
    CoincidentPoints(String),

    #[error("collinear points: {0}")]
    Collinear(String),

    #[error("index pair ({i}, {j}) is not admissible for m = {m}: cyclic distance must exceed 1")]
    AdjacentPair { i: usize, j: usize, m: usize },

    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("degenerate configuration at pair ({i}, {j}): {reason}")]
    DegeneratePair { i: usize, j: usize, reason: String },

    #[error("edges {a} and {b} touch (minimal distance 0); polygon is not simple")]
    SelfIntersecting { a: usize, b: usize },

    #[error("pole hit by primitive {primitive} at point {point:?}")]
    PoleHit { primitive: usize, point: Vec<f64> },

    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature failure: {0}")]
    Quadrature(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Broad failure class, used to derive process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    Input,
    Geometry,
    Pole,
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::PoleHit { .. } => ErrorClass::Pole,
            Error::CoincidentPoints(_)
            | Error::Collinear(_)
            | Error::AdjacentPair { .. }
            | Error::DegeneratePair { .. }
            | Error::SelfIntersecting { .. }
            | Error::Quadrature(_) => ErrorClass::Geometry,
            Error::DimensionMismatch { .. }
            | Error::NonFinite
            | Error::IndexOutOfRange { .. }
            | Error::InvalidPolygon(_)
            | Error::InvalidParameter(_)
            | Error::Parse(_) => ErrorClass::Input,
        }
    }
}
