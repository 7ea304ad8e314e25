use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty vertex list")]
    EmptyVertexList,

    #[error("malformed constraint: {0}")]
    MalformedConstraint(String),

    #[error("polytope is unbounded along coordinate {coordinate}")]
    Unbounded { coordinate: usize },

    #[error("sources are affinely dependent; the map is under-determined")]
    UnderDetermined,

    #[error("pair {index} is inconsistent with the map fixed by the other pairs")]
    InconsistentPair { index: usize },

    #[error("normalization row must be (0, ..., 0, 1)")]
    NotNormalizationPreserving,

    #[error("evengon needs k >= 2, got {0}")]
    InvalidEvengon(usize),

    #[error("evengon k = {0} has irrational vertex coordinates; use float mode")]
    InexactCoordinates(usize),

    #[error("empty factor list")]
    EmptyFactors,

    #[error("operation needs a single-system model")]
    NotSingleSystem,

    #[error("invalid measurement: {0}")]
    InvalidMeasurement(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid probability vector: {0}")]
    InvalidProbabilityVector(String),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("channel is not admissible on this model")]
    Inadmissible,

    #[error("enumeration for k = {k} exceeds the resource cap (k <= {cap}); pass an override to force it")]
    EnumerationCap { k: usize, cap: usize },

    #[error("encoding {index} lies outside the declared channel set")]
    EncodingOutsideSet { index: usize },

    #[error("empty channel set")]
    EmptyChannelSet,

    #[error("value outside domain: {0}")]
    Domain(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
