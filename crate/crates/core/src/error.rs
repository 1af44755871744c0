use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("plane dimensions {width}x{height} must be even")]
    OddDimensions { width: usize, height: usize },

    #[error("image has no pixels")]
    EmptyImage,

    #[error("sample {value} at index {index} is outside [0, 1]")]
    SampleOutOfRange { index: usize, value: f64 },

    #[error("feature mask selects no components")]
    EmptyMask,

    #[error("every feature has already been visited")]
    NoCandidates,

    #[error("image id {0:?} is not in the index")]
    UnknownImage(String),

    #[error("duplicate image id {0:?}")]
    DuplicateImage(String),

    #[error("record {id:?} has a non-finite feature at component {component}")]
    NonFiniteFeature { id: String, component: usize },

    #[error("degenerate index: {0}")]
    DegenerateIndex(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("fitness evaluation failed: {0}")]
    Fitness(String),
}
