use std::path::PathBuf;

use thiserror::Error;

use crate::hand::Finger;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the library can report.
///
/// Variants are grouped loosely by the module that raises them; the CLI and
/// the service map [`Error::kind`] onto their one-line / JSON error shapes.
#[derive(Debug, Error)]
pub enum Error {
    // hand model
    #[error("duplicate joint name {0:?}")]
    DuplicateJoint(String),
    #[error("finger {0} declares a palm frame but has no joints")]
    EmptyFinger(Finger),
    #[error("finger {0} has joints but no palm frame")]
    MissingPalmFrame(Finger),
    #[error("joint {name:?}: limit_lo {lo} must be below limit_hi {hi}")]
    InvalidLimits { name: String, lo: f64, hi: f64 },
    #[error("joint {name:?}: link_length {length} must be positive")]
    InvalidLinkLength { name: String, length: f64 },
    #[error("hand model has no joints")]
    EmptyModel,
    #[error("unknown joint {0:?}")]
    UnknownJoint(String),
    #[error("finger set is empty")]
    EmptyFingerSet,

    // shapes
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("joint index {index} out of bounds for {width} joints")]
    IndexOutOfBounds { index: usize, width: usize },
    #[error("joint subset must be nonempty and strictly increasing")]
    InvalidSubset,

    // synergy core
    #[error("need at least 2 postures to fit, got {0}")]
    TooFewSamples(usize),
    #[error("non-finite value at row {row}, column {col}")]
    NonFinite { row: usize, col: usize },
    #[error("eigensolver did not converge within {0} iterations")]
    NoConvergence(usize),
    #[error("eigenvalue {0:e} is negative beyond tolerance")]
    NegativeEigenvalue(f64),
    #[error("component count {n_s} outside 1..={f}")]
    ComponentsOutOfRange { n_s: usize, f: usize },
    #[error("total variance is zero")]
    DegenerateVariance,
    #[error("eigenvectors are not orthonormal (max deviation {0:e})")]
    NotOrthonormal(f64),

    // notation
    #[error("movement unit must have 5 symbols, got {0}")]
    InvalidLength(usize),
    #[error("invalid symbol {symbol:?} at position {position}")]
    InvalidSymbol { symbol: char, position: usize },
    #[error("{0:?} violates the X-then-Y-then-Z ordering")]
    NonCanonical(String),
    #[error("{0:?} has more than one motion group")]
    MultiGroup(String),
    #[error("{0:?} has no motion group")]
    NoMotion(String),
    #[error("function unit {0:?} assigns no finger M")]
    AllFixed(String),

    // switching
    #[error("synergy name {0:?} already registered")]
    DuplicateName(String),
    #[error("synergy {0:?} not found")]
    NotFound(String),
    #[error("invalid synergy name {0:?}")]
    InvalidName(String),
    #[error("corrupt database index: {0}")]
    CorruptIndex(String),
    #[error("phase {phase}: {reason}")]
    InvalidPhase { phase: usize, reason: String },
    #[error("no active phase")]
    NoActivePhase,
    #[error("phase {phase}: input stream ended after {got} of {needed} postures")]
    StreamExhausted { phase: usize, needed: usize, got: usize },
    #[error("expected {expected} input streams, got {actual}")]
    StreamCount { expected: usize, actual: usize },

    // simtasks
    #[error("trajectory is empty")]
    EmptyTrajectory,
    #[error("invalid task spec: {0}")]
    InvalidTaskSpec(String),

    // dataio
    #[error("csv row {row}, column {col}: {message}")]
    Csv { row: usize, col: usize, message: String },
    #[error("csv row {row} has {actual} cells, header has {expected}")]
    RaggedRow { row: usize, expected: usize, actual: usize },
    #[error("file contains no postures")]
    EmptyFile,
    #[error("schema violation: {0}")]
    Schema(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    /// Stable machine-readable name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DuplicateJoint(_) => "DuplicateJoint",
            Error::EmptyFinger(_) => "EmptyFinger",
            Error::MissingPalmFrame(_) => "MissingPalmFrame",
            Error::InvalidLimits { .. } => "InvalidLimits",
            Error::InvalidLinkLength { .. } => "InvalidLinkLength",
            Error::EmptyModel => "EmptyModel",
            Error::UnknownJoint(_) => "UnknownJoint",
            Error::EmptyFingerSet => "EmptyFingerSet",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::IndexOutOfBounds { .. } => "IndexOutOfBounds",
            Error::InvalidSubset => "InvalidSubset",
            Error::TooFewSamples(_) => "TooFewSamples",
            Error::NonFinite { .. } => "NonFinite",
            Error::NoConvergence(_) => "NoConvergence",
            Error::NegativeEigenvalue(_) => "NegativeEigenvalue",
            Error::ComponentsOutOfRange { .. } => "ComponentsOutOfRange",
            Error::DegenerateVariance => "DegenerateVariance",
            Error::NotOrthonormal(_) => "NotOrthonormal",
            Error::InvalidLength(_) => "InvalidLength",
            Error::InvalidSymbol { .. } => "InvalidSymbol",
            Error::NonCanonical(_) => "NonCanonical",
            Error::MultiGroup(_) => "MultiGroup",
            Error::NoMotion(_) => "NoMotion",
            Error::AllFixed(_) => "AllFixed",
            Error::DuplicateName(_) => "DuplicateName",
            Error::NotFound(_) => "NotFound",
            Error::InvalidName(_) => "InvalidName",
            Error::CorruptIndex(_) => "CorruptIndex",
            Error::InvalidPhase { .. } => "InvalidPhase",
            Error::NoActivePhase => "NoActivePhase",
            Error::StreamExhausted { .. } => "StreamExhausted",
            Error::StreamCount { .. } => "StreamCount",
            Error::EmptyTrajectory => "EmptyTrajectory",
            Error::InvalidTaskSpec(_) => "InvalidTaskSpec",
            Error::Csv { .. } => "Csv",
            Error::RaggedRow { .. } => "RaggedRow",
            Error::EmptyFile => "EmptyFile",
            Error::Schema(_) => "Schema",
            Error::Io { .. } => "Io",
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub(crate) fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected == actual {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, actual })
    }
}
